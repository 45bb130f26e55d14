// Exact integrated complete-data likelihood for the temporal latent block
// model, plus incremental deltas for single-element moves and cluster merges.
#pragma once

#include "tlbm/core.hpp"

namespace tlbm {

struct IclValue {
    double total = 0.0;
    double likelihood_term = 0.0;
    double prior_term = 0.0;
};

// Proposed target meaning "create a singleton cluster".
inline constexpr int kNewCluster = -1;

// Log of the integrated Gamma-Poisson factor of one block:
//   a log b - lgamma(a) + S log dt + lgamma(S + a) - (S + a) log(dt R + b).
// The within-block factorial product is excluded (it is handled once via the
// tensor's log_factorial_constant).
double log_gp_block(std::int64_t s, std::int64_t r, const Hyperparams& h);

// Log of the collapsed Dirichlet-multinomial over cluster sizes:
//   lgamma(cQ) - Q lgamma(c) + sum_q lgamma(n_q + c) - lgamma(n + cQ).
double log_dirichlet_multinomial(std::span<const int> sizes, double conc);

// Full ICL at the given partition.
IclValue icl_exact(const CountTensor& tensor, const TriPartition& part,
                   const Hyperparams& h);

// ICL change for moving element `idx` of dimension `dim` from its current
// cluster to `target` (kNewCluster creates a singleton). `profile` is the
// element's counts aggregated by the other two partitions, as produced by
// element_profile. Touches only the affected blocks and the one affected
// Dirichlet-multinomial term. Moving the sole member of a singleton cluster
// to a new cluster is a no-op and returns 0.
double delta_move(Dim dim, int idx, int target, const BlockStats& stats,
                  std::span<const std::int64_t> profile, const TriPartition& part,
                  const Hyperparams& h);

// ICL change for replacing clusters c1 and c2 of dimension `dim` by their
// union.
double delta_merge(Dim dim, int c1, int c2, const BlockStats& stats,
                   const TriPartition& part, const Hyperparams& h);

}  // namespace tlbm

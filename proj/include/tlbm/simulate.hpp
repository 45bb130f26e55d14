// Generative sampler for the non-stationary Poisson block model and
// partition-recovery scoring.
#pragma once

#include <cstdint>
#include <iosfwd>

#include "tlbm/core.hpp"

namespace tlbm {

struct GenSpec {
    int n_rows = 0;
    int n_cols = 0;
    int n_intervals = 0;
    int n_row_clusters = 0;   // K
    int n_col_clusters = 0;   // G
    int n_time_clusters = 0;  // D
    std::vector<double> row_props;
    std::vector<double> col_props;
    std::vector<double> time_props;
    std::vector<double> lambda;  // K*G*D, index (k*G + g)*D + d
    double delta_t = 1.0;
    std::uint64_t seed = 0;

    double rate(int k, int g, int d) const {
        return lambda[(std::size_t(k) * n_col_clusters + g) * n_time_clusters + d];
    }
    void validate() const;
};

// lambda[k][g][l] = s1[k] + s2[g] + s3[l], flattened (k*G + g)*D + l. Every
// resulting rate must be strictly positive.
std::vector<double> lambda_additive(std::span<const double> s1,
                                    std::span<const double> s2,
                                    std::span<const double> s3);

struct SimulatedData {
    CountTensor tensor;
    TriPartition truth;
};

// Draws labels from the given proportions (resampling a dimension whose draw
// left some cluster empty, up to 100 attempts) and each cell count from
// Poisson(delta_t * lambda). Deterministic given spec.seed.
SimulatedData sample(const GenSpec& spec);

// Chance-corrected pair-counting agreement between two labelings; 1 iff
// identical up to relabeling.
double adjusted_rand_index(std::span<const int> p, std::span<const int> q);

// Reads a GenSpec from a JSON config. `lambda` may be given flat (length
// K*G*D, d fastest) or as {"s1": [...], "s2": [...], "s3": [...]} for the
// additive construction. Omitted proportions default to uniform.
GenSpec parse_gen_spec(std::istream& in);

}  // namespace tlbm

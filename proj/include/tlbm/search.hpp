// Greedy ICL maximization: randomized best-move sweeps over the three label
// dimensions, merge passes, and multi-restart orchestration.
#pragma once

#include <cstdint>
#include <random>

#include "tlbm/icl.hpp"

namespace tlbm {

struct SearchConfig {
    int init_k = 10;
    int init_g = 10;
    int init_d = 10;
    int max_sweeps = 100;
    int restarts = 10;
    std::uint64_t seed = 0;
    bool allow_new_row_clusters = true;
    bool allow_new_col_clusters = true;
    bool allow_new_time_clusters = true;
    // Fixing a dimension pins its cluster count: no new clusters, no merges,
    // no moves that would empty a cluster.
    bool fix_row_clusters = false;
    bool fix_col_clusters = false;
    bool fix_time_clusters = false;
    Hyperparams hyper;
    int threads = 0;  // 0 = runtime default; 1 forces serial restarts

    void clamp_to(const CountTensor& tensor);
};

struct FitResult {
    TriPartition partition;
    IclValue icl;
    std::vector<std::pair<int, double>> trace;  // (sweep round, icl total)
    int n_sweeps = 0;
    int restart_index = 0;
};

// Mutable state of one fit: partition, block stats and running ICL total,
// kept in sync through incremental move/merge application.
class FitState {
public:
    FitState(const CountTensor& tensor, TriPartition part, const Hyperparams& hyper);

    const CountTensor& tensor() const { return *tensor_; }
    const TriPartition& partition() const { return part_; }
    const BlockStats& stats() const { return stats_; }
    const Hyperparams& hyper() const { return hyper_; }
    double icl_total() const { return icl_total_; }

    // Applies a move whose delta was computed against the current state.
    // `target` may be kNewCluster. Removes the source cluster if it empties.
    void apply_move(Dim dim, int idx, int target,
                    std::span<const std::int64_t> profile, double delta);
    void apply_merge(Dim dim, int c1, int c2, double delta);

    // Rebuilds stats and the ICL from scratch; true if the incremental state
    // agreed (integer stats equality, ICL within tolerance).
    bool resync();

private:
    void remove_cluster(Dim dim, int idx);

    const CountTensor* tensor_;
    TriPartition part_;
    BlockStats stats_;
    Hyperparams hyper_;
    double icl_total_;
};

// One randomized best-improvement pass over all elements of `dim`. Returns
// whether any move was accepted. With `allow_shrink` false, moves that would
// empty the source cluster are skipped.
bool greedy_sweep(Dim dim, FitState& state, std::mt19937_64& rng,
                  bool allow_new_clusters = true, bool allow_shrink = true);

// Greedily applies the best strictly positive merge per dimension until no
// merge improves. Returns whether any merge was applied.
bool merge_pass(FitState& state);
bool merge_pass(FitState& state, bool rows, bool cols, bool times);

FitResult fit(const CountTensor& tensor, const SearchConfig& cfg);

// Best of cfg.restarts runs of fit with seeds seed, seed+1, ...; ties go to
// the lowest restart index. Restarts run in parallel unless threads == 1.
FitResult multi_restart(const CountTensor& tensor, const SearchConfig& cfg);

// Plain sequential loop over restarts; reference for tests and benchmarks.
FitResult multi_restart_serial(const CountTensor& tensor, const SearchConfig& cfg);

}  // namespace tlbm

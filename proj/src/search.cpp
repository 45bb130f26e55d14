#include "tlbm/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tlbm {

namespace {

bool is_fixed(Dim dim, const SearchConfig& cfg) {
    switch (dim) {
        case Dim::Row: return cfg.fix_row_clusters;
        case Dim::Col: return cfg.fix_col_clusters;
        case Dim::Time: return cfg.fix_time_clusters;
    }
    return false;
}

bool allow_new(Dim dim, const SearchConfig& cfg) {
    if (is_fixed(dim, cfg)) return false;
    switch (dim) {
        case Dim::Row: return cfg.allow_new_row_clusters;
        case Dim::Col: return cfg.allow_new_col_clusters;
        case Dim::Time: return cfg.allow_new_time_clusters;
    }
    return false;
}

// Writable reference into the stats slab of (cluster, other-flat-index).
std::int64_t& stat_ref(Dim dim, BlockStats& stats, int cluster, int o) {
    switch (dim) {
        case Dim::Row: return stats.at(cluster, o / stats.D(), o % stats.D());
        case Dim::Col: return stats.at(o / stats.D(), cluster, o % stats.D());
        case Dim::Time: return stats.at(o / stats.G(), o % stats.G(), cluster);
    }
    throw std::logic_error("bad dim");
}

}  // namespace

void SearchConfig::clamp_to(const CountTensor& tensor) {
    init_k = std::clamp(init_k, 1, tensor.n_rows());
    init_g = std::clamp(init_g, 1, tensor.n_cols());
    init_d = std::clamp(init_d, 1, tensor.n_intervals());
    if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    hyper.validate();
}

FitState::FitState(const CountTensor& tensor, TriPartition part,
                   const Hyperparams& hyper)
    : tensor_(&tensor),
      part_(std::move(part)),
      stats_(block_stats(tensor, part_)),
      hyper_(hyper),
      icl_total_(icl_exact(tensor, part_, hyper).total) {}

void FitState::apply_move(Dim dim, int idx, int target,
                          std::span<const std::int64_t> profile, double delta) {
    auto& labels = part_.labels(dim);
    auto& sizes = part_.sizes(dim);
    int source = labels[idx];
    if (target == kNewCluster) {
        if (sizes[source] == 1) return;  // relabel only, nothing changes
        stats_.add_index(dim);
        target = static_cast<int>(sizes.size());
        sizes.push_back(0);
    }
    for (int o = 0; o < static_cast<int>(profile.size()); ++o) {
        if (profile[o] == 0) continue;
        stat_ref(dim, stats_, source, o) -= profile[o];
        stat_ref(dim, stats_, target, o) += profile[o];
    }
    labels[idx] = target;
    --sizes[source];
    ++sizes[target];
    if (sizes[source] == 0) remove_cluster(dim, source);
    icl_total_ += delta;
}

void FitState::apply_merge(Dim dim, int c1, int c2, double delta) {
    auto& labels = part_.labels(dim);
    auto& sizes = part_.sizes(dim);
    int lo = std::min(c1, c2);
    int hi = std::max(c1, c2);
    stats_.merge_into(dim, lo, hi);
    sizes[lo] += sizes[hi];
    for (int& l : labels)
        if (l == hi) l = lo;
    int last = static_cast<int>(sizes.size()) - 1;
    if (hi != last) {
        for (int& l : labels)
            if (l == last) l = hi;
        sizes[hi] = sizes[last];
    }
    sizes.pop_back();
    icl_total_ += delta;
}

void FitState::remove_cluster(Dim dim, int idx) {
    auto& labels = part_.labels(dim);
    auto& sizes = part_.sizes(dim);
    stats_.swap_remove_index(dim, idx);
    int last = static_cast<int>(sizes.size()) - 1;
    if (idx != last) {
        for (int& l : labels)
            if (l == last) l = idx;
        sizes[idx] = sizes[last];
    }
    sizes.pop_back();
}

bool FitState::resync() {
    BlockStats fresh = block_stats(*tensor_, part_);
    bool stats_ok = fresh == stats_;
    double exact = icl_exact(*tensor_, part_, hyper_).total;
    bool icl_ok = std::abs(exact - icl_total_) <=
                  1e-8 * std::max(1.0, std::abs(exact));
    stats_ = std::move(fresh);
    icl_total_ = exact;
    return stats_ok && icl_ok;
}

bool greedy_sweep(Dim dim, FitState& state, std::mt19937_64& rng,
                  bool allow_new_clusters, bool allow_shrink) {
    int n = state.tensor().dim_size(dim);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    bool any = false;
    for (int idx : order) {
        const auto& part = state.partition();
        int n_clusters = part.n_clusters(dim);
        int source = part.labels(dim)[idx];
        bool singleton_source = part.sizes(dim)[source] == 1;
        if (singleton_source && !allow_shrink) continue;
        bool try_new = allow_new_clusters && !singleton_source;
        if (n_clusters == 1 && !try_new) continue;

        std::vector<std::int64_t> profile =
            element_profile(dim, state.tensor(), part, idx);
        double best_delta = 0.0;
        int best_target = source;
        for (int t = 0; t < n_clusters; ++t) {
            if (t == source) continue;
            double d = delta_move(dim, idx, t, state.stats(), profile, part,
                                  state.hyper());
            if (d > best_delta) {
                best_delta = d;
                best_target = t;
            }
        }
        if (try_new) {
            double d = delta_move(dim, idx, kNewCluster, state.stats(), profile,
                                  part, state.hyper());
            if (d > best_delta) {
                best_delta = d;
                best_target = kNewCluster;
            }
        }
        if (best_delta > 0.0) {
            state.apply_move(dim, idx, best_target, profile, best_delta);
            any = true;
        }
    }
    return any;
}

bool merge_pass(FitState& state) { return merge_pass(state, true, true, true); }

bool merge_pass(FitState& state, bool rows, bool cols, bool times) {
    bool any = false;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Dim dim : {Dim::Row, Dim::Col, Dim::Time}) {
            bool enabled = dim == Dim::Row ? rows : dim == Dim::Col ? cols : times;
            if (!enabled) continue;
            while (true) {
                const auto& part = state.partition();
                int n_clusters = part.n_clusters(dim);
                double best_delta = 0.0;
                int best_c1 = -1, best_c2 = -1;
                for (int c1 = 0; c1 < n_clusters; ++c1)
                    for (int c2 = c1 + 1; c2 < n_clusters; ++c2) {
                        double d = delta_merge(dim, c1, c2, state.stats(), part,
                                               state.hyper());
                        if (d > best_delta) {
                            best_delta = d;
                            best_c1 = c1;
                            best_c2 = c2;
                        }
                    }
                if (best_c1 < 0) break;
                state.apply_merge(dim, best_c1, best_c2, best_delta);
                any = changed = true;
            }
        }
    }
    return any;
}

namespace {

std::vector<int> random_labels(int n, int n_clusters, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, n_clusters - 1);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<int> labels(n);
        std::vector<int> seen(n_clusters, 0);
        for (int& l : labels) seen[l = pick(rng)] = 1;
        if (std::accumulate(seen.begin(), seen.end(), 0) == n_clusters)
            return labels;
    }
    // degenerate n_clusters vs n; round-robin guarantees full occupancy
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i % n_clusters;
    return labels;
}

}  // namespace

FitResult fit(const CountTensor& tensor, const SearchConfig& config) {
    SearchConfig cfg = config;
    cfg.clamp_to(tensor);
    std::mt19937_64 rng(cfg.seed);

    TriPartition part = TriPartition::from_labels(
        random_labels(tensor.n_rows(), cfg.init_k, rng),
        random_labels(tensor.n_cols(), cfg.init_g, rng),
        random_labels(tensor.n_intervals(), cfg.init_d, rng));
    FitState state(tensor, std::move(part), cfg.hyper);

    FitResult result;
    result.trace.emplace_back(0, state.icl_total());
    for (int round = 1; round <= cfg.max_sweeps; ++round) {
        bool improved = false;
        for (Dim dim : {Dim::Row, Dim::Col, Dim::Time})
            if (greedy_sweep(dim, state, rng, allow_new(dim, cfg),
                             !is_fixed(dim, cfg)))
                improved = true;
        if (!improved)
            improved = merge_pass(state, !cfg.fix_row_clusters,
                                  !cfg.fix_col_clusters, !cfg.fix_time_clusters);
        result.n_sweeps = round;
        if (!improved) break;
        result.trace.emplace_back(round, state.icl_total());
    }

    if (!state.resync())
        throw std::runtime_error("fit: incremental state diverged from recompute");
    result.partition = state.partition();
    result.icl = icl_exact(tensor, result.partition, cfg.hyper);
    return result;
}

namespace {

FitResult run_restart(const CountTensor& tensor, const SearchConfig& cfg, int r) {
    SearchConfig one = cfg;
    one.seed = cfg.seed + static_cast<std::uint64_t>(r);
    FitResult res = fit(tensor, one);
    res.restart_index = r;
    return res;
}

FitResult pick_best(std::vector<FitResult>& results) {
    int best = 0;
    for (int r = 1; r < static_cast<int>(results.size()); ++r)
        if (results[r].icl.total > results[best].icl.total) best = r;
    return std::move(results[best]);
}

}  // namespace

FitResult multi_restart_serial(const CountTensor& tensor, const SearchConfig& cfg) {
    std::vector<FitResult> results;
    results.reserve(cfg.restarts);
    for (int r = 0; r < cfg.restarts; ++r)
        results.push_back(run_restart(tensor, cfg, r));
    return pick_best(results);
}

FitResult multi_restart(const CountTensor& tensor, const SearchConfig& cfg) {
#ifdef _OPENMP
    if (cfg.threads != 1) {
        int n_threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
        std::vector<FitResult> results(cfg.restarts);
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
        for (int r = 0; r < cfg.restarts; ++r)
            results[r] = run_restart(tensor, cfg, r);
        return pick_best(results);
    }
#endif
    return multi_restart_serial(tensor, cfg);
}

}  // namespace tlbm

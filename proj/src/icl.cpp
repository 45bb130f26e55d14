#include "tlbm/icl.hpp"

#include <cmath>
#include <stdexcept>

namespace tlbm {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Flat indexing over the two dimensions a profile spans, and the matching
// block capacity factor |.||.| excluding the moved dimension.
struct OtherDims {
    const std::vector<int>* sizes_a;
    const std::vector<int>* sizes_b;
    int stride;  // size of the second other dimension

    std::int64_t cap(int o) const {
        return std::int64_t((*sizes_a)[o / stride]) * (*sizes_b)[o % stride];
    }
};

OtherDims other_dims(Dim dim, const TriPartition& part) {
    switch (dim) {
        case Dim::Row:
            return {&part.col_sizes, &part.time_sizes, part.n_time_clusters()};
        case Dim::Col:
            return {&part.row_sizes, &part.time_sizes, part.n_time_clusters()};
        case Dim::Time:
            return {&part.row_sizes, &part.col_sizes, part.n_col_clusters()};
    }
    throw std::logic_error("bad dim");
}

std::int64_t block_of(Dim dim, const BlockStats& stats, int cluster, int o,
                      int stride) {
    switch (dim) {
        case Dim::Row: return stats.at(cluster, o / stride, o % stride);
        case Dim::Col: return stats.at(o / stride, cluster, o % stride);
        case Dim::Time: return stats.at(o / stride, o % stride, cluster);
    }
    throw std::logic_error("bad dim");
}

double concentration(Dim dim, const Hyperparams& h) {
    switch (dim) {
        case Dim::Row: return h.alpha;
        case Dim::Col: return h.delta;
        case Dim::Time: return h.gamma;
    }
    throw std::logic_error("bad dim");
}

}  // namespace

double log_gp_block(std::int64_t s, std::int64_t r, const Hyperparams& h) {
    require(r >= 1, "log_gp_block: block capacity must be positive");
    require(s >= 0, "log_gp_block: negative block count");
    double ds = static_cast<double>(s);
    return h.a * std::log(h.b) - std::lgamma(h.a) + ds * std::log(h.delta_t) +
           std::lgamma(ds + h.a) -
           (ds + h.a) * std::log(h.delta_t * static_cast<double>(r) + h.b);
}

double log_dirichlet_multinomial(std::span<const int> sizes, double conc) {
    require(!sizes.empty(), "log_dirichlet_multinomial: empty sizes");
    require(conc > 0, "log_dirichlet_multinomial: non-positive concentration");
    double q = static_cast<double>(sizes.size());
    double n = 0.0;
    double acc = 0.0;
    for (int s : sizes) {
        require(s >= 1, "log_dirichlet_multinomial: non-positive cluster size");
        n += s;
        acc += std::lgamma(s + conc);
    }
    return std::lgamma(conc * q) - q * std::lgamma(conc) + acc -
           std::lgamma(n + conc * q);
}

IclValue icl_exact(const CountTensor& tensor, const TriPartition& part,
                   const Hyperparams& h) {
    h.validate();
    part.check_compatible(tensor);
    BlockStats stats = block_stats(tensor, part);

    IclValue v;
    for (int k = 0; k < stats.K(); ++k)
        for (int g = 0; g < stats.G(); ++g)
            for (int d = 0; d < stats.D(); ++d) {
                std::int64_t r = std::int64_t(part.row_sizes[k]) * part.col_sizes[g] *
                                 part.time_sizes[d];
                v.likelihood_term += log_gp_block(stats.at(k, g, d), r, h);
            }
    v.likelihood_term -= tensor.log_factorial_constant();
    v.prior_term = log_dirichlet_multinomial(part.row_sizes, h.alpha) +
                   log_dirichlet_multinomial(part.col_sizes, h.delta) +
                   log_dirichlet_multinomial(part.time_sizes, h.gamma);
    v.total = v.likelihood_term + v.prior_term;
    return v;
}

double delta_move(Dim dim, int idx, int target, const BlockStats& stats,
                  std::span<const std::int64_t> profile, const TriPartition& part,
                  const Hyperparams& h) {
    const auto& labels = part.labels(dim);
    const auto& sizes = part.sizes(dim);
    int n_clusters = static_cast<int>(sizes.size());
    require(idx >= 0 && idx < static_cast<int>(labels.size()),
            "delta_move: element index out of range");
    require(target == kNewCluster || (target >= 0 && target < n_clusters),
            "delta_move: target cluster out of range");
    int source = labels[idx];
    require(target != source, "delta_move: target equals current cluster");

    int source_size = sizes[source];
    if (target == kNewCluster && source_size == 1) return 0.0;  // relabel only

    OtherDims other = other_dims(dim, part);
    require(profile.size() == std::size_t((*other.sizes_a).size()) *
                                  (*other.sizes_b).size(),
            "delta_move: profile size mismatch");

    int target_size = target == kNewCluster ? 0 : sizes[target];
    double delta = 0.0;
    for (int o = 0; o < static_cast<int>(profile.size()); ++o) {
        std::int64_t cap = other.cap(o);
        std::int64_t p = profile[o];
        std::int64_t s_src = block_of(dim, stats, source, o, other.stride);
        std::int64_t s_tgt =
            target == kNewCluster ? 0 : block_of(dim, stats, target, o, other.stride);
        delta -= log_gp_block(s_src, std::int64_t(source_size) * cap, h);
        if (target != kNewCluster)
            delta -= log_gp_block(s_tgt, std::int64_t(target_size) * cap, h);
        if (source_size > 1)
            delta += log_gp_block(s_src - p, std::int64_t(source_size - 1) * cap, h);
        delta += log_gp_block(s_tgt + p, std::int64_t(target_size + 1) * cap, h);
    }

    std::vector<int> new_sizes(sizes.begin(), sizes.end());
    if (target == kNewCluster)
        new_sizes.push_back(1);
    else
        ++new_sizes[target];
    if (source_size == 1)
        new_sizes.erase(new_sizes.begin() + source);
    else
        --new_sizes[source];
    double conc = concentration(dim, h);
    delta += log_dirichlet_multinomial(new_sizes, conc) -
             log_dirichlet_multinomial(sizes, conc);
    return delta;
}

double delta_merge(Dim dim, int c1, int c2, const BlockStats& stats,
                   const TriPartition& part, const Hyperparams& h) {
    const auto& sizes = part.sizes(dim);
    int n_clusters = static_cast<int>(sizes.size());
    require(c1 >= 0 && c1 < n_clusters && c2 >= 0 && c2 < n_clusters,
            "delta_merge: cluster index out of range");
    require(c1 != c2, "delta_merge: identical clusters");

    OtherDims other = other_dims(dim, part);
    int n_other = static_cast<int>((*other.sizes_a).size() * (*other.sizes_b).size());
    std::int64_t n1 = sizes[c1];
    std::int64_t n2 = sizes[c2];

    double delta = 0.0;
    for (int o = 0; o < n_other; ++o) {
        std::int64_t cap = other.cap(o);
        std::int64_t s1 = block_of(dim, stats, c1, o, other.stride);
        std::int64_t s2 = block_of(dim, stats, c2, o, other.stride);
        delta += log_gp_block(s1 + s2, (n1 + n2) * cap, h) -
                 log_gp_block(s1, n1 * cap, h) - log_gp_block(s2, n2 * cap, h);
    }

    std::vector<int> new_sizes(sizes.begin(), sizes.end());
    new_sizes[std::min(c1, c2)] = static_cast<int>(n1 + n2);
    new_sizes.erase(new_sizes.begin() + std::max(c1, c2));
    double conc = concentration(dim, h);
    delta += log_dirichlet_multinomial(new_sizes, conc) -
             log_dirichlet_multinomial(sizes, conc);
    return delta;
}

}  // namespace tlbm

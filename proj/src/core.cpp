#include "tlbm/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tlbm {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

CountTensor::CountTensor(int n_rows, int n_cols, int n_intervals,
                         std::span<const EventRecord> events)
    : n_rows_(n_rows), n_cols_(n_cols), n_intervals_(n_intervals) {
    require(n_rows > 0 && n_cols > 0 && n_intervals > 0,
            "CountTensor: dimensions must be positive");

    std::unordered_map<std::uint64_t, std::int64_t> acc;
    acc.reserve(events.size());
    for (const EventRecord& e : events) {
        require(e.row >= 0 && e.row < n_rows, "CountTensor: row index out of range");
        require(e.col >= 0 && e.col < n_cols, "CountTensor: col index out of range");
        require(e.interval >= 0 && e.interval < n_intervals,
                "CountTensor: interval index out of range");
        require(e.count >= 0, "CountTensor: negative count");
        if (e.count == 0) continue;
        std::uint64_t key =
            (std::uint64_t(e.row) * n_cols + e.col) * n_intervals + e.interval;
        acc[key] += e.count;
    }

    entries_.reserve(acc.size());
    for (const auto& [key, count] : acc) {
        auto interval = static_cast<std::int32_t>(key % n_intervals);
        auto col = static_cast<std::int32_t>((key / n_intervals) % n_cols);
        auto row = static_cast<std::int32_t>(key / n_intervals / n_cols);
        entries_.push_back({row, col, interval, count});
    }
    std::sort(entries_.begin(), entries_.end(), [](const auto& x, const auto& y) {
        return std::tie(x.row, x.col, x.interval) < std::tie(y.row, y.col, y.interval);
    });

    for (const EventRecord& e : entries_) {
        total_ += e.count;
        log_factorial_constant_ += std::lgamma(double(e.count) + 1.0);
    }

    auto build = [](Adjacency& adj, int dim, const std::vector<EventRecord>& entries,
                    auto key, auto a, auto b) {
        adj.offsets.assign(std::size_t(dim) + 1, 0);
        for (const EventRecord& e : entries) ++adj.offsets[key(e) + 1];
        for (int i = 0; i < dim; ++i) adj.offsets[i + 1] += adj.offsets[i];
        adj.cells.resize(entries.size());
        std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
        for (const EventRecord& e : entries)
            adj.cells[cursor[key(e)]++] = Cell{a(e), b(e), e.count};
    };
    build(by_row_, n_rows_, entries_, [](const EventRecord& e) { return e.row; },
          [](const EventRecord& e) { return e.col; },
          [](const EventRecord& e) { return e.interval; });
    build(by_col_, n_cols_, entries_, [](const EventRecord& e) { return e.col; },
          [](const EventRecord& e) { return e.row; },
          [](const EventRecord& e) { return e.interval; });
    build(by_interval_, n_intervals_, entries_,
          [](const EventRecord& e) { return e.interval; },
          [](const EventRecord& e) { return e.row; },
          [](const EventRecord& e) { return e.col; });
}

int CountTensor::dim_size(Dim d) const {
    switch (d) {
        case Dim::Row: return n_rows_;
        case Dim::Col: return n_cols_;
        case Dim::Time: return n_intervals_;
    }
    throw std::logic_error("bad dim");
}

std::span<const CountTensor::Cell> CountTensor::row_cells(int i) const {
    require(i >= 0 && i < n_rows_, "row index out of range");
    return by_row_.at(i);
}

std::span<const CountTensor::Cell> CountTensor::col_cells(int j) const {
    require(j >= 0 && j < n_cols_, "col index out of range");
    return by_col_.at(j);
}

std::span<const CountTensor::Cell> CountTensor::interval_cells(int u) const {
    require(u >= 0 && u < n_intervals_, "interval index out of range");
    return by_interval_.at(u);
}

int TriPartition::n_clusters(Dim d) const {
    return static_cast<int>(sizes(d).size());
}

std::vector<int>& TriPartition::labels(Dim d) {
    switch (d) {
        case Dim::Row: return row_labels;
        case Dim::Col: return col_labels;
        case Dim::Time: return time_labels;
    }
    throw std::logic_error("bad dim");
}

const std::vector<int>& TriPartition::labels(Dim d) const {
    return const_cast<TriPartition*>(this)->labels(d);
}

std::vector<int>& TriPartition::sizes(Dim d) {
    switch (d) {
        case Dim::Row: return row_sizes;
        case Dim::Col: return col_sizes;
        case Dim::Time: return time_sizes;
    }
    throw std::logic_error("bad dim");
}

const std::vector<int>& TriPartition::sizes(Dim d) const {
    return const_cast<TriPartition*>(this)->sizes(d);
}

static std::vector<int> sizes_of(const std::vector<int>& labels) {
    int n_clusters = 0;
    for (int l : labels) {
        require(l >= 0, "negative cluster label");
        n_clusters = std::max(n_clusters, l + 1);
    }
    std::vector<int> sizes(n_clusters, 0);
    for (int l : labels) ++sizes[l];
    for (int s : sizes) require(s > 0, "empty cluster in label vector");
    return sizes;
}

TriPartition TriPartition::from_labels(std::vector<int> rows, std::vector<int> cols,
                                       std::vector<int> times) {
    require(!rows.empty() && !cols.empty() && !times.empty(),
            "label vectors must be non-empty");
    TriPartition p;
    p.row_sizes = sizes_of(rows);
    p.col_sizes = sizes_of(cols);
    p.time_sizes = sizes_of(times);
    p.row_labels = std::move(rows);
    p.col_labels = std::move(cols);
    p.time_labels = std::move(times);
    return p;
}

void TriPartition::check_compatible(const CountTensor& tensor) const {
    require(static_cast<int>(row_labels.size()) == tensor.n_rows() &&
                static_cast<int>(col_labels.size()) == tensor.n_cols() &&
                static_cast<int>(time_labels.size()) == tensor.n_intervals(),
            "partition dimensions do not match tensor");
}

void Hyperparams::validate() const {
    require(a > 0 && b > 0 && alpha > 0 && delta > 0 && gamma > 0 && delta_t > 0,
            "hyperparameters must be strictly positive");
}

std::int64_t BlockStats::sum() const {
    std::int64_t t = 0;
    for (std::int64_t v : s_) t += v;
    return t;
}

void BlockStats::add_index(Dim dim) {
    BlockStats next(K_ + (dim == Dim::Row), G_ + (dim == Dim::Col),
                    D_ + (dim == Dim::Time));
    for (int k = 0; k < K_; ++k)
        for (int g = 0; g < G_; ++g)
            for (int d = 0; d < D_; ++d) next.at(k, g, d) = at(k, g, d);
    *this = std::move(next);
}

void BlockStats::swap_remove_index(Dim dim, int idx) {
    int n = dim == Dim::Row ? K_ : dim == Dim::Col ? G_ : D_;
    require(idx >= 0 && idx < n, "swap_remove_index: index out of range");
    int last = n - 1;
    BlockStats next(K_ - (dim == Dim::Row), G_ - (dim == Dim::Col),
                    D_ - (dim == Dim::Time));
    auto src = [&](int k, int g, int d) {
        int& moved = dim == Dim::Row ? k : dim == Dim::Col ? g : d;
        if (moved == idx) moved = last;
        return at(k, g, d);
    };
    for (int k = 0; k < next.K_; ++k)
        for (int g = 0; g < next.G_; ++g)
            for (int d = 0; d < next.D_; ++d) next.at(k, g, d) = src(k, g, d);
    *this = std::move(next);
}

void BlockStats::merge_into(Dim dim, int to, int from) {
    require(to != from, "merge_into: identical clusters");
    switch (dim) {
        case Dim::Row:
            for (int g = 0; g < G_; ++g)
                for (int d = 0; d < D_; ++d) at(to, g, d) += at(from, g, d);
            break;
        case Dim::Col:
            for (int k = 0; k < K_; ++k)
                for (int d = 0; d < D_; ++d) at(k, to, d) += at(k, from, d);
            break;
        case Dim::Time:
            for (int k = 0; k < K_; ++k)
                for (int g = 0; g < G_; ++g) at(k, g, to) += at(k, g, from);
            break;
    }
    swap_remove_index(dim, from);
}

BlockStats block_stats(const CountTensor& tensor, const TriPartition& part,
                       bool parallel) {
    part.check_compatible(tensor);
    int K = part.n_row_clusters();
    int G = part.n_col_clusters();
    int D = part.n_time_clusters();
    BlockStats stats(K, G, D);
    const auto& entries = tensor.entries();

    if (parallel) {
#ifdef _OPENMP
        int n_threads = omp_get_max_threads();
        std::vector<BlockStats> partial(n_threads, BlockStats(K, G, D));
#pragma omp parallel
        {
            BlockStats& mine = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
            for (std::size_t e = 0; e < entries.size(); ++e) {
                const EventRecord& r = entries[e];
                mine.at(part.row_labels[r.row], part.col_labels[r.col],
                        part.time_labels[r.interval]) += r.count;
            }
        }
        for (const BlockStats& p : partial)
            for (int k = 0; k < K; ++k)
                for (int g = 0; g < G; ++g)
                    for (int d = 0; d < D; ++d) stats.at(k, g, d) += p.at(k, g, d);
        return stats;
#endif
    }

    for (const EventRecord& r : entries)
        stats.at(part.row_labels[r.row], part.col_labels[r.col],
                 part.time_labels[r.interval]) += r.count;
    return stats;
}

std::vector<std::int64_t> row_profile(const CountTensor& tensor,
                                      const TriPartition& part, int i) {
    part.check_compatible(tensor);
    int G = part.n_col_clusters();
    int D = part.n_time_clusters();
    std::vector<std::int64_t> profile(std::size_t(G) * D, 0);
    for (const auto& cell : tensor.row_cells(i))
        profile[std::size_t(part.col_labels[cell.a]) * D + part.time_labels[cell.b]] +=
            cell.count;
    return profile;
}

std::vector<std::int64_t> col_profile(const CountTensor& tensor,
                                      const TriPartition& part, int j) {
    part.check_compatible(tensor);
    int K = part.n_row_clusters();
    int D = part.n_time_clusters();
    std::vector<std::int64_t> profile(std::size_t(K) * D, 0);
    for (const auto& cell : tensor.col_cells(j))
        profile[std::size_t(part.row_labels[cell.a]) * D + part.time_labels[cell.b]] +=
            cell.count;
    return profile;
}

std::vector<std::int64_t> interval_profile(const CountTensor& tensor,
                                           const TriPartition& part, int u) {
    part.check_compatible(tensor);
    int K = part.n_row_clusters();
    int G = part.n_col_clusters();
    std::vector<std::int64_t> profile(std::size_t(K) * G, 0);
    for (const auto& cell : tensor.interval_cells(u))
        profile[std::size_t(part.row_labels[cell.a]) * G + part.col_labels[cell.b]] +=
            cell.count;
    return profile;
}

std::vector<std::int64_t> element_profile(Dim dim, const CountTensor& tensor,
                                          const TriPartition& part, int idx) {
    switch (dim) {
        case Dim::Row: return row_profile(tensor, part, idx);
        case Dim::Col: return col_profile(tensor, part, idx);
        case Dim::Time: return interval_profile(tensor, part, idx);
    }
    throw std::logic_error("bad dim");
}

}  // namespace tlbm

// Core domain types for the temporal latent block model: the sparse count
// tensor, the three-way partition and the block sufficient statistics.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlbm {

enum class Dim { Row, Col, Time };

inline const char* dim_name(Dim d) {
    switch (d) {
        case Dim::Row: return "row";
        case Dim::Col: return "col";
        case Dim::Time: return "time";
    }
    return "?";
}

// One observed interaction record: count interactions between row node and
// col node inside one time interval.
struct EventRecord {
    std::int32_t row = 0;
    std::int32_t col = 0;
    std::int32_t interval = 0;
    std::int64_t count = 0;
};

// Immutable N x M x U count tensor stored sparsely, with adjacency lists per
// row, column and interval plus the cached log-factorial constant
// sum_{i,j,u} log(n_iju!).
class CountTensor {
public:
    // (a, b) are the two indices of the non-fixed dimensions, in (row, col,
    // interval) order with the fixed one removed.
    struct Cell {
        std::int32_t a = 0;
        std::int32_t b = 0;
        std::int64_t count = 0;
    };

    CountTensor(int n_rows, int n_cols, int n_intervals,
                std::span<const EventRecord> events);

    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }
    int n_intervals() const { return n_intervals_; }
    int dim_size(Dim d) const;

    std::int64_t total() const { return total_; }
    double log_factorial_constant() const { return log_factorial_constant_; }

    // Deduplicated entries with count > 0, sorted by (row, col, interval).
    const std::vector<EventRecord>& entries() const { return entries_; }

    std::span<const Cell> row_cells(int i) const;       // (col, interval)
    std::span<const Cell> col_cells(int j) const;       // (row, interval)
    std::span<const Cell> interval_cells(int u) const;  // (row, col)

private:
    struct Adjacency {
        std::vector<std::size_t> offsets;  // size dim+1
        std::vector<Cell> cells;
        std::span<const Cell> at(int i) const {
            return {cells.data() + offsets[i], offsets[i + 1] - offsets[i]};
        }
    };

    int n_rows_;
    int n_cols_;
    int n_intervals_;
    std::int64_t total_ = 0;
    double log_factorial_constant_ = 0.0;
    std::vector<EventRecord> entries_;
    Adjacency by_row_;
    Adjacency by_col_;
    Adjacency by_interval_;
};

// Labels c, w, y for rows, columns and intervals together with cluster sizes.
// Every cluster index below the current count is non-empty.
struct TriPartition {
    std::vector<int> row_labels;
    std::vector<int> col_labels;
    std::vector<int> time_labels;
    std::vector<int> row_sizes;
    std::vector<int> col_sizes;
    std::vector<int> time_sizes;

    int n_row_clusters() const { return static_cast<int>(row_sizes.size()); }
    int n_col_clusters() const { return static_cast<int>(col_sizes.size()); }
    int n_time_clusters() const { return static_cast<int>(time_sizes.size()); }
    int n_clusters(Dim d) const;

    std::vector<int>& labels(Dim d);
    const std::vector<int>& labels(Dim d) const;
    std::vector<int>& sizes(Dim d);
    const std::vector<int>& sizes(Dim d) const;

    // Builds sizes from the label vectors; labels must use every index in
    // [0, max_label] at least once.
    static TriPartition from_labels(std::vector<int> rows, std::vector<int> cols,
                                    std::vector<int> times);

    void check_compatible(const CountTensor& tensor) const;
};

// Gamma prior (a, b) on block rates, Dirichlet concentrations on the three
// partitions and the interval width.
struct Hyperparams {
    double a = 1.0;
    double b = 1.0;
    double alpha = 1.0;  // rows
    double delta = 1.0;  // columns
    double gamma = 1.0;  // intervals
    double delta_t = 1.0;

    void validate() const;
};

// K x G x D array of block count totals S_kgd. The block capacity R_kgd is
// |A_k||B_g||C_d|, derived from the partition alongside.
class BlockStats {
public:
    BlockStats() = default;
    BlockStats(int K, int G, int D) : K_(K), G_(G), D_(D), s_(std::size_t(K) * G * D, 0) {}

    int K() const { return K_; }
    int G() const { return G_; }
    int D() const { return D_; }

    std::int64_t& at(int k, int g, int d) { return s_[index(k, g, d)]; }
    std::int64_t at(int k, int g, int d) const { return s_[index(k, g, d)]; }

    std::int64_t sum() const;

    // Appends one empty cluster along the given dimension.
    void add_index(Dim dim);
    // Removes cluster `idx` by moving the last cluster of that dimension into
    // its slot (the caller relabels accordingly).
    void swap_remove_index(Dim dim, int idx);
    // Adds the slab of cluster `from` into cluster `to` along `dim`.
    void merge_into(Dim dim, int to, int from);

    bool operator==(const BlockStats&) const = default;

private:
    std::size_t index(int k, int g, int d) const {
        return (std::size_t(k) * G_ + g) * D_ + d;
    }

    int K_ = 0, G_ = 0, D_ = 0;
    std::vector<std::int64_t> s_;
};

// S_kgd from scratch. `parallel` enables the OpenMP path; the serial path is
// the reference used by tests.
BlockStats block_stats(const CountTensor& tensor, const TriPartition& part,
                       bool parallel = false);

// Counts of row i aggregated by (column cluster, time cluster); flat G*D
// array indexed g * D + d.
std::vector<std::int64_t> row_profile(const CountTensor& tensor,
                                      const TriPartition& part, int i);
// Counts of column j by (row cluster, time cluster); flat K*D, k * D + d.
std::vector<std::int64_t> col_profile(const CountTensor& tensor,
                                      const TriPartition& part, int j);
// Counts of interval u by (row cluster, column cluster); flat K*G, k * G + g.
std::vector<std::int64_t> interval_profile(const CountTensor& tensor,
                                           const TriPartition& part, int u);

std::vector<std::int64_t> element_profile(Dim dim, const CountTensor& tensor,
                                          const TriPartition& part, int idx);

}  // namespace tlbm

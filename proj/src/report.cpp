#include "tlbm/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace tlbm {

using nlohmann::json;

std::vector<double> time_cluster_intensity(const CountTensor& tensor,
                                           const TriPartition& part,
                                           const Hyperparams& h) {
    BlockStats stats = block_stats(tensor, part);
    int n_blocks = stats.K() * stats.G();
    std::vector<double> intensity(stats.D(), 0.0);
    for (int d = 0; d < stats.D(); ++d) {
        double acc = 0.0;
        for (int k = 0; k < stats.K(); ++k)
            for (int g = 0; g < stats.G(); ++g) {
                double r = double(part.row_sizes[k]) * part.col_sizes[g] *
                           part.time_sizes[d];
                acc += (double(stats.at(k, g, d)) + h.a) / (h.delta_t * r + h.b);
            }
        intensity[d] = acc / n_blocks;
    }
    return intensity;
}

std::vector<std::int64_t> interval_totals(const CountTensor& tensor) {
    std::vector<std::int64_t> totals(tensor.n_intervals(), 0);
    for (const EventRecord& e : tensor.entries()) totals[e.interval] += e.count;
    return totals;
}

json build_run_report(const CountTensor& tensor, const SearchConfig& cfg,
                      const FitResult& result) {
    json report;
    report["spec_version"] = 1;
    report["config"] = {
        {"init_k", cfg.init_k},
        {"init_g", cfg.init_g},
        {"init_d", cfg.init_d},
        {"max_sweeps", cfg.max_sweeps},
        {"restarts", cfg.restarts},
        {"seed", cfg.seed},
        {"allow_new_clusters",
         {{"row", cfg.allow_new_row_clusters},
          {"col", cfg.allow_new_col_clusters},
          {"time", cfg.allow_new_time_clusters}}},
        {"hyper",
         {{"a", cfg.hyper.a},
          {"b", cfg.hyper.b},
          {"alpha", cfg.hyper.alpha},
          {"delta", cfg.hyper.delta},
          {"gamma", cfg.hyper.gamma},
          {"delta_t", cfg.hyper.delta_t}}},
    };
    report["icl"] = {{"total", result.icl.total},
                     {"likelihood_term", result.icl.likelihood_term},
                     {"prior_term", result.icl.prior_term}};
    report["n_sweeps"] = result.n_sweeps;
    report["restart_index"] = result.restart_index;
    report["trace"] = result.trace;
    const TriPartition& part = result.partition;
    report["n_clusters"] = {{"row", part.n_row_clusters()},
                            {"col", part.n_col_clusters()},
                            {"time", part.n_time_clusters()}};
    report["assignments"] = {{"row", part.row_labels},
                             {"col", part.col_labels},
                             {"time", part.time_labels}};

    auto totals = interval_totals(tensor);
    json intervals = json::array();
    for (int u = 0; u < tensor.n_intervals(); ++u)
        intervals.push_back({{"interval", u},
                             {"cluster", part.time_labels[u]},
                             {"total_count", totals[u]}});
    report["intervals"] = intervals;

    auto intensity = time_cluster_intensity(tensor, part, cfg.hyper);
    json clusters = json::array();
    for (int d = 0; d < part.n_time_clusters(); ++d)
        clusters.push_back({{"cluster", d},
                            {"n_intervals", part.time_sizes[d]},
                            {"mean_intensity", intensity[d]}});
    report["time_cluster_intensity"] = clusters;
    return report;
}

void write_assignments_csv(std::ostream& out, const TriPartition& part) {
    out << "dim,index,cluster\n";
    for (std::size_t i = 0; i < part.row_labels.size(); ++i)
        out << "row," << i << ',' << part.row_labels[i] << '\n';
    for (std::size_t j = 0; j < part.col_labels.size(); ++j)
        out << "col," << j << ',' << part.col_labels[j] << '\n';
    for (std::size_t u = 0; u < part.time_labels.size(); ++u)
        out << "time," << u << ',' << part.time_labels[u] << '\n';
}

TriPartition read_assignments_csv(std::istream& in) {
    std::vector<int> rows, cols, times;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "dim,index,cluster" || line[0] == '#') continue;
        while (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find(',');
        auto second = line.find(',', first + 1);
        if (first == std::string::npos || second == std::string::npos)
            throw std::runtime_error("assignments line " + std::to_string(line_no) +
                                     ": expected dim,index,cluster");
        std::string dim = line.substr(0, first);
        int index = std::stoi(line.substr(first + 1, second - first - 1));
        int cluster = std::stoi(line.substr(second + 1));
        auto& target = dim == "row" ? rows : dim == "col" ? cols : times;
        if (dim != "row" && dim != "col" && dim != "time")
            throw std::runtime_error("assignments line " + std::to_string(line_no) +
                                     ": unknown dimension '" + dim + "'");
        if (index != static_cast<int>(target.size()))
            throw std::runtime_error("assignments line " + std::to_string(line_no) +
                                     ": indices must be dense and in order");
        target.push_back(cluster);
    }
    return TriPartition::from_labels(std::move(rows), std::move(cols),
                                     std::move(times));
}

void write_intervals_csv(std::ostream& out, const CountTensor& tensor,
                         const TriPartition& part) {
    auto totals = interval_totals(tensor);
    out << "interval,cluster,total_count\n";
    for (int u = 0; u < tensor.n_intervals(); ++u)
        out << u << ',' << part.time_labels[u] << ',' << totals[u] << '\n';
}

}  // namespace tlbm

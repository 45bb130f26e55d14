#include "tlbm/simulate.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace tlbm {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_props(const std::vector<double>& props, int expected, const char* what) {
    require(static_cast<int>(props.size()) == expected,
            "GenSpec: proportion vector length does not match cluster count");
    double sum = std::accumulate(props.begin(), props.end(), 0.0);
    require(std::abs(sum - 1.0) <= 1e-12, what);
    for (double p : props) require(p > 0, "GenSpec: non-positive proportion");
}

}  // namespace

void GenSpec::validate() const {
    require(n_rows > 0 && n_cols > 0 && n_intervals > 0, "GenSpec: bad dimensions");
    require(n_row_clusters > 0 && n_row_clusters <= n_rows &&
                n_col_clusters > 0 && n_col_clusters <= n_cols &&
                n_time_clusters > 0 && n_time_clusters <= n_intervals,
            "GenSpec: cluster counts must be in [1, dimension size]");
    check_props(row_props, n_row_clusters, "GenSpec: row proportions must sum to 1");
    check_props(col_props, n_col_clusters, "GenSpec: col proportions must sum to 1");
    check_props(time_props, n_time_clusters,
                "GenSpec: time proportions must sum to 1");
    require(lambda.size() == std::size_t(n_row_clusters) * n_col_clusters *
                                 n_time_clusters,
            "GenSpec: lambda size mismatch");
    for (double l : lambda) require(l > 0, "GenSpec: non-positive rate");
    require(delta_t > 0, "GenSpec: non-positive interval width");
}

std::vector<double> lambda_additive(std::span<const double> s1,
                                    std::span<const double> s2,
                                    std::span<const double> s3) {
    require(!s1.empty() && !s2.empty() && !s3.empty(),
            "lambda_additive: empty component");
    std::vector<double> lambda;
    lambda.reserve(s1.size() * s2.size() * s3.size());
    for (double a : s1)
        for (double b : s2)
            for (double c : s3) {
                double rate = a + b + c;
                require(rate > 0, "lambda_additive: non-positive rate");
                lambda.push_back(rate);
            }
    return lambda;
}

namespace {

std::vector<int> sample_labels(int n, const std::vector<double>& props,
                               std::mt19937_64& rng) {
    int n_clusters = static_cast<int>(props.size());
    std::discrete_distribution<int> pick(props.begin(), props.end());
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<int> labels(n);
        std::vector<int> seen(n_clusters, 0);
        for (int& l : labels) seen[l = pick(rng)] = 1;
        if (std::accumulate(seen.begin(), seen.end(), 0) == n_clusters)
            return labels;
    }
    throw std::runtime_error(
        "sample: could not draw labels covering every cluster in 100 attempts");
}

}  // namespace

SimulatedData sample(const GenSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    TriPartition truth = TriPartition::from_labels(
        sample_labels(spec.n_rows, spec.row_props, rng),
        sample_labels(spec.n_cols, spec.col_props, rng),
        sample_labels(spec.n_intervals, spec.time_props, rng));

    std::vector<EventRecord> events;
    std::poisson_distribution<std::int64_t> poisson;
    using Param = std::poisson_distribution<std::int64_t>::param_type;
    for (int i = 0; i < spec.n_rows; ++i)
        for (int j = 0; j < spec.n_cols; ++j)
            for (int u = 0; u < spec.n_intervals; ++u) {
                double mean = spec.delta_t * spec.rate(truth.row_labels[i],
                                                       truth.col_labels[j],
                                                       truth.time_labels[u]);
                std::int64_t count = poisson(rng, Param(mean));
                if (count > 0)
                    events.push_back({i, j, u, count});
            }

    CountTensor tensor(spec.n_rows, spec.n_cols, spec.n_intervals, events);
    return {std::move(tensor), std::move(truth)};
}

GenSpec parse_gen_spec(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in);
    GenSpec spec;
    spec.n_rows = j.at("n_rows");
    spec.n_cols = j.at("n_cols");
    spec.n_intervals = j.at("n_intervals");
    spec.n_row_clusters = j.at("n_row_clusters");
    spec.n_col_clusters = j.at("n_col_clusters");
    spec.n_time_clusters = j.at("n_time_clusters");
    auto props = [&](const char* key, int n) -> std::vector<double> {
        if (j.contains(key)) return j.at(key).get<std::vector<double>>();
        return std::vector<double>(n, 1.0 / n);
    };
    spec.row_props = props("row_props", spec.n_row_clusters);
    spec.col_props = props("col_props", spec.n_col_clusters);
    spec.time_props = props("time_props", spec.n_time_clusters);
    const auto& lam = j.at("lambda");
    if (lam.is_object())
        spec.lambda = lambda_additive(lam.at("s1").get<std::vector<double>>(),
                                      lam.at("s2").get<std::vector<double>>(),
                                      lam.at("s3").get<std::vector<double>>());
    else
        spec.lambda = lam.get<std::vector<double>>();
    spec.delta_t = j.value("delta_t", 1.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.validate();
    return spec;
}

double adjusted_rand_index(std::span<const int> p, std::span<const int> q) {
    require(p.size() == q.size(), "adjusted_rand_index: length mismatch");
    require(!p.empty(), "adjusted_rand_index: empty labelings");

    int kp = 0, kq = 0;
    for (int l : p) kp = std::max(kp, l + 1);
    for (int l : q) kq = std::max(kq, l + 1);
    std::vector<std::int64_t> table(std::size_t(kp) * kq, 0);
    std::vector<std::int64_t> rows(kp, 0), cols(kq, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        ++table[std::size_t(p[i]) * kq + q[i]];
        ++rows[p[i]];
        ++cols[q[i]];
    }

    auto choose2 = [](std::int64_t n) { return n * (n - 1) / 2; };
    double index = 0, sum_rows = 0, sum_cols = 0;
    for (std::int64_t v : table) index += choose2(v);
    for (std::int64_t v : rows) sum_rows += choose2(v);
    for (std::int64_t v : cols) sum_cols += choose2(v);
    double pairs = choose2(static_cast<std::int64_t>(p.size()));
    if (pairs == 0) return 1.0;  // single element
    double expected = sum_rows * sum_cols / pairs;
    double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;  // both partitions trivial
    return (index - expected) / (max_index - expected);
}

}  // namespace tlbm

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "oracle.hpp"
#include "tlbm/search.hpp"

using namespace tlbm;

namespace {

const Hyperparams kUnit;

// Exhaustive maximum ICL over all set partitions with at most `max_blocks`
// clusters per dimension, evaluated with the naive oracle.
double enumerate_max_icl(const CountTensor& t, int max_blocks,
                         const Hyperparams& h) {
    auto rows = oracle::set_partitions(t.n_rows(), max_blocks);
    auto cols = oracle::set_partitions(t.n_cols(), max_blocks);
    auto times = oracle::set_partitions(t.n_intervals(), max_blocks);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
        for (const auto& c : cols)
            for (const auto& y : times)
                best = std::max(best, oracle::naive_icl(t, r, c, y, h));
    return best;
}

}  // namespace

TEST_CASE("sweep with one cluster and no growth does nothing") {
    CountTensor t(3, 3, 3, std::vector<EventRecord>{{0, 0, 0, 4}, {2, 2, 2, 1}});
    FitState state(t, TriPartition::from_labels({0, 0, 0}, {0, 0, 0}, {0, 0, 0}),
                   kUnit);
    std::mt19937_64 rng(1);
    CHECK_FALSE(greedy_sweep(Dim::Row, state, rng, /*allow_new=*/false));
}

TEST_CASE("sweeps stop at the enumerated global optimum") {
    std::mt19937_64 rng(3);
    CountTensor t = oracle::random_tensor(rng, 3, 5);

    // locate the optimum over all partitions (up to 3 clusters = everything)
    auto rows = oracle::set_partitions(t.n_rows(), t.n_rows());
    auto cols = oracle::set_partitions(t.n_cols(), t.n_cols());
    auto times = oracle::set_partitions(t.n_intervals(), t.n_intervals());
    double best = -std::numeric_limits<double>::infinity();
    TriPartition arg;
    for (const auto& r : rows)
        for (const auto& c : cols)
            for (const auto& y : times) {
                double v = oracle::naive_icl(t, r, c, y, kUnit);
                if (v > best) {
                    best = v;
                    arg = TriPartition::from_labels(r, c, y);
                }
            }

    FitState state(t, arg, kUnit);
    for (Dim dim : {Dim::Row, Dim::Col, Dim::Time})
        CHECK_FALSE(greedy_sweep(dim, state, rng, true));
    CHECK_FALSE(merge_pass(state));
}

TEST_CASE("one sweep repairs a one-off labeling of a planted instance") {
    // two row blocks with far-apart rates; row 3 mislabeled
    std::vector<EventRecord> events;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 4; ++j)
            for (int u = 0; u < 3; ++u)
                events.push_back({i, j, u, i < 3 ? 1 : 40});
    CountTensor t(6, 4, 3, events);
    auto part = TriPartition::from_labels({0, 0, 0, 0, 1, 1}, {0, 0, 0, 0},
                                          {0, 0, 0});
    FitState state(t, part, kUnit);
    std::mt19937_64 rng(5);
    CHECK(greedy_sweep(Dim::Row, state, rng, false));
    auto labels = state.partition().row_labels;
    CHECK(labels[3] == labels[4]);
    CHECK(labels[3] == labels[5]);
    CHECK(labels[0] != labels[3]);
}

TEST_CASE("merge pass collapses singletons on flat data") {
    std::mt19937_64 rng(9);
    std::vector<EventRecord> events;
    std::poisson_distribution<std::int64_t> noise(2.0);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int u = 0; u < 4; ++u)
                if (auto c = noise(rng)) events.push_back({i, j, u, c});
    CountTensor t(6, 6, 4, events);

    std::vector<int> all(6), each(4);
    std::iota(all.begin(), all.end(), 0);
    std::iota(each.begin(), each.end(), 0);
    FitState state(t, TriPartition::from_labels(all, all, each), kUnit);
    CHECK(merge_pass(state));
    CHECK(state.partition().n_row_clusters() < 6);

    // post-condition: no remaining pair merge improves
    for (Dim dim : {Dim::Row, Dim::Col, Dim::Time}) {
        int n = state.partition().n_clusters(dim);
        for (int c1 = 0; c1 < n; ++c1)
            for (int c2 = c1 + 1; c2 < n; ++c2)
                CHECK(delta_merge(dim, c1, c2, state.stats(), state.partition(),
                                  kUnit) <= 0.0);
    }
    CHECK(state.resync());
}

TEST_CASE("merge pass on a single block does nothing") {
    CountTensor t(2, 2, 2, std::vector<EventRecord>{{0, 0, 0, 1}});
    FitState state(t, TriPartition::from_labels({0, 0}, {0, 0}, {0, 0}), kUnit);
    CHECK_FALSE(merge_pass(state));
}

TEST_CASE("fit on a degenerate tensor converges immediately") {
    CountTensor t(1, 1, 1, {});
    SearchConfig cfg;
    cfg.restarts = 1;
    FitResult r = fit(t, cfg);
    CHECK(r.partition.n_row_clusters() == 1);
    CHECK(r.partition.n_col_clusters() == 1);
    CHECK(r.partition.n_time_clusters() == 1);
    CHECK(r.icl.total == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("fit on an all-zero tensor collapses to one block") {
    CountTensor t(8, 7, 6, {});
    SearchConfig cfg;
    cfg.restarts = 2;
    cfg.seed = 3;
    FitResult r = multi_restart(t, cfg);
    CHECK(r.partition.n_row_clusters() == 1);
    CHECK(r.partition.n_col_clusters() == 1);
    CHECK(r.partition.n_time_clusters() == 1);
}

TEST_CASE("fit is deterministic and traces increase strictly") {
    std::mt19937_64 rng(17);
    CountTensor t = oracle::random_tensor(rng, 6, 5);
    SearchConfig cfg;
    cfg.seed = 42;
    cfg.init_k = cfg.init_g = cfg.init_d = 3;

    FitResult a = fit(t, cfg);
    FitResult b = fit(t, cfg);
    CHECK(a.partition.row_labels == b.partition.row_labels);
    CHECK(a.partition.col_labels == b.partition.col_labels);
    CHECK(a.partition.time_labels == b.partition.time_labels);
    CHECK(a.icl.total == b.icl.total);

    for (std::size_t i = 1; i < a.trace.size(); ++i)
        CHECK(a.trace[i].second > a.trace[i - 1].second);
    CHECK(a.icl.total >= a.trace.front().second);

    // self-consistency of the returned value
    CHECK(a.icl.total ==
          doctest::Approx(icl_exact(t, a.partition, cfg.hyper).total)
              .epsilon(1e-12));
}

TEST_CASE("multi restart picks the best seed and matches the serial path") {
    std::mt19937_64 rng(19);
    CountTensor t = oracle::random_tensor(rng, 6, 5);
    SearchConfig cfg;
    cfg.seed = 100;
    cfg.restarts = 8;
    cfg.init_k = cfg.init_g = cfg.init_d = 3;

    FitResult best = multi_restart(t, cfg);
    FitResult serial = multi_restart_serial(t, cfg);
    CHECK(best.icl.total == serial.icl.total);
    CHECK(best.restart_index == serial.restart_index);

    double expected = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        SearchConfig one = cfg;
        one.seed = cfg.seed + r;
        expected = std::max(expected, fit(t, one).icl.total);
    }
    CHECK(best.icl.total == doctest::Approx(expected).epsilon(1e-12));

    SearchConfig single = cfg;
    single.restarts = 1;
    CHECK(multi_restart(t, single).icl.total ==
          doctest::Approx(fit(t, single).icl.total).epsilon(1e-12));
}

TEST_CASE("restarts reach the enumerated optimum of a tiny instance") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> count(0, 5);
    std::vector<EventRecord> events;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int u = 0; u < 3; ++u)
                if (auto c = count(rng)) events.push_back({i, j, u, c});
    CountTensor t(3, 3, 3, events);

    double best = enumerate_max_icl(t, 3, kUnit);
    SearchConfig cfg;
    cfg.restarts = 20;
    cfg.init_k = cfg.init_g = cfg.init_d = 2;
    FitResult r = multi_restart(t, cfg);
    CHECK(std::abs(r.icl.total - best) < 1e-9 * std::abs(best));
}

TEST_CASE("fixed cluster counts are honored") {
    std::mt19937_64 rng(25);
    CountTensor t = oracle::random_tensor(rng, 6, 5);
    SearchConfig cfg;
    cfg.init_k = 2;
    cfg.fix_row_clusters = true;
    cfg.restarts = 3;
    FitResult r = multi_restart(t, cfg);
    CHECK(r.partition.n_row_clusters() == std::min(2, t.n_rows()));
}

TEST_CASE("incremental stats stay in sync through moves and merges") {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 20; ++trial) {
        CountTensor t = oracle::random_tensor(rng);
        SearchConfig cfg;
        cfg.seed = trial;
        cfg.init_k = cfg.init_g = cfg.init_d = 3;
        FitResult r = fit(t, cfg);  // fit throws if resync fails
        BlockStats fresh = block_stats(t, r.partition);
        CHECK(fresh.sum() == t.total());
    }
}

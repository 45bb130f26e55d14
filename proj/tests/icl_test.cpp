#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "tlbm/icl.hpp"

using namespace tlbm;

namespace {

const Hyperparams kUnit;  // a=b=1, concentrations 1, delta_t 1

double relative_gap(double x, double y) {
    return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

TEST_CASE("gamma-poisson block term, frozen values") {
    CHECK(log_gp_block(0, 1, kUnit) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(log_gp_block(2, 1, kUnit) ==
          doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-12));
    // S=0: reduces to -a log(1 + dt R / b)
    for (std::int64_t r : {1, 2, 7, 100})
        CHECK(log_gp_block(0, r, kUnit) ==
              doctest::Approx(-std::log(1.0 + double(r))).epsilon(1e-12));
}

TEST_CASE("gamma-poisson block term, dt and R enter via their product") {
    Hyperparams dt2 = kUnit;
    dt2.delta_t = 2.0;
    for (std::int64_t s : {0, 1, 5, 40}) {
        double lhs = log_gp_block(s, 1, dt2);
        double rhs = log_gp_block(s, 2, kUnit) + double(s) * std::log(2.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("gamma-poisson block term, single count increment") {
    // with a=b=1 the term moves by log dt + log(S+1) - log(dt R + 1)
    for (std::int64_t s : {0, 3, 17})
        for (std::int64_t r : {1, 4, 30})
            CHECK(log_gp_block(s + 1, r, kUnit) - log_gp_block(s, r, kUnit) ==
                  doctest::Approx(std::log(double(s + 1)) -
                                  std::log(double(r) + 1.0)).epsilon(1e-12));
}

TEST_CASE("gamma-poisson block term rejects empty blocks") {
    CHECK_THROWS_AS(log_gp_block(0, 0, kUnit), std::invalid_argument);
    CHECK_THROWS_AS(log_gp_block(-1, 1, kUnit), std::invalid_argument);
}

TEST_CASE("dirichlet-multinomial term") {
    for (int n : {1, 4, 9})
        CHECK(log_dirichlet_multinomial(std::vector<int>{n}, 0.7) ==
              doctest::Approx(0.0).epsilon(1e-12));
    CHECK(log_dirichlet_multinomial(std::vector<int>{1, 1}, 1.0) ==
          doctest::Approx(-std::log(6.0)).epsilon(1e-12));
    CHECK(log_dirichlet_multinomial(std::vector<int>{2, 5, 1}, 0.3) ==
          doctest::Approx(log_dirichlet_multinomial(std::vector<int>{5, 1, 2}, 0.3))
              .epsilon(1e-14));
    CHECK_THROWS_AS(log_dirichlet_multinomial(std::vector<int>{}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(log_dirichlet_multinomial(std::vector<int>{1, 0}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("exact ICL on the smallest instance") {
    CountTensor t(1, 1, 1, {});
    auto part = TriPartition::from_labels({0}, {0}, {0});
    IclValue v = icl_exact(t, part, kUnit);
    CHECK(v.likelihood_term == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(v.prior_term == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v.total == doctest::Approx(v.likelihood_term + v.prior_term));
}

TEST_CASE("exact ICL equals the naive oracle") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        CountTensor t = oracle::random_tensor(rng);
        TriPartition part = oracle::random_partition(rng, t);
        double naive = oracle::naive_icl(t, part.row_labels, part.col_labels,
                                         part.time_labels, kUnit);
        IclValue v = icl_exact(t, part, kUnit);
        CHECK(relative_gap(v.total, naive) < 1e-10);
    }
}

TEST_CASE("exact ICL is invariant under cluster relabeling") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        CountTensor t = oracle::random_tensor(rng, 5);
        TriPartition part = oracle::random_partition(rng, t, 3);
        double base = icl_exact(t, part, kUnit).total;

        auto flip = [](std::vector<int> labels) {
            int top = *std::max_element(labels.begin(), labels.end());
            for (int& l : labels) l = top - l;
            return labels;
        };
        TriPartition perm = TriPartition::from_labels(flip(part.row_labels),
                                                      flip(part.col_labels),
                                                      flip(part.time_labels));
        CHECK(icl_exact(t, perm, kUnit).total == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("move delta on the hand instance matches two full evaluations") {
    CountTensor t(2, 2, 2, std::vector<EventRecord>{{0, 0, 0, 3}, {1, 1, 1, 5}});
    auto before = TriPartition::from_labels({0, 1}, {0, 1}, {0, 1});
    BlockStats stats = block_stats(t, before);
    auto profile = row_profile(t, before, 1);
    double delta = delta_move(Dim::Row, 1, 0, stats, profile, before, kUnit);

    auto after = TriPartition::from_labels({0, 0}, {0, 1}, {0, 1});
    double expected =
        icl_exact(t, after, kUnit).total - icl_exact(t, before, kUnit).total;
    CHECK(delta == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("move and merge deltas match full recomputation") {
    std::mt19937_64 rng(31);
    Hyperparams h;
    h.a = 0.8;
    h.b = 1.3;
    h.alpha = 0.5;
    h.delta = 2.0;
    h.gamma = 1.0;
    h.delta_t = 0.7;

    int checked_moves = 0, checked_merges = 0;
    while (checked_moves < 200 || checked_merges < 100) {
        CountTensor t = oracle::random_tensor(rng);
        TriPartition part = oracle::random_partition(rng, t);
        BlockStats stats = block_stats(t, part);
        double before = icl_exact(t, part, h).total;

        for (Dim dim : {Dim::Row, Dim::Col, Dim::Time}) {
            const auto& labels = part.labels(dim);
            int n = static_cast<int>(labels.size());
            int n_clusters = part.n_clusters(dim);
            std::uniform_int_distribution<int> pick(0, n - 1);
            int idx = pick(rng);
            int source = labels[idx];

            // move to every other cluster and to a new one
            auto profile = element_profile(dim, t, part, idx);
            for (int target = -1; target < n_clusters; ++target) {
                if (target == source) continue;
                double delta =
                    delta_move(dim, idx, target, stats, profile, part, h);
                auto moved = part;
                auto& ml = moved.labels(dim);
                auto& ms = moved.sizes(dim);
                if (target == kNewCluster) {
                    if (ms[source] == 1) {
                        CHECK(delta == 0.0);
                        continue;
                    }
                    ml[idx] = n_clusters;
                    ms.push_back(1);
                    --ms[source];
                } else {
                    ml[idx] = target;
                    ++ms[target];
                    if (--ms[source] == 0) {
                        ms.erase(ms.begin() + source);
                        for (int& l : ml)
                            if (l > source) --l;
                    }
                }
                double after = icl_exact(t, moved, h).total;
                CHECK(relative_gap(before + delta, after) < 1e-9);
                ++checked_moves;
            }

            if (n_clusters >= 2) {
                std::uniform_int_distribution<int> cpick(0, n_clusters - 1);
                int c1 = cpick(rng), c2 = cpick(rng);
                if (c1 == c2) c2 = (c2 + 1) % n_clusters;
                double delta = delta_merge(dim, c1, c2, stats, part, h);
                CHECK(delta ==
                      doctest::Approx(delta_merge(dim, c2, c1, stats, part, h))
                          .epsilon(1e-12));
                auto merged = part;
                auto& ml = merged.labels(dim);
                auto& ms = merged.sizes(dim);
                int lo = std::min(c1, c2), hi = std::max(c1, c2);
                for (int& l : ml) {
                    if (l == hi) l = lo;
                    else if (l > hi) --l;
                }
                ms[lo] += ms[hi];
                ms.erase(ms.begin() + hi);
                double after = icl_exact(t, merged, h).total;
                CHECK(relative_gap(before + delta, after) < 1e-9);
                ++checked_merges;
            }
        }
    }
}

TEST_CASE("merging duplicate singleton rows raises the prior term as computed") {
    // two exchangeable rows: merging [1,1] -> [2] moves the row prior by
    // dm([2]) - dm([1,1]) = log 6 with unit concentration
    CountTensor t(2, 1, 1, std::vector<EventRecord>{{0, 0, 0, 2}, {1, 0, 0, 2}});
    auto part = TriPartition::from_labels({0, 1}, {0}, {0});
    BlockStats stats = block_stats(t, part);
    double delta = delta_merge(Dim::Row, 0, 1, stats, part, kUnit);
    auto merged = TriPartition::from_labels({0, 0}, {0}, {0});
    double prior_gain = icl_exact(t, merged, kUnit).prior_term -
                        icl_exact(t, part, kUnit).prior_term;
    CHECK(prior_gain == doctest::Approx(std::log(6.0)).epsilon(1e-12));
    CHECK(delta == doctest::Approx(icl_exact(t, merged, kUnit).total -
                                   icl_exact(t, part, kUnit).total)
                       .epsilon(1e-12));
}

TEST_CASE("delta contract violations") {
    CountTensor t(2, 2, 2, std::vector<EventRecord>{{0, 0, 0, 3}});
    auto part = TriPartition::from_labels({0, 1}, {0, 1}, {0, 1});
    BlockStats stats = block_stats(t, part);
    auto profile = row_profile(t, part, 0);
    CHECK_THROWS_AS(delta_move(Dim::Row, 0, 0, stats, profile, part, kUnit),
                    std::invalid_argument);  // target equals current
    CHECK_THROWS_AS(delta_move(Dim::Row, 0, 5, stats, profile, part, kUnit),
                    std::invalid_argument);
    CHECK_THROWS_AS(delta_move(Dim::Row, 9, 1, stats, profile, part, kUnit),
                    std::invalid_argument);
    CHECK_THROWS_AS(delta_merge(Dim::Row, 1, 1, stats, part, kUnit),
                    std::invalid_argument);
    CHECK_THROWS_AS(delta_merge(Dim::Row, 0, 4, stats, part, kUnit),
                    std::invalid_argument);
}

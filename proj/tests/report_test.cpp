#include <doctest.h>

#include <sstream>

#include "oracle.hpp"
#include "tlbm/report.hpp"

using namespace tlbm;

TEST_CASE("assignments CSV round trip") {
    auto part = TriPartition::from_labels({0, 1, 0, 2}, {1, 0}, {0, 0, 1});
    std::stringstream buf;
    write_assignments_csv(buf, part);
    TriPartition back = read_assignments_csv(buf);
    CHECK(back.row_labels == part.row_labels);
    CHECK(back.col_labels == part.col_labels);
    CHECK(back.time_labels == part.time_labels);

    std::istringstream bad("dim,index,cluster\nrow,1,0\n");
    CHECK_THROWS_AS(read_assignments_csv(bad), std::runtime_error);  // gap at 0
}

TEST_CASE("run report shape") {
    std::mt19937_64 rng(41);
    CountTensor t = oracle::random_tensor(rng, 5, 4);
    SearchConfig cfg;
    cfg.restarts = 2;
    cfg.seed = 3;
    FitResult result = multi_restart(t, cfg);

    auto report = build_run_report(t, cfg, result);
    CHECK(report.at("spec_version") == 1);
    CHECK(report.at("intervals").size() == std::size_t(t.n_intervals()));
    CHECK(report.at("time_cluster_intensity").size() ==
          std::size_t(result.partition.n_time_clusters()));
    CHECK(report.at("icl").at("total").get<double>() ==
          doctest::Approx(result.icl.total));

    // interval totals in the report sum to the tensor total
    std::int64_t sum = 0;
    for (const auto& row : report.at("intervals"))
        sum += row.at("total_count").get<std::int64_t>();
    CHECK(sum == t.total());
}

TEST_CASE("time cluster intensities reflect block rates") {
    // two time clusters with clearly different rates
    std::vector<EventRecord> events;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            events.push_back({i, j, 0, 1});
            events.push_back({i, j, 1, 20});
        }
    CountTensor t(4, 4, 2, events);
    auto part = TriPartition::from_labels({0, 0, 0, 0}, {0, 0, 0, 0}, {0, 1});
    Hyperparams h;
    auto intensity = time_cluster_intensity(t, part, h);
    REQUIRE(intensity.size() == 2);
    CHECK(intensity[1] > intensity[0]);
    // posterior mean (S + a)/(dt R + b) with S=16, R=16, a=b=1
    CHECK(intensity[0] == doctest::Approx(17.0 / 17.0));
    CHECK(intensity[1] == doctest::Approx((16.0 * 20 + 1) / 17.0));
}

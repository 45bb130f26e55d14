// Benchmark: serial versus OpenMP-parallel paths for multi-restart search
// and sufficient-statistic computation.

#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tlbm/search.hpp"
#include "tlbm/simulate.hpp"

using namespace tlbm;

namespace {

double time_once(const auto& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int restarts = argc > 1 ? std::atoi(argv[1]) : 16;

    GenSpec spec;
    spec.n_rows = spec.n_cols = 50;
    spec.n_intervals = 24;
    spec.n_row_clusters = spec.n_col_clusters = spec.n_time_clusters = 3;
    spec.row_props = spec.col_props = spec.time_props = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    spec.lambda = lambda_additive(std::vector<double>{0, 2, 4},
                                  std::vector<double>{0.5, 1, 1.5},
                                  std::vector<double>{0.5, 1, 1.5});
    spec.seed = 1;
    SimulatedData data = sample(spec);
    std::cout << "instance: 50x50x24, total count " << data.tensor.total() << "\n";
#ifdef _OPENMP
    std::cout << "omp threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "built without OpenMP\n";
#endif

    SearchConfig cfg;
    cfg.restarts = restarts;
    cfg.seed = 11;

    FitResult serial_result, parallel_result;
    double t_serial = time_once(
        [&] { serial_result = multi_restart_serial(data.tensor, cfg); });
    double t_parallel =
        time_once([&] { parallel_result = multi_restart(data.tensor, cfg); });
    std::cout << "multi_restart x" << restarts << ": serial " << t_serial
              << "s, parallel " << t_parallel << "s, speedup "
              << t_serial / t_parallel << "\n";
    if (serial_result.icl.total != parallel_result.icl.total ||
        serial_result.restart_index != parallel_result.restart_index) {
        std::cout << "MISMATCH between serial and parallel results\n";
        return 1;
    }

    const int reps = 2000;
    const TriPartition& part = serial_result.partition;
    double t_stats_serial = time_once([&] {
        for (int i = 0; i < reps; ++i) block_stats(data.tensor, part, false);
    });
    double t_stats_parallel = time_once([&] {
        for (int i = 0; i < reps; ++i) block_stats(data.tensor, part, true);
    });
    std::cout << "block_stats x" << reps << ": serial " << t_stats_serial
              << "s, parallel " << t_stats_parallel << "s, speedup "
              << t_stats_serial / t_stats_parallel << "\n";
    if (!(block_stats(data.tensor, part, false) ==
          block_stats(data.tensor, part, true))) {
        std::cout << "MISMATCH between serial and parallel block stats\n";
        return 1;
    }
    return 0;
}

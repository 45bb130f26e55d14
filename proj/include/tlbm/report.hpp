// Fit report assembly: JSON run report, assignments CSV and the per-interval
// summary used for plotting time clusters.
#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tlbm/search.hpp"

namespace tlbm {

// Unweighted average over (k, g) blocks of the posterior mean rate
// (S_kgd + a) / (delta_t * R_kgd + b), one value per time cluster.
std::vector<double> time_cluster_intensity(const CountTensor& tensor,
                                           const TriPartition& part,
                                           const Hyperparams& h);

// Total interaction count per interval.
std::vector<std::int64_t> interval_totals(const CountTensor& tensor);

nlohmann::json build_run_report(const CountTensor& tensor, const SearchConfig& cfg,
                                const FitResult& result);

// dim,index,cluster rows for all three dimensions.
void write_assignments_csv(std::ostream& out, const TriPartition& part);
TriPartition read_assignments_csv(std::istream& in);

// interval,cluster,total_count rows.
void write_intervals_csv(std::ostream& out, const CountTensor& tensor,
                         const TriPartition& part);

}  // namespace tlbm

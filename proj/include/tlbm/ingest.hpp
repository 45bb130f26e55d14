// Contact-log parsing and aggregation into the equal-width interval count
// tensor, plus the on-disk tensor dump format (csv_quad + JSON sidecar).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>

#include "tlbm/core.hpp"

namespace tlbm {

struct RawContact {
    std::int64_t t = 0;  // seconds
    std::string u_id;
    std::string v_id;
};

struct BinningSpec {
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    std::int64_t bin_width = 900;
    std::int64_t record_duration = 20;  // seconds each raw record represents

    int n_bins() const { return static_cast<int>((t_end - t_start) / bin_width); }
    void validate() const;
};

// Entity identifier dictionary in first-appearance order.
struct IdDict {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> index;

    int intern(const std::string& id);
    int size() const { return static_cast<int>(names.size()); }
};

struct ContactLog {
    std::vector<RawContact> records;
    IdDict ids;  // unipartite: one shared dictionary
};

struct QuadLog {
    std::vector<EventRecord> events;
    IdDict row_ids;
    IdDict col_ids;  // aliases row_ids content when unipartite
    int max_interval = -1;
};

// tsv_t_i_j: timestamp<TAB>id<TAB>id, '#' comment lines skipped.
ContactLog parse_tsv_contacts(std::istream& in);

// csv_quad: id,id,interval,count with an optional header line. With
// `unipartite`, both id columns share one dictionary.
QuadLog parse_csv_quad(std::istream& in, bool unipartite);

// Bins raw contacts: a record at time t lands in bin (t - t_start) /
// bin_width; unordered pairs are normalized to (min index, max index) and
// each record contributes one count. Self-pairs and out-of-range timestamps
// are errors.
CountTensor aggregate(std::span<const RawContact> contacts, const IdDict& ids,
                      const BinningSpec& spec);

CountTensor tensor_from_quads(const QuadLog& log, std::optional<int> n_intervals = {});

// Dump: `path` gets the csv_quad body, `path` + ".meta.json" the sidecar
// with dimensions, interval width, id dictionaries and optional true labels.
struct TensorDump {
    CountTensor tensor;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    double delta_t = 1.0;
    std::optional<TriPartition> truth;
};

void write_tensor_dump(const std::string& path, const TensorDump& dump);
TensorDump read_tensor_dump(const std::string& path);

}  // namespace tlbm

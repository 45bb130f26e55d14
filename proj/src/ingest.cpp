#include "tlbm/ingest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tlbm {

namespace {

using nlohmann::json;

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

std::int64_t parse_int(std::string_view field, std::size_t line_no,
                       const char* what) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        fail_line(line_no, std::string("expected integer ") + what + ", got '" +
                               std::string(field) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

}  // namespace

void BinningSpec::validate() const {
    if (bin_width <= 0) throw std::invalid_argument("bin_width must be positive");
    if (t_end <= t_start) throw std::invalid_argument("t_end must exceed t_start");
    if ((t_end - t_start) % bin_width != 0)
        throw std::invalid_argument("time range must be a multiple of bin_width");
}

int IdDict::intern(const std::string& id) {
    auto [it, inserted] = index.try_emplace(id, static_cast<int>(names.size()));
    if (inserted) names.push_back(id);
    return it->second;
}

ContactLog parse_tsv_contacts(std::istream& in) {
    ContactLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v = trim(line);
        if (v.empty() || v.front() == '#') continue;
        auto fields = split(v, '\t');
        if (fields.size() != 3)
            fail_line(line_no, "expected 3 tab-separated fields, got " +
                                   std::to_string(fields.size()));
        RawContact c;
        c.t = parse_int(trim(fields[0]), line_no, "timestamp");
        if (c.t < 0) fail_line(line_no, "negative timestamp");
        c.u_id = std::string(trim(fields[1]));
        c.v_id = std::string(trim(fields[2]));
        if (c.u_id.empty() || c.v_id.empty()) fail_line(line_no, "empty identifier");
        log.ids.intern(c.u_id);
        log.ids.intern(c.v_id);
        log.records.push_back(std::move(c));
    }
    return log;
}

QuadLog parse_csv_quad(std::istream& in, bool unipartite) {
    QuadLog log;
    std::string line;
    std::size_t line_no = 0;
    bool first_data = true;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v = trim(line);
        if (v.empty() || v.front() == '#') continue;
        auto fields = split(v, ',');
        if (fields.size() != 4)
            fail_line(line_no, "expected 4 comma-separated fields, got " +
                                   std::to_string(fields.size()));
        // header-optional: skip the first row if its numeric fields don't parse
        if (first_data) {
            first_data = false;
            std::int64_t probe;
            auto f = trim(fields[2]);
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), probe);
            if (ec != std::errc{} || p != f.data() + f.size()) continue;
        }
        EventRecord e;
        std::string u(trim(fields[0]));
        std::string w(trim(fields[1]));
        if (u.empty() || w.empty()) fail_line(line_no, "empty identifier");
        e.row = log.row_ids.intern(u);
        e.col = unipartite ? log.row_ids.intern(w) : log.col_ids.intern(w);
        e.interval = static_cast<std::int32_t>(
            parse_int(trim(fields[2]), line_no, "interval index"));
        e.count = parse_int(trim(fields[3]), line_no, "count");
        if (e.interval < 0) fail_line(line_no, "negative interval index");
        if (e.count < 0) fail_line(line_no, "negative count");
        log.max_interval = std::max(log.max_interval, int(e.interval));
        log.events.push_back(e);
    }
    if (unipartite) log.col_ids = log.row_ids;
    return log;
}

CountTensor aggregate(std::span<const RawContact> contacts, const IdDict& ids,
                      const BinningSpec& spec) {
    spec.validate();
    int n_bins = spec.n_bins();
    std::vector<EventRecord> events;
    events.reserve(contacts.size());
    for (const RawContact& c : contacts) {
        if (c.t < spec.t_start || c.t >= spec.t_end)
            throw std::runtime_error("contact (" + c.u_id + ", " + c.v_id + ") at t=" +
                                     std::to_string(c.t) + " outside [t_start, t_end)");
        int i = ids.index.at(c.u_id);
        int j = ids.index.at(c.v_id);
        if (i == j)
            throw std::runtime_error("self-contact for id '" + c.u_id + "' at t=" +
                                     std::to_string(c.t));
        if (i > j) std::swap(i, j);  // unordered pair
        int bin = static_cast<int>((c.t - spec.t_start) / spec.bin_width);
        events.push_back({i, j, bin, 1});
    }
    int n = ids.size();
    if (n == 0) throw std::runtime_error("no entities in contact log");
    (void)n_bins;
    return CountTensor(n, n, n_bins, events);
}

CountTensor tensor_from_quads(const QuadLog& log, std::optional<int> n_intervals) {
    int u = n_intervals.value_or(log.max_interval + 1);
    if (u <= 0) throw std::runtime_error("tensor has no intervals");
    return CountTensor(std::max(1, log.row_ids.size()),
                       std::max(1, log.col_ids.size()), u, log.events);
}

void write_tensor_dump(const std::string& path, const TensorDump& dump) {
    const CountTensor& t = dump.tensor;
    {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
        for (const EventRecord& e : t.entries())
            out << dump.row_ids.at(e.row) << ',' << dump.col_ids.at(e.col) << ','
                << e.interval << ',' << e.count << '\n';
        if (!out) throw std::runtime_error("write failed for '" + path + "'");
    }
    json meta;
    meta["spec_version"] = 1;
    meta["n_rows"] = t.n_rows();
    meta["n_cols"] = t.n_cols();
    meta["n_intervals"] = t.n_intervals();
    meta["delta_t"] = dump.delta_t;
    meta["row_ids"] = dump.row_ids;
    meta["col_ids"] = dump.col_ids;
    if (dump.truth) {
        meta["true_labels"]["row"] = dump.truth->row_labels;
        meta["true_labels"]["col"] = dump.truth->col_labels;
        meta["true_labels"]["time"] = dump.truth->time_labels;
    }
    std::ofstream out(path + ".meta.json");
    if (!out) throw std::runtime_error("cannot write sidecar for '" + path + "'");
    out << meta.dump(2) << '\n';
}

TensorDump read_tensor_dump(const std::string& path) {
    std::ifstream meta_in(path + ".meta.json");
    if (!meta_in)
        throw std::runtime_error("missing sidecar '" + path + ".meta.json'");
    json meta = json::parse(meta_in);

    std::vector<std::string> row_ids = meta.at("row_ids");
    std::vector<std::string> col_ids = meta.at("col_ids");
    IdDict rows, cols;
    for (const auto& id : row_ids) rows.intern(id);
    for (const auto& id : col_ids) cols.intern(id);

    std::ifstream body(path);
    if (!body) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<EventRecord> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(body, line)) {
        ++line_no;
        std::string_view v = trim(line);
        if (v.empty() || v.front() == '#') continue;
        auto fields = split(v, ',');
        if (fields.size() != 4) fail_line(line_no, "expected 4 fields");
        EventRecord e;
        auto ri = rows.index.find(std::string(trim(fields[0])));
        auto ci = cols.index.find(std::string(trim(fields[1])));
        if (ri == rows.index.end() || ci == cols.index.end())
            fail_line(line_no, "identifier not present in sidecar");
        e.row = ri->second;
        e.col = ci->second;
        e.interval = static_cast<std::int32_t>(parse_int(trim(fields[2]), line_no,
                                                         "interval index"));
        e.count = parse_int(trim(fields[3]), line_no, "count");
        events.push_back(e);
    }

    TensorDump dump{CountTensor(meta.at("n_rows"), meta.at("n_cols"),
                                meta.at("n_intervals"), events),
                    std::move(row_ids), std::move(col_ids),
                    meta.value("delta_t", 1.0), std::nullopt};
    if (meta.contains("true_labels")) {
        const auto& tl = meta.at("true_labels");
        dump.truth = TriPartition::from_labels(tl.at("row"), tl.at("col"),
                                               tl.at("time"));
    }
    return dump;
}

}  // namespace tlbm

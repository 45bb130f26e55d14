// Command-line front end: fit, simulate, evaluate.
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 numerical failure.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tlbm/ingest.hpp"
#include "tlbm/report.hpp"
#include "tlbm/search.hpp"
#include "tlbm/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct FitOptions {
    std::string input;
    std::string format = "csv_quad";  // tsv_t_i_j | csv_quad | dump
    bool unipartite = false;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    std::int64_t bin_width = 900;
    std::int64_t record_duration = 20;
    int fix_k = 0, fix_g = 0, fix_d = 0;
    std::string out = "fit";
    tlbm::SearchConfig cfg;
};

tlbm::TensorDump load_input(const FitOptions& opt) {
    if (opt.format == "dump") return tlbm::read_tensor_dump(opt.input);

    std::ifstream in(opt.input);
    if (!in) throw std::runtime_error("cannot open '" + opt.input + "'");
    if (opt.format == "tsv_t_i_j") {
        tlbm::ContactLog log = tlbm::parse_tsv_contacts(in);
        tlbm::BinningSpec bins{opt.t_start, opt.t_end, opt.bin_width,
                               opt.record_duration};
        if (bins.t_end == 0) {
            // infer a full range of whole bins covering the data
            for (const auto& r : log.records)
                bins.t_end = std::max(bins.t_end, r.t + 1);
            bins.t_end = bins.t_start +
                         ((bins.t_end - bins.t_start + bins.bin_width - 1) /
                          bins.bin_width) * bins.bin_width;
        }
        tlbm::CountTensor tensor = tlbm::aggregate(log.records, log.ids, bins);
        return {std::move(tensor), log.ids.names, log.ids.names, 1.0, std::nullopt};
    }
    if (opt.format == "csv_quad") {
        tlbm::QuadLog log = tlbm::parse_csv_quad(in, opt.unipartite);
        tlbm::CountTensor tensor = tlbm::tensor_from_quads(log);
        return {std::move(tensor), log.row_ids.names, log.col_ids.names, 1.0,
                std::nullopt};
    }
    throw std::runtime_error("unknown input format '" + opt.format + "'");
}

int cmd_fit(FitOptions& opt) {
    tlbm::TensorDump dump = load_input(opt);
    const tlbm::CountTensor& tensor = dump.tensor;

    tlbm::SearchConfig& cfg = opt.cfg;
    if (cfg.hyper.delta_t == 0.0) cfg.hyper.delta_t = dump.delta_t;
    if (opt.fix_k > 0) {
        cfg.init_k = opt.fix_k;
        cfg.fix_row_clusters = true;
    }
    if (opt.fix_g > 0) {
        cfg.init_g = opt.fix_g;
        cfg.fix_col_clusters = true;
    }
    if (opt.fix_d > 0) {
        cfg.init_d = opt.fix_d;
        cfg.fix_time_clusters = true;
    }
    cfg.clamp_to(tensor);

    tlbm::FitResult result = tlbm::multi_restart(tensor, cfg);
    if (!std::isfinite(result.icl.total)) {
        std::cerr << "error: non-finite ICL\n";
        return kExitNumerical;
    }

    {
        std::ofstream out(opt.out + ".json");
        if (!out) throw std::runtime_error("cannot write '" + opt.out + ".json'");
        out << tlbm::build_run_report(tensor, cfg, result).dump(2) << '\n';
    }
    {
        std::ofstream out(opt.out + ".assignments.csv");
        tlbm::write_assignments_csv(out, result.partition);
    }
    {
        std::ofstream out(opt.out + ".intervals.csv");
        tlbm::write_intervals_csv(out, tensor, result.partition);
    }

    std::cout << "ICL " << std::setprecision(12) << result.icl.total << " clusters "
              << result.partition.n_row_clusters() << 'x'
              << result.partition.n_col_clusters() << 'x'
              << result.partition.n_time_clusters() << " restart "
              << result.restart_index << '\n';
    return kExitOk;
}

int cmd_simulate(const std::string& spec_path, const std::string& out_path,
                 std::int64_t seed_override) {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot open '" + spec_path + "'");
    tlbm::GenSpec spec = tlbm::parse_gen_spec(in);
    if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);

    tlbm::SimulatedData data = tlbm::sample(spec);
    std::vector<std::string> row_ids(spec.n_rows), col_ids(spec.n_cols);
    for (int i = 0; i < spec.n_rows; ++i) row_ids[i] = "a" + std::to_string(i);
    for (int j = 0; j < spec.n_cols; ++j) col_ids[j] = "b" + std::to_string(j);
    tlbm::TensorDump dump{std::move(data.tensor), std::move(row_ids),
                          std::move(col_ids), spec.delta_t, std::move(data.truth)};
    tlbm::write_tensor_dump(out_path, dump);
    std::cout << "wrote " << dump.tensor.n_rows() << 'x' << dump.tensor.n_cols()
              << 'x' << dump.tensor.n_intervals() << " tensor, total "
              << dump.tensor.total() << '\n';
    return kExitOk;
}

int cmd_evaluate(const std::string& input, const std::string& fitted_path,
                 const tlbm::Hyperparams& hyper) {
    tlbm::TensorDump dump = tlbm::read_tensor_dump(input);
    if (!dump.truth)
        throw std::runtime_error("sidecar of '" + input + "' carries no true labels");
    std::ifstream fin(fitted_path);
    if (!fin) throw std::runtime_error("cannot open '" + fitted_path + "'");
    tlbm::TriPartition fitted = tlbm::read_assignments_csv(fin);
    fitted.check_compatible(dump.tensor);
    dump.truth->check_compatible(dump.tensor);

    tlbm::Hyperparams h = hyper;
    if (h.delta_t == 0.0) h.delta_t = dump.delta_t;
    double ari_row = tlbm::adjusted_rand_index(fitted.row_labels,
                                               dump.truth->row_labels);
    double ari_col = tlbm::adjusted_rand_index(fitted.col_labels,
                                               dump.truth->col_labels);
    double ari_time = tlbm::adjusted_rand_index(fitted.time_labels,
                                                dump.truth->time_labels);
    double icl_truth = tlbm::icl_exact(dump.tensor, *dump.truth, h).total;
    double icl_fitted = tlbm::icl_exact(dump.tensor, fitted, h).total;

    std::cout << std::setprecision(12) << "ARI row " << ari_row << " col " << ari_col
              << " time " << ari_time << '\n'
              << "ICL truth " << icl_truth << " fitted " << icl_fitted
              << " gap(truth-fitted) " << icl_truth - icl_fitted << '\n';
    return kExitOk;
}

void add_hyper_flags(CLI::App* app, tlbm::Hyperparams& h) {
    app->add_option("--a", h.a, "Gamma shape");
    app->add_option("--b", h.b, "Gamma rate");
    app->add_option("--alpha", h.alpha, "Dirichlet concentration, rows");
    app->add_option("--delta", h.delta, "Dirichlet concentration, columns");
    app->add_option("--gamma", h.gamma, "Dirichlet concentration, intervals");
    app->add_option("--delta-t", h.delta_t,
                    "interval width (0 = take from input metadata)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal latent block model: co-clustering by exact greedy "
                 "ICL maximization"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    fit_opt.cfg.hyper.delta_t = 0.0;  // take from input metadata by default
    CLI::App* fit = app.add_subcommand("fit", "fit the model to a count tensor");
    fit->add_option("--input", fit_opt.input, "input file")->required();
    fit->add_option("--format", fit_opt.format,
                    "input format: tsv_t_i_j | csv_quad | dump");
    fit->add_flag("--unipartite", fit_opt.unipartite,
                  "csv_quad ids share one dictionary");
    fit->add_option("--t-start", fit_opt.t_start, "tsv: start of time range (s)");
    fit->add_option("--t-end", fit_opt.t_end, "tsv: end of time range (s)");
    fit->add_option("--bin-width", fit_opt.bin_width, "tsv: bin width (s)");
    fit->add_option("--record-duration", fit_opt.record_duration,
                    "tsv: seconds per raw record");
    fit->add_option("--init-k", fit_opt.cfg.init_k, "initial row clusters");
    fit->add_option("--init-g", fit_opt.cfg.init_g, "initial column clusters");
    fit->add_option("--init-d", fit_opt.cfg.init_d, "initial time clusters");
    fit->add_option("--fix-k", fit_opt.fix_k, "fix the row cluster count");
    fit->add_option("--fix-g", fit_opt.fix_g, "fix the column cluster count");
    fit->add_option("--fix-d", fit_opt.fix_d, "fix the time cluster count");
    fit->add_option("--restarts", fit_opt.cfg.restarts, "number of restarts");
    fit->add_option("--max-sweeps", fit_opt.cfg.max_sweeps, "sweep round limit");
    fit->add_option("--seed", fit_opt.cfg.seed, "base random seed");
    fit->add_option("--threads", fit_opt.cfg.threads,
                    "restart threads (0 = all, 1 = serial)");
    fit->add_option("--out", fit_opt.out, "output path prefix");
    add_hyper_flags(fit, fit_opt.cfg.hyper);

    std::string sim_spec, sim_out = "sim";
    std::int64_t sim_seed = -1;
    CLI::App* sim = app.add_subcommand("simulate", "sample from the model");
    sim->add_option("--spec", sim_spec, "generator spec JSON")->required();
    sim->add_option("--out", sim_out, "output tensor dump path");
    sim->add_option("--seed", sim_seed, "override the spec seed");

    std::string eval_input, eval_fitted;
    tlbm::Hyperparams eval_hyper;
    eval_hyper.delta_t = 0.0;
    CLI::App* eval = app.add_subcommand("evaluate",
                                        "score fitted labels against truth");
    eval->add_option("--input", eval_input, "tensor dump with truth sidecar")
        ->required();
    eval->add_option("--fitted", eval_fitted, "fitted assignments CSV")->required();
    add_hyper_flags(eval, eval_hyper);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_opt);
        if (sim->parsed()) return cmd_simulate(sim_spec, sim_out, sim_seed);
        if (eval->parsed()) return cmd_evaluate(eval_input, eval_fitted, eval_hyper);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitUsage;
}

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "superad/harness.hpp"

using namespace superad;
namespace fs = std::filesystem;

namespace {

RunConfig load_config(const std::string& path) {
    if (path.empty()) throw CLI::ValidationError("--config", "a config file is required");
    return RunConfig::parse_file(path);
}

std::vector<int> parse_n_range(const std::string& text) {
    auto dots = text.find("..");
    std::vector<int> out;
    if (dots == std::string::npos) {
        out.push_back(std::stoi(text));
        return out;
    }
    int lo = std::stoi(text.substr(0, dots));
    int hi = std::stoi(text.substr(dots + 2));
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"superadiabatic transition toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", n_range = "0..5";
    int threads = 2;
    int n_max = 8;
    bool inject_fault = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config) cmd->add_option("--config", config_path, "run configuration file");
        cmd->add_option("--out", out_dir, "output directory or file");
        cmd->add_option("--threads", threads, "worker threads");
    };

    auto* c_sim = app.add_subcommand("simulate", "evolve the two-level equation, emit spectra");
    add_common(c_sim, true);
    auto* c_formula = app.add_subcommand("formula", "closed transmitted-packet formula");
    add_common(c_formula, true);
    auto* c_hist = app.add_subcommand("history", "transition histories per representation");
    add_common(c_hist, true);
    c_hist->add_option("--n", n_range, "representation range, e.g. 0..5");
    auto* c_opt = app.add_subcommand("optimal-n", "stationary pair and optimal n as JSON");
    add_common(c_opt, true);
    auto* c_sweep = app.add_subcommand("sweep", "formula-vs-numeric comparison sweep");
    add_common(c_sweep, true);
    auto* c_table = app.add_subcommand("recursion-table", "emit x,y,z,w coefficient tables");
    add_common(c_table, true);
    c_table->add_option("--n-max", n_max, "highest superadiabatic order");
    auto* c_verify = app.add_subcommand("verify", "run every invariant suite, emit JSON");
    add_common(c_verify, false);
    c_verify->add_flag("--inject-recursion-fault", inject_fault,
                       "test hook: corrupt the recursion seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) {
            RunConfig cfg = load_config(config_path);
            std::vector<int> ns;
            for (double v : cfg.num_list("run.history_ns")) ns.push_back(static_cast<int>(v));
            if (ns.empty()) ns = {0};
            SimulateResult res = run_simulate(cfg, ns);
            fs::path dir(out_dir);
            for (size_t i = 0; i < res.snapshots.size(); ++i) {
                fs::path name = (i + 1 == res.snapshots.size())
                                    ? dir / "spectrum.csv"
                                    : dir / ("spectrum_" + std::to_string(i) + ".csv");
                write_spectrum_csv(name, res.snapshots[i].up_hat, res.snapshots[i].down_hat);
            }
            for (const auto& h : res.histories)
                write_history_csv(dir / ("history_n" + std::to_string(int(h.n)) + ".csv"), h);
            write_manifest(dir / "manifest.json", cfg, nullptr);
            std::cout << "t0 " << res.t0 << " dt " << res.dt << " final_lower_norm "
                      << res.histories.front().samples.back().second << "\n";
            return 0;
        }
        if (c_formula->parsed()) {
            RunConfig cfg = load_config(config_path);
            DiabaticModel model = cfg.model();
            auto g = cfg.grid();
            GridFunction packet = packet_momentum(cfg.packet(), g);
            TransitionParams par =
                TransitionParams::from_model(model, cfg.epsilon(), cfg.num("run.t_report", 0.0));
            par.support_indicator = cfg.integer("formula.support_indicator", 1) != 0;
            TransitionResult res = formula_transmitted(packet, par);
            fs::path out(out_dir);
            if (out.extension() != ".csv") out /= "spectrum.csv";
            write_formula_csv(out, res.psi_minus_hat);
            std::cout << "l2_norm " << res.l2_norm << " peak_k " << res.peak_k << "\n";
            for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
            return 0;
        }
        if (c_hist->parsed()) {
            RunConfig cfg = load_config(config_path);
            std::vector<int> ns = parse_n_range(n_range);
            HistoriesResult res = run_histories(cfg, ns.front(), ns.back());
            fs::path dir(out_dir);
            for (const auto& curve : res.curves)
                write_history_csv(dir / ("history_n" + std::to_string(int(curve.n)) + ".csv"),
                                  curve);
            write_history_csv(dir / "history_model.csv", res.erf_overlay);
            write_manifest(dir / "manifest.json", cfg, nullptr);
            std::cout << "n_star " << res.optimum.n_star << " (rounded "
                      << res.n_star_rounded << ")\n";
            return 0;
        }
        if (c_opt->parsed()) {
            RunConfig cfg = load_config(config_path);
            OptimalRepresentation o =
                optimal_representation(cfg.num("packet.p0"), cfg.num("packet.sigma2"),
                                       cfg.model(), cfg.epsilon());
            std::cout << "{\"eta_star\": " << o.eta_star << ", \"k_star\": " << o.k_star
                      << ", \"n_star\": " << o.n_star << "}\n";
            return 0;
        }
        if (c_sweep->parsed()) {
            RunConfig cfg = load_config(config_path);
            std::vector<double> eps_list = cfg.num_list("sweep.epsilons");
            if (eps_list.empty()) eps_list = {cfg.epsilon()};
            std::vector<double> p0_list = cfg.num_list("sweep.p0s");
            if (p0_list.empty()) p0_list = {cfg.num("packet.p0", 5.0)};
            std::vector<SweepPoint> pts;
            for (double p0 : p0_list)
                for (double e : eps_list) pts.push_back({e, p0});
            std::vector<ComparisonRecord> recs = run_sweep(cfg, pts, threads);
            fs::path dir(out_dir);
            write_records_csv(dir / "sweep.csv", recs);
            write_manifest(dir / "manifest.json", cfg, recs.empty() ? nullptr : &recs.front());
            bool ok = true;
            for (const auto& r : recs) {
                std::cout << "eps " << r.epsilon << " p0 " << r.p0 << " rel_l2 " << r.rel_l2_error
                          << " self " << r.solver_self_error << (r.gate_passed ? "" : " [rejected]")
                          << "\n";
                ok = ok && r.gate_passed;
            }
            return ok ? 0 : 2;
        }
        if (c_table->parsed()) {
            RunConfig cfg = load_config(config_path);
            DiabaticModel model = cfg.model();
            auto g = Grid1D::make(cfg.num("grid.x_min", -40.0), cfg.num("grid.x_max", 40.0),
                                  static_cast<int>(cfg.integer("grid.n", 1 << 12)),
                                  cfg.num("run.epsilon", 1.0));
            CoefficientTable t = coefficient_tables(model, g, n_max);
            fs::path out(out_dir);
            if (out.extension() != ".csv") out /= "table.csv";
            write_recursion_table_csv(out, t);
            std::cout << "n_max " << t.n_max() << " integration_residual "
                      << t.integration_residual() << "\n";
            return 0;
        }
        if (c_verify->parsed()) {
            VerifyOptions vopt;
            vopt.inject_recursion_fault = inject_fault;
            VerifyReport rep = run_verify(vopt);
            std::string json = rep.to_json();
            fs::path out(out_dir);
            if (out.extension() != ".json") out /= "verify.json";
            std::ofstream f(out);
            f << json;
            std::cout << json;
            return rep.all_passed() ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}

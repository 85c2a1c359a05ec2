#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "superad/transition.hpp"

namespace superad {

// Flat key = value configuration with dotted sections; '#' starts a comment.
class RunConfig {
  public:
    static RunConfig parse_file(const std::filesystem::path& p);
    static RunConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    double num(const std::string& key) const;
    double num(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    std::vector<double> num_list(const std::string& key) const;  // comma separated

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    DiabaticModel model() const;
    GridPtr grid() const;  // uses run.epsilon
    PacketSpec packet() const;
    double epsilon() const;

    std::string canonical_text() const;  // sorted key=value lines
    std::uint64_t hash() const;          // FNV-1a of the canonical text

  private:
    std::map<std::string, std::string> kv_;
};

struct ComparisonRecord {
    double epsilon = 0;
    double p0 = 0;
    double norm_formula = 0;
    double norm_numeric = 0;
    double rel_l2_error = 0;
    double solver_self_error = 0;
    double wall_time_s = 0;
    // provenance
    double dt = 0;
    double t0 = 0;
    int grid_n = 0;
    bool gate_passed = false;
    bool plateau_ok = false;
    std::string note;
};

struct PointOptions {
    double dt0 = 0;           // 0: eps/40
    int max_halvings = 6;
    bool grid_refinement_check = true;
    double t0_override = 0;   // 0: contamination-budgeted rule
    double contamination_budget = 1e-5;
};

// t0 < 0 from the packet width, crossing clearance and the band-dressing
// contamination budget.
double incoming_time(const DiabaticModel& model, const PacketSpec& spec, const GridPtr& g,
                     double budget = 1e-5);

// One formula-vs-numeric comparison with the dt-halving gate and optional
// grid-doubling check.
ComparisonRecord compare_point(const DiabaticModel& model, const GridPtr& grid,
                               const PacketSpec& spec, const PointOptions& opt = {});

struct SweepPoint {
    double epsilon;
    double p0;
};

std::vector<ComparisonRecord> run_sweep(const RunConfig& base, const std::vector<SweepPoint>& pts,
                                        int threads, const PointOptions& opt = {});

struct HistoriesResult {
    std::vector<HistoryCurve> curves;  // numeric, one per requested n
    OptimalRepresentation optimum;
    int n_star_rounded = 0;
    std::vector<std::pair<double, double>> erf_overlay;  // at n = round(n*)
    double t0 = 0;
    double dt = 0;
};

HistoriesResult run_histories(const RunConfig& cfg, int n_min, int n_max);

struct SpectrumResult {
    GridPtr grid;
    GridFunction upper_hat, lower_hat;  // numeric at t_final
    TransitionResult formula;
    ComparisonRecord record;
};

SpectrumResult run_spectrum(const RunConfig& cfg, const PointOptions& opt = {});

// Plain evolution with diabatic spectrum snapshots at the requested times
// and norm histories for the requested representations.
struct SimulateResult {
    struct Snapshot {
        double t;
        GridFunction up_hat, down_hat;
    };
    std::vector<Snapshot> snapshots;
    std::vector<HistoryCurve> histories;
    double t0 = 0, dt = 0;
};

SimulateResult run_simulate(const RunConfig& cfg, const std::vector<int>& history_ns);

// ---- verify ----

struct SuiteResult {
    std::string name;
    bool passed = false;
    double wall_time_s = 0;
    std::string details;
};

struct VerifyOptions {
    bool inject_recursion_fault = false;
    bool quick = false;  // smaller grids/orders for smoke use
};

struct VerifyReport {
    std::vector<SuiteResult> suites;
    bool all_passed() const;
    std::string to_json() const;
};

VerifyReport run_verify(const VerifyOptions& opt = {});

// ---- output helpers ----

void write_spectrum_csv(const std::filesystem::path& path, const GridFunction& up_hat,
                        const GridFunction& down_hat);
void write_formula_csv(const std::filesystem::path& path, const GridFunction& psi_hat);
void write_history_csv(const std::filesystem::path& path, const HistoryCurve& curve);
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<std::pair<double, double>>& samples);
void write_records_csv(const std::filesystem::path& path,
                       const std::vector<ComparisonRecord>& records);
void write_recursion_table_csv(const std::filesystem::path& path, const CoefficientTable& table);
void write_manifest(const std::filesystem::path& path, const RunConfig& cfg,
                    const ComparisonRecord* record);

}  // namespace superad

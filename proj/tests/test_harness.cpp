#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "superad/harness.hpp"

using namespace superad;

namespace {

const char* kCheapConfig =
    "model.kind = sech\n"
    "model.c = -1.0471975511965976\n"
    "model.alpha = 1.5707963267948966\n"
    "model.delta = 0.5\n"
    "run.epsilon = 0.2\n"
    "grid.n = 4096\n"
    "grid.x_min = -40\n"
    "grid.x_max = 40\n"
    "packet.shape = gaussian\n"
    "packet.p0 = 2\n"
    "packet.sigma2 = 2\n";

}  // namespace

TEST_CASE("config parsing") {
    RunConfig cfg = RunConfig::parse_string(
        "# comment\n"
        "model.kind = \"sech\"\n"
        "[grid]\n"
        "n = 1024   # inline comment\n"
        "x_min = -30\n"
        "[run]\n"
        "epsilon = 0.05\n"
        "list = 1, 2.5, 3\n");
    CHECK(cfg.str("model.kind", "") == "sech");
    CHECK(cfg.integer("grid.n", 0) == 1024);
    CHECK(cfg.num("grid.x_min") == -30.0);
    CHECK(cfg.epsilon() == 0.05);
    auto lst = cfg.num_list("run.list");
    REQUIRE(lst.size() == 3);
    CHECK(lst[1] == 2.5);
    CHECK_THROWS(RunConfig::parse_string("no equals sign here\n"));
    CHECK_THROWS(cfg.num("missing.key"));

    RunConfig c2 = RunConfig::parse_string(cfg.canonical_text());
    CHECK(c2.hash() == cfg.hash());
}

TEST_CASE("incoming time rule clears the crossing") {
    RunConfig cfg = RunConfig::parse_string(kCheapConfig);
    DiabaticModel model = cfg.model();
    auto g = cfg.grid();
    PacketSpec spec = cfg.packet();
    double t0 = incoming_time(model, spec, g);
    CHECK(t0 < 0);
    CHECK(-t0 * spec.p0 >= 6.0 * model.poles().q_c);  // crossing clearance floor
    // smaller epsilon needs more distance (contamination budget)
    PacketSpec tighter = spec;
    tighter.epsilon = 0.05;
    auto g2 = Grid1D::make(-40, 40, 4096, 0.05);
    CHECK(-incoming_time(model, tighter, g2) > -t0);
}

TEST_CASE("comparison point passes the gate on the cheap parameter set") {
    RunConfig cfg = RunConfig::parse_string(kCheapConfig);
    PointOptions opt;
    opt.grid_refinement_check = true;
    ComparisonRecord rec = compare_point(cfg.model(), cfg.grid(), cfg.packet(), opt);
    CHECK(rec.gate_passed);
    CHECK(rec.plateau_ok);
    CHECK(rec.solver_self_error <= rec.rel_l2_error / 10.0);
    CHECK(rec.rel_l2_error < 0.05);                       // paper: still below 0.03 at eps = 1/5
    CHECK(rec.norm_numeric == doctest::Approx(0.11).epsilon(0.10));
    CHECK(rec.norm_formula == doctest::Approx(0.115754).epsilon(2e-3));
}

TEST_CASE("simulate records spectra and adiabatic history") {
    RunConfig cfg = RunConfig::parse_string(kCheapConfig);
    cfg.set("run.history_stride", "50");
    SimulateResult res = run_simulate(cfg, {0});
    REQUIRE(!res.histories.empty());
    const auto& h = res.histories.front();
    REQUIRE(h.samples.size() > 5);
    // monotone time axis, plateau at the end
    for (size_t i = 1; i < h.samples.size(); ++i) CHECK(h.samples[i].first > h.samples[i - 1].first);
    CHECK(h.samples.front().second < 1e-3);
    CHECK(h.samples.back().second == doctest::Approx(0.11).epsilon(0.15));
    REQUIRE(!res.snapshots.empty());
    CHECK(res.snapshots.back().t == doctest::Approx(-res.t0).epsilon(1e-9));
}

TEST_CASE("csv output is deterministic") {
    RunConfig cfg = RunConfig::parse_string(kCheapConfig);
    PointOptions opt;
    opt.grid_refinement_check = false;
    opt.max_halvings = 0;
    std::vector<ComparisonRecord> recs = {compare_point(cfg.model(), cfg.grid(), cfg.packet(), opt)};
    recs[0].wall_time_s = 0;  // wall time is the one legitimately varying field
    auto tmp1 = std::filesystem::temp_directory_path() / "superad_rec1.csv";
    auto tmp2 = std::filesystem::temp_directory_path() / "superad_rec2.csv";
    write_records_csv(tmp1, recs);
    write_records_csv(tmp2, recs);
    std::ifstream f1(tmp1), f2(tmp2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("nan") == std::string::npos);
}

TEST_CASE("verify: quick suites pass, injected fault is caught") {
    VerifyOptions opt;
    opt.quick = true;
    VerifyReport rep = run_verify(opt);
    for (const auto& s : rep.suites) {
        INFO(s.name, ": ", s.details);
        CHECK(s.passed);
        CHECK(s.wall_time_s >= 0);
    }
    CHECK(rep.all_passed());
    std::string json = rep.to_json();
    CHECK(json.find("\"all_passed\": true") != std::string::npos);

    VerifyOptions bad;
    bad.quick = true;
    bad.inject_recursion_fault = true;
    VerifyReport rep2 = run_verify(bad);
    CHECK(!rep2.all_passed());
    bool zero_suite_failed = false;
    for (const auto& s : rep2.suites)
        if (s.name == "superadiabatic.zero_structure" && !s.passed) zero_suite_failed = true;
    CHECK(zero_suite_failed);
}

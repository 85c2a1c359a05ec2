#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "superad/dynamics.hpp"
#include "superad/fourier.hpp"

using namespace superad;

namespace {
const auto model = DiabaticModel::sech_theta(-M_PI / 3, M_PI / 2, 0.5);
}

TEST_CASE("packet construction") {
    double eps = 0.1;
    auto g = Grid1D::make(-40, 40, 1 << 12, eps);
    PacketSpec spec{PacketSpec::Shape::Gaussian, 5.0, 2.0, eps};
    GridFunction hat = packet_momentum(spec, g);
    CHECK(hat.norm() == doctest::Approx(1.0).epsilon(1e-13));
    // (2 pi eps)^{-1/4} e^{-(k-p0)^2/(4 eps)} is the sigma^2 = 2 member
    int jp = 0;
    for (int j = 0; j < g->n; ++j)
        if (std::abs(g->k(j) - 5.0) < std::abs(g->k(jp) - 5.0)) jp = j;
    double expect = std::pow(2 * M_PI * eps, -0.25) *
                    std::exp(-std::pow(g->k(jp) - 5.0, 2) / (4 * eps));
    CHECK(std::abs(hat.v[jp]) == doctest::Approx(expect).epsilon(1e-10));

    PacketSpec sext{PacketSpec::Shape::Sextic, 5.0, 2.0, eps};
    GridFunction shat = packet_momentum(sext, g);
    CHECK(shat.norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("free band propagation") {
    double eps = 0.1;
    auto g = Grid1D::make(-40, 40, 1 << 11, eps);
    PacketSpec spec{PacketSpec::Shape::Gaussian, 3.0, 2.0, eps};
    GridFunction hat = packet_momentum(spec, g);

    GridFunction id = free_band_propagate(hat, 0.0, +1, model);
    CHECK(l2_distance(id, hat) == 0.0);
    CHECK(free_band_propagate(hat, 3.7, -1, model).norm() ==
          doctest::Approx(hat.norm()).epsilon(1e-14));
    GridFunction ab = free_band_propagate(free_band_propagate(hat, 1.3, +1, model), 0.9, +1, model);
    GridFunction c = free_band_propagate(hat, 2.2, +1, model);
    CHECK(l2_distance(ab, c) < 1e-13);
}

TEST_CASE("incoming state preparation") {
    double eps = 0.1;
    auto g = Grid1D::make(-60, 60, 1 << 13, eps);
    PacketSpec spec{PacketSpec::Shape::Gaussian, 5.0, 2.0, eps};

    // t0 = 0: upper band amplitude is exactly the packet
    TwoLevelState s0 = prepare_incoming(spec, model, g, 0.0);
    GridFunction up_hat = scaled_fourier(adiabatic_upper_amplitude(s0, model));
    CHECK(l2_distance(up_hat, packet_momentum(spec, g)) < 1e-12);
    CHECK(adiabatic_lower_amplitude(s0, model).norm() < 1e-14);
    CHECK(s0.norm() == doctest::Approx(1.0).epsilon(1e-12));

    // inverse property: forward free evolution recovers the packet
    double t0 = -1.5;
    TwoLevelState st = prepare_incoming(spec, model, g, t0);
    GridFunction up_t0 = scaled_fourier(adiabatic_upper_amplitude(st, model));
    GridFunction back = free_band_propagate(up_t0, -t0, +1, model);
    CHECK(l2_distance(back, packet_momentum(spec, g)) < 1e-12);

    // overlap guard
    CHECK_THROWS(prepare_incoming(spec, model, g, -1e-3));
}

TEST_CASE("strang splitting exact for decoupled diagonal potential") {
    auto free_model = DiabaticModel::sech_theta(0.0, 1.0, 1.0);
    double eps = 0.1;
    auto g = Grid1D::make(-40, 40, 1 << 11, eps);
    PacketSpec spec{PacketSpec::Shape::Gaussian, 2.0, 2.0, eps};
    TwoLevelState s0 = prepare_incoming(spec, free_model, g, 0.0);

    double t = 0.5;
    TwoLevelState s1 = strang_evolve(s0, free_model, t / 2000, 2000);
    GridFunction expect =
        inverse_scaled_fourier(free_band_propagate(scaled_fourier(s0.up), t, +1, free_model));
    CHECK(l2_distance(s1.up, expect) < 1e-10);
    CHECK(s1.down.norm() < 1e-13);
}

TEST_CASE("tabulated model drives the solver like its closed-form twin") {
    double eps = 0.1;
    auto g = Grid1D::make(-40, 40, 1 << 11, eps);
    GridFunction tp = model.theta_prime_grid(g);
    GridFunction rho(g, Space::Position);
    for (auto& z : rho.v) z = 0.5;
    auto tab = DiabaticModel::tabulated(tp, rho, 0.5);

    PacketSpec spec{PacketSpec::Shape::Gaussian, 5.0, 2.0, eps};
    TwoLevelState s0 = prepare_incoming(spec, model, g, -1.6);
    TwoLevelState a = strang_evolve(s0, model, 2.5e-4, 4000);
    TwoLevelState b = strang_evolve(s0, tab, 2.5e-4, 4000);
    double dev = std::sqrt(std::pow(l2_distance(a.up, b.up), 2) +
                           std::pow(l2_distance(a.down, b.down), 2));
    CHECK(dev < 1e-9);  // theta via quadrature vs closed form
    CHECK(std::abs(tab.theta(g->x(g->n / 2)) - model.theta(0.0)) < 1e-12);
}

TEST_CASE("strang conserves the norm") {
    double eps = 0.1;
    auto g = Grid1D::make(-40, 40, 1 << 11, eps);
    PacketSpec spec{PacketSpec::Shape::Gaussian, 5.0, 2.0, eps};
    TwoLevelState s0 = prepare_incoming(spec, model, g, -1.6);
    TwoLevelState s1 = strang_evolve(s0, model, 2.0e-4, 10000);
    CHECK(std::abs(s1.norm() - s0.norm()) < 1e-10);
}

TEST_CASE("strang is second order (Richardson)") {
    double eps = 0.1;
    auto g = Grid1D::make(-40, 40, 1 << 11, eps);
    PacketSpec spec{PacketSpec::Shape::Gaussian, 5.0, 2.0, eps};
    double t0 = -1.2, T = 2.4;
    TwoLevelState s0 = prepare_incoming(spec, model, g, t0);
    long base = 1200;
    auto run = [&](long mult) { return strang_evolve(s0, model, T / (base * mult), base * mult); };
    TwoLevelState ref = run(8);
    auto err = [&](const TwoLevelState& s) {
        return std::sqrt(std::pow(l2_distance(s.up, ref.up), 2) +
                         std::pow(l2_distance(s.down, ref.down), 2));
    };
    double ratio = err(run(1)) / err(run(2));
    CHECK(ratio >= 3.6);
    CHECK(ratio <= 4.4);
}

TEST_CASE("strang preconditions") {
    double eps = 0.1;
    auto g = Grid1D::make(-40, 40, 1 << 12, eps);
    // dt k_max^2/(2 eps) >= pi must throw
    double bad_dt = 1.2 * M_PI * 2 * eps / (g->k_max() * g->k_max());
    CHECK_THROWS(StrangStepper(model, g, bad_dt));
}

TEST_CASE("superadiabatic components: n = 0 is the adiabatic splitting") {
    double eps = 0.1;
    auto g = Grid1D::make(-40, 40, 1 << 11, eps);
    PacketSpec spec{PacketSpec::Shape::Gaussian, 5.0, 2.0, eps};
    TwoLevelState s = prepare_incoming(spec, model, g, -1.6);
    s = strang_evolve(s, model, 2.5e-4, 4000);  // mid-transition state

    CoefficientTable t = coefficient_tables(model, g, 1);
    QuantizedProjection p0(projection_symbol(t, model, 0, 2), eps);
    auto split = p0.split(s);

    GridFunction up_amp = adiabatic_upper_amplitude(s, model);
    GridFunction low_amp = adiabatic_lower_amplitude(s, model);
    CHECK(split.norm_inside == doctest::Approx(up_amp.norm()).epsilon(1e-12));
    CHECK(split.norm_outside == doctest::Approx(low_amp.norm()).epsilon(1e-12));

    // the projected spinor is u0 e1 (row1 . psi) componentwise
    double worst = 0;
    for (int j = 0; j < g->n; j += 7) {
        double half = model.theta(g->x(j)) / 2;
        cplx amp = std::cos(half) * s.up.v[j] + std::sin(half) * s.down.v[j];
        worst = std::max(worst, std::abs(split.inside.up.v[j] - std::cos(half) * amp));
        worst = std::max(worst, std::abs(split.inside.down.v[j] - std::sin(half) * amp));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("superadiabatic components far from the crossing") {
    // incoming side (center -10): the lower content sits at the dressing
    // floor eps p theta'(x)/(4 rho), which each superadiabatic order strips
    // further; outgoing side: a common transmitted component dominates and
    // every representation agrees on its norm
    double eps = 0.05;
    auto g = Grid1D::make(-30, 30, 1 << 12, eps);
    PacketSpec spec{PacketSpec::Shape::Gaussian, 5.0, 2.0, eps};
    TwoLevelState s = prepare_incoming(spec, model, g, -3.0);
    double dt = eps / 40;
    s = strang_evolve(s, model, dt, std::lround(1.0 / dt));  // center -10

    CoefficientTable t = coefficient_tables(model, g, 6);
    std::vector<QuantizedProjection> projections;
    for (int n = 0; n <= 5; ++n)
        projections.emplace_back(projection_symbol(t, model, n, n + 2), eps);

    double dressing = eps * spec.p0 * std::abs(model.theta_prime(-10.0)) / (4 * model.delta());
    std::vector<double> norms;
    for (const auto& p : projections) norms.push_back(p.split(s).norm_outside);
    for (int n = 1; n <= 5; ++n) {
        CHECK(norms[n] <= 1.05 * norms[0] + 1e-14);
        CHECK(std::abs(norms[n] - norms[0]) <= 3.0 * dressing);
    }

    // through the crossing and out the far side (center +10)
    s = strang_evolve(s, model, dt, std::lround(4.0 / dt));
    std::vector<double> out;
    for (const auto& p : projections) out.push_back(p.split(s).norm_outside);
    for (int n = 1; n <= 5; ++n)
        CHECK(std::abs(out[n] - out[0]) <= 0.05 * out[0]);
    CHECK(out[0] > 1e3 * norms[0]);  // a real transition happened
}

TEST_CASE("applying the projection twice differs by its defect order") {
    for (int n : {1, 2}) {
        std::vector<double> resid;
        std::vector<double> epss = {1.0 / 10, 1.0 / 30};
        std::vector<int> sizes = {1 << 12, 1 << 13};  // keep k_max ~ const
        for (size_t i = 0; i < epss.size(); ++i) {
            double eps = epss[i];
            auto g = Grid1D::make(-40, 40, sizes[i], eps);
            PacketSpec spec{PacketSpec::Shape::Gaussian, 5.0, 2.0, eps};
            TwoLevelState s = prepare_incoming(spec, model, g, -1.6);
            s = strang_evolve(s, model, 2.0e-4, 2000);
            CoefficientTable t = coefficient_tables(model, g, n + 1);
            QuantizedProjection p(projection_symbol(t, model, n, n + 2), eps);
            auto [u1, d1] = p.apply(s.up, s.down);
            auto [u2, d2] = p.apply(u1, d1);
            double diff = std::sqrt(std::pow(l2_distance(u2, u1), 2) +
                                    std::pow(l2_distance(d2, d1), 2));
            resid.push_back(diff);
        }
        double slope = std::log(resid[0] / resid[1]) / std::log(epss[0] / epss[1]);
        CHECK(slope >= n + 0.8);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "superad/fourier.hpp"
#include "superad/model.hpp"

using namespace superad;

TEST_CASE("derived pole parameters") {
    auto p = derived_params(-M_PI / 3, M_PI / 2, 0.5);
    CHECK(p.q_c == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.gamma == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(p.tau_c == doctest::Approx(1.0).epsilon(1e-15));

    auto p2 = derived_params(-M_PI / 3, 2 * M_PI / 5, 3.0 / 32);
    CHECK(p2.q_c == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(p2.gamma == doctest::Approx(5.0 / 12).epsilon(1e-15));
    CHECK(p2.tau_c == doctest::Approx(15.0 / 64).epsilon(1e-15));

    auto p3 = derived_params(0.0, 1.0, 1.0);
    CHECK(p3.q_c == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(p3.gamma == 0.0);
    CHECK(p3.tau_c == doctest::Approx(M_PI).epsilon(1e-15));

    CHECK_THROWS(derived_params(1.0, -1.0, 1.0));
    CHECK_THROWS(derived_params(1.0, 1.0, 0.0));
}

TEST_CASE("theta derivatives, exact sech/tanh recurrence") {
    auto m = DiabaticModel::sech_theta(-M_PI / 3, M_PI / 2, 0.5);
    CHECK(m.theta_prime(0.0, 0) == doctest::Approx(-M_PI / 6).epsilon(1e-15));
    CHECK(m.theta_prime(0.0, 1) == doctest::Approx(0.0));  // theta' even

    // 6th-order central difference oracle for d^3 theta'/dq^3 at q=1
    auto f = [&](double q) { return m.theta_prime(q, 0); };
    double h = 1e-2, q = 1.0;
    double fd = (-f(q + 3 * h) + 8 * f(q + 2 * h) - 13 * f(q + h) + 13 * f(q - h) -
                 8 * f(q - 2 * h) + f(q - 3 * h)) /
                (8 * h * h * h);
    CHECK(m.theta_prime(q, 3) == doctest::Approx(fd).epsilon(1e-7));
    // independently frozen (mpmath): 0.03487084732583368
    CHECK(m.theta_prime(q, 3) == doctest::Approx(0.03487084732583368).epsilon(1e-12));

    CHECK_THROWS(m.theta_prime(0.0, 65));
}

TEST_CASE("potential matrix") {
    auto m = DiabaticModel::sech_theta(-M_PI / 3, M_PI / 2, 0.5);
    Mat2 v0 = m.potential(0.0);
    CHECK(std::abs(v0(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(v0(0, 1)) < 1e-15);
    CHECK(std::abs(v0(1, 1) + 0.5) < 1e-15);

    Mat2 v = m.potential(2.7);
    CHECK(std::abs(v.trace()) < 1e-15);
    CHECK(std::abs(v.det() + 0.25) < 1e-14);  // det = -delta^2
    double ev = std::sqrt(std::norm(v(0, 0)) + std::norm(v(0, 1)));
    CHECK(ev == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("adiabatic frame") {
    auto m = DiabaticModel::sech_theta(-M_PI / 3, M_PI / 2, 0.5);
    AdiabaticFrame f0 = m.frame(0.0);
    CHECK(std::abs(f0.u0(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(f0.u0(1, 1) + 1.0) < 1e-15);
    CHECK(std::abs(f0.u0(0, 1)) < 1e-15);

    for (double q : {-3.1, 0.4, 1.3, 2.0}) {
        AdiabaticFrame f = m.frame(q);
        Mat2 id = f.u0 * f.u0;  // involutive & orthogonal (u0 symmetric)
        CHECK(std::abs(id(0, 0) - 1.0) < 1e-14);
        CHECK(std::abs(id(0, 1)) < 1e-14);
        // U0 V U0 = diag(rho, -rho)
        Mat2 d = f.u0 * m.potential(q) * f.u0;
        CHECK(std::abs(d(0, 0) - m.rho(q)) < 1e-12);
        CHECK(std::abs(d(0, 1)) < 1e-12);
        CHECK(std::abs(d(1, 0)) < 1e-12);
    }

    AdiabaticFrame f = m.frame(1.3);
    Mat2 xy = f.sigma_x * f.sigma_y;
    Mat2 iz = f.sigma_z * cplx(0, 1);
    CHECK((xy - iz).frobenius() < 1e-12);
    Mat2 xx = f.sigma_x * f.sigma_x;
    CHECK((xx - Mat2::identity()).frobenius() < 1e-12);
    // sigma_z = V/rho
    Mat2 vr = m.potential(1.3) * cplx(1.0 / m.rho(1.3));
    CHECK((f.sigma_z - vr).frobenius() < 1e-12);
}

TEST_CASE("pauli special derivative relations on the grid") {
    auto m = DiabaticModel::sech_theta(-M_PI / 3, M_PI / 2, 0.5);
    auto g = Grid1D::make(-40, 40, 2048, 0.1);
    // sigma_x' = theta' sigma_z checked entry-wise with centered differences
    double h = 1e-4;
    for (int j = g->n / 10; j < g->n - g->n / 10; j += 97) {
        double q = g->x(j);
        AdiabaticFrame fp = m.frame(q + h), fm = m.frame(q - h), fc = m.frame(q);
        Mat2 dx = (fp.sigma_x - fm.sigma_x) * cplx(1.0 / (2 * h));
        Mat2 expect = fc.sigma_z * cplx(m.theta_prime(q));
        CHECK((dx - expect).frobenius() < 1e-6);
        Mat2 dz = (fp.sigma_z - fm.sigma_z) * cplx(1.0 / (2 * h));
        Mat2 expect_z = fc.sigma_x * cplx(-m.theta_prime(q));
        CHECK((dz - expect_z).frobenius() < 1e-6);
    }
}

TEST_CASE("a/b chains, constant rho unrolls") {
    auto m = DiabaticModel::sech_theta(-M_PI / 3, M_PI / 2, 0.5);
    auto g = Grid1D::make(-40, 40, 1024, 0.1);
    ABChain ab = ab_chain(m, g, 3);
    double worst = 0;
    for (int j = 0; j < g->n; j += 13) {
        double q = g->x(j);
        double tp = m.theta_prime(q, 0), tpp = m.theta_prime(q, 1);
        worst = std::max(worst, std::abs(ab.a[0].v[j] - cplx(0.5)));
        worst = std::max(worst, std::abs(ab.b[0].v[j]));
        worst = std::max(worst, std::abs(ab.a[1].v[j]));
        worst = std::max(worst, std::abs(ab.b[1].v[j] - cplx(-0.5 * tp)));
        worst = std::max(worst, std::abs(ab.a[2].v[j] - cplx(-0.5 * tp * tp)));
        worst = std::max(worst, std::abs(ab.b[2].v[j] - cplx(-0.5 * tpp)));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("tabulated model falls back to spectral machinery") {
    auto g = Grid1D::make(-40, 40, 1024, 0.1);
    auto sech = DiabaticModel::sech_theta(-M_PI / 3, M_PI / 2, 0.5);
    GridFunction tp = sech.theta_prime_grid(g);
    GridFunction rho(g, Space::Position);
    for (auto& z : rho.v) z = 0.5;
    auto tab = DiabaticModel::tabulated(tp, rho, 0.5);
    CHECK_THROWS(tab.poles());
    GridFunction d1 = tab.theta_prime_grid(g, 1);
    GridFunction d1x = sech.theta_prime_grid(g, 1);
    double worst = 0;
    for (int j = 64; j < g->n - 64; ++j) worst = std::max(worst, std::abs(d1.v[j] - d1x.v[j]));
    CHECK(worst < 1e-9);
}

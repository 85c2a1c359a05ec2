#pragma once

#include <optional>

#include "superad/grid.hpp"

namespace superad {

// Pole data of theta' in the complex q plane: distance q_c of the nearest
// pole pair, residue coefficient gamma, and tau_c = 2*delta*q_c on the
// natural scale tau(q) = 2*delta*q.
struct PoleParams {
    double q_c = 0;
    double gamma = 0;
    double tau_c = 0;
};

struct AdiabaticFrame {
    Mat2 u0;       // the reflection U0(q); symmetric, orthogonal, involutive
    Mat2 sigma_x;  // U0 sigma U0 at q
    Mat2 sigma_y;
    Mat2 sigma_z;
};

// Polynomial in s = sech(alpha q), t = tanh(alpha q) with t-degree <= 1
// (t^2 = 1 - s^2 keeps the basis closed). Derivatives and products stay in
// the algebra, which is what makes high theta' derivatives exact.
class SechTanhPoly {
  public:
    SechTanhPoly() = default;
    explicit SechTanhPoly(double alpha) : alpha_(alpha) {}

    static SechTanhPoly sech(double alpha, double coeff);      // coeff * s
    static SechTanhPoly constant(double alpha, double value);  // value * s^0

    SechTanhPoly derivative() const;
    SechTanhPoly operator*(const SechTanhPoly& o) const;
    SechTanhPoly operator+(const SechTanhPoly& o) const;
    SechTanhPoly operator-(const SechTanhPoly& o) const;
    double eval(double q) const;
    bool empty() const { return coeffs_.empty(); }

    // coefficient access for (s^i t^j), j in {0,1}
    void add(int i, int j, double c);
    double at(int i, int j) const;
    int s_degree() const { return static_cast<int>(coeffs_.size() / 2); }

  private:
    double alpha_ = 0;
    // coeffs_[i*2 + j] layout, growable
    std::vector<double> coeffs_;
};

// The diabatic potential family V = rho(q) [[cos th, sin th],[sin th, -cos th]].
// The sech family theta(q) = (c/alpha) arctan(tanh(alpha q/2)), rho = delta
// carries exact derived pole data; tabulated models supply theirs explicitly.
class DiabaticModel {
  public:
    enum class Kind { SechTheta, GenericTabulated };

    static DiabaticModel sech_theta(double c, double alpha, double delta);
    static DiabaticModel tabulated(GridFunction theta_prime, GridFunction rho, double delta,
                                   std::optional<PoleParams> poles = std::nullopt);

    Kind kind() const { return kind_; }
    double delta() const { return delta_; }
    double c() const { return c_; }
    double alpha() const { return alpha_; }
    bool constant_rho() const { return constant_rho_; }
    void set_max_theta_derivative(int k) { k_max_ = k; }

    const PoleParams& poles() const;  // throws if unavailable

    int max_theta_derivative() const { return k_max_; }

    double theta(double q) const;                     // closed form (sech family)
    double theta_prime(double q, int k = 0) const;    // d^k theta'/dq^k, exact for sech
    double rho(double q) const;

    Mat2 potential(double q) const;
    AdiabaticFrame frame(double q) const;

    // Grid views used by the recursion; order = number of d/dq applied to
    // theta' (resp. rho). Exact per point for the sech family, spectral for
    // tabulated input.
    GridFunction theta_prime_grid(const GridPtr& g, int order = 0) const;
    GridFunction rho_grid(const GridPtr& g, int order = 0) const;

  private:
    Kind kind_ = Kind::SechTheta;
    double c_ = 0, alpha_ = 1, delta_ = 1;
    bool constant_rho_ = true;
    std::optional<PoleParams> poles_;
    int k_max_ = 64;
    mutable std::vector<SechTanhPoly> theta_derivs_;  // lazily grown cache, sech family
    GridFunction theta_prime_tab_, rho_tab_, theta_tab_;  // tabulated samples
    int tab_index(double q) const;  // nearest grid node, tabulated models

    const SechTanhPoly& theta_deriv_poly(int k) const;
};

// q_c = pi/(2 alpha), gamma = -c/(2 alpha), tau_c = 2 delta q_c for the sech
// family; exact in the sense of one floating division each.
PoleParams derived_params(double c, double alpha, double delta);

// a_0 = rho, b_0 = 0, a' + theta' b / b' - theta' a chains for d^n V; exact
// in the (sech, tanh) algebra for the sech family with constant rho,
// spectral otherwise.
struct ABChain {
    std::vector<GridFunction> a, b;  // index = n
};
ABChain ab_chain(const DiabaticModel& model, const GridPtr& g, int n_max);

}  // namespace superad

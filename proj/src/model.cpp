#include "superad/model.hpp"

#include <algorithm>
#include <cmath>

#include "superad/fourier.hpp"

namespace superad {

SechTanhPoly SechTanhPoly::sech(double alpha, double coeff) {
    SechTanhPoly p(alpha);
    p.add(1, 0, coeff);
    return p;
}

SechTanhPoly SechTanhPoly::constant(double alpha, double value) {
    SechTanhPoly p(alpha);
    p.add(0, 0, value);
    return p;
}

SechTanhPoly SechTanhPoly::operator*(const SechTanhPoly& o) const {
    SechTanhPoly out(alpha_);
    int imax = s_degree(), omax = o.s_degree();
    for (int i = 0; i <= imax; ++i)
        for (int j = 0; j <= 1; ++j) {
            double ci = at(i, j);
            if (ci == 0.0) continue;
            for (int k = 0; k <= omax; ++k)
                for (int l = 0; l <= 1; ++l) {
                    double ck = o.at(k, l);
                    if (ck == 0.0) continue;
                    if (j + l < 2) {
                        out.add(i + k, j + l, ci * ck);
                    } else {  // t^2 = 1 - s^2
                        out.add(i + k, 0, ci * ck);
                        out.add(i + k + 2, 0, -ci * ck);
                    }
                }
        }
    return out;
}

SechTanhPoly SechTanhPoly::operator+(const SechTanhPoly& o) const {
    SechTanhPoly out = *this;
    if (out.coeffs_.empty()) out.alpha_ = o.alpha_;
    for (int i = 0; i <= o.s_degree(); ++i)
        for (int j = 0; j <= 1; ++j)
            if (o.at(i, j) != 0.0) out.add(i, j, o.at(i, j));
    return out;
}

SechTanhPoly SechTanhPoly::operator-(const SechTanhPoly& o) const {
    SechTanhPoly out = *this;
    if (out.coeffs_.empty()) out.alpha_ = o.alpha_;
    for (int i = 0; i <= o.s_degree(); ++i)
        for (int j = 0; j <= 1; ++j)
            if (o.at(i, j) != 0.0) out.add(i, j, -o.at(i, j));
    return out;
}

void SechTanhPoly::add(int i, int j, double c) {
    size_t idx = static_cast<size_t>(i) * 2 + j;
    if (coeffs_.size() <= idx) coeffs_.resize(idx + 1, 0.0);
    coeffs_[idx] += c;
}

double SechTanhPoly::at(int i, int j) const {
    size_t idx = static_cast<size_t>(i) * 2 + j;
    return idx < coeffs_.size() ? coeffs_[idx] : 0.0;
}

SechTanhPoly SechTanhPoly::derivative() const {
    // d/dq s^i t^j = alpha [ -i s^i t^{j+1} + j s^{i+2} t^{j-1} ], then t^2 -> 1 - s^2
    SechTanhPoly out(alpha_);
    int imax = static_cast<int>(coeffs_.size() / 2);
    for (int i = 0; i <= imax; ++i) {
        for (int j = 0; j <= 1; ++j) {
            double c = at(i, j);
            if (c == 0.0) continue;
            if (j == 0) {
                out.add(i, 1, -alpha_ * i * c);
            } else {
                // -i s^i t^2 = -i s^i (1 - s^2); + s^{i+2}
                out.add(i, 0, -alpha_ * i * c);
                out.add(i + 2, 0, alpha_ * i * c);
                out.add(i + 2, 0, alpha_ * c);
            }
        }
    }
    return out;
}

double SechTanhPoly::eval(double q) const {
    double s = 1.0 / std::cosh(alpha_ * q);
    double t = std::tanh(alpha_ * q);
    double acc = 0;
    int imax = static_cast<int>(coeffs_.size() / 2);
    double spow = 1.0;
    for (int i = 0; i <= imax; ++i) {
        acc += spow * (at(i, 0) + at(i, 1) * t);
        spow *= s;
    }
    return acc;
}

PoleParams derived_params(double c, double alpha, double delta) {
    if (!(alpha > 0) || !(delta > 0))
        throw std::invalid_argument("derived_params: alpha and delta must be positive");
    PoleParams p;
    p.q_c = M_PI / (2.0 * alpha);
    p.gamma = -c / (2.0 * alpha);
    p.tau_c = 2.0 * delta * p.q_c;
    return p;
}

DiabaticModel DiabaticModel::sech_theta(double c, double alpha, double delta) {
    DiabaticModel m;
    m.kind_ = Kind::SechTheta;
    m.c_ = c;
    m.alpha_ = alpha;
    m.delta_ = delta;
    m.constant_rho_ = true;
    m.poles_ = derived_params(c, alpha, delta);
    m.theta_derivs_.push_back(SechTanhPoly::sech(alpha, c / 2.0));
    return m;
}

DiabaticModel DiabaticModel::tabulated(GridFunction theta_prime, GridFunction rho, double delta,
                                       std::optional<PoleParams> poles) {
    if (!(delta > 0)) throw std::invalid_argument("DiabaticModel: delta must be positive");
    DiabaticModel m;
    m.kind_ = Kind::GenericTabulated;
    m.delta_ = delta;
    m.constant_rho_ = false;
    m.poles_ = poles;
    m.theta_prime_tab_ = std::move(theta_prime);
    m.rho_tab_ = std::move(rho);
    // theta by quadrature with the crossing gauge theta(0) = 0
    m.theta_tab_ = antiderivative_decaying(m.theta_prime_tab_);
    const Grid1D& g = *m.theta_tab_.grid;
    int j0 = static_cast<int>(std::lround((0.0 - g.x_min) / g.dx()));
    j0 = std::clamp(j0, 0, g.n - 1);
    cplx off = m.theta_tab_.v[j0];
    for (auto& z : m.theta_tab_.v) z -= off;
    return m;
}

int DiabaticModel::tab_index(double q) const {
    const Grid1D& g = *theta_prime_tab_.grid;
    int j = static_cast<int>(std::lround((q - g.x_min) / g.dx()));
    if (j < 0 || j >= g.n || std::abs(g.x(j) - q) > 1e-9 * std::max(1.0, std::abs(q)))
        throw std::invalid_argument("DiabaticModel: tabulated models evaluate on their grid nodes");
    return j;
}

const PoleParams& DiabaticModel::poles() const {
    if (!poles_) throw std::runtime_error("DiabaticModel: pole data not supplied for tabulated model");
    return *poles_;
}

const SechTanhPoly& DiabaticModel::theta_deriv_poly(int k) const {
    if (k > k_max_) throw std::invalid_argument("theta_prime: derivative order beyond K_max");
    while (static_cast<int>(theta_derivs_.size()) <= k)
        theta_derivs_.push_back(theta_derivs_.back().derivative());
    return theta_derivs_[k];
}

double DiabaticModel::theta(double q) const {
    if (kind_ == Kind::SechTheta) return (c_ / alpha_) * std::atan(std::tanh(alpha_ * q / 2.0));
    return theta_tab_.v[tab_index(q)].real();
}

double DiabaticModel::theta_prime(double q, int k) const {
    if (kind_ == Kind::SechTheta) return theta_deriv_poly(k).eval(q);
    if (k != 0)
        throw std::runtime_error("theta_prime: pointwise derivatives only for the sech family");
    return theta_prime_tab_.v[tab_index(q)].real();
}

double DiabaticModel::rho(double q) const {
    if (constant_rho_) return delta_;
    return rho_tab_.v[tab_index(q)].real();
}

Mat2 DiabaticModel::potential(double q) const {
    double th = theta(q);
    double r = rho(q);
    Mat2 v;
    v(0, 0) = r * std::cos(th);
    v(0, 1) = r * std::sin(th);
    v(1, 0) = v(0, 1);
    v(1, 1) = -v(0, 0);
    return v;
}

AdiabaticFrame DiabaticModel::frame(double q) const {
    double half = theta(q) / 2.0;
    double ch = std::cos(half), sh = std::sin(half);
    AdiabaticFrame f;
    f.u0(0, 0) = ch;
    f.u0(0, 1) = sh;
    f.u0(1, 0) = sh;
    f.u0(1, 1) = -ch;
    f.sigma_x = f.u0 * pauli_x() * f.u0;
    f.sigma_y = f.u0 * pauli_y() * f.u0;
    f.sigma_z = f.u0 * pauli_z() * f.u0;
    return f;
}

GridFunction DiabaticModel::theta_prime_grid(const GridPtr& g, int order) const {
    if (kind_ == Kind::SechTheta) {
        const SechTanhPoly& p = theta_deriv_poly(order);
        return GridFunction::sample(g, Space::Position, [&](double q) { return cplx(p.eval(q)); });
    }
    if (!(*theta_prime_tab_.grid == *g))
        throw std::invalid_argument("theta_prime_grid: tabulated samples live on a different grid");
    return order == 0 ? theta_prime_tab_ : spectral_derivative(theta_prime_tab_, order);
}

ABChain ab_chain(const DiabaticModel& model, const GridPtr& g, int n_max) {
    ABChain out;
    if (model.kind() == DiabaticModel::Kind::SechTheta && model.constant_rho()) {
        SechTanhPoly tp = SechTanhPoly::sech(model.alpha(), model.c() / 2.0);
        SechTanhPoly a = SechTanhPoly::constant(model.alpha(), model.delta());
        SechTanhPoly b = SechTanhPoly::constant(model.alpha(), 0.0);
        for (int n = 0; n <= n_max; ++n) {
            out.a.push_back(GridFunction::sample(g, Space::Position,
                                                 [&](double q) { return cplx(a.eval(q)); }));
            out.b.push_back(GridFunction::sample(g, Space::Position,
                                                 [&](double q) { return cplx(b.eval(q)); }));
            if (n == n_max) break;
            SechTanhPoly an = a.derivative() + tp * b;
            SechTanhPoly bn = b.derivative() - tp * a;
            a = std::move(an);
            b = std::move(bn);
        }
        return out;
    }
    GridFunction tp = model.theta_prime_grid(g);
    GridFunction a = model.rho_grid(g), b(g, Space::Position);
    for (int n = 0; n <= n_max; ++n) {
        out.a.push_back(a);
        out.b.push_back(b);
        if (n == n_max) break;
        GridFunction an = spectral_derivative_filtered(a, 1) + tp.pointwise(b);
        GridFunction bn = spectral_derivative_filtered(b, 1) - tp.pointwise(a);
        a = std::move(an);
        b = std::move(bn);
    }
    return out;
}

GridFunction DiabaticModel::rho_grid(const GridPtr& g, int order) const {
    if (constant_rho_) {
        GridFunction out(g, Space::Position);
        if (order == 0)
            for (auto& z : out.v) z = delta_;
        return out;
    }
    if (!(*rho_tab_.grid == *g))
        throw std::invalid_argument("rho_grid: tabulated samples live on a different grid");
    return order == 0 ? rho_tab_ : spectral_derivative(rho_tab_, order);
}

}  // namespace superad

#include "superad/dynamics.hpp"

#include <cmath>

#include "superad/fourier.hpp"

namespace superad {

double TwoLevelState::norm() const {
    double s = up.norm(), t = down.norm();
    return std::sqrt(s * s + t * t);
}

GridFunction packet_momentum(const PacketSpec& spec, const GridPtr& g) {
    if (g->epsilon != spec.epsilon)
        throw std::invalid_argument("packet_momentum: grid and packet epsilon disagree");
    const double eps = spec.epsilon;
    GridFunction hat(g, Space::Momentum);
    if (spec.shape == PacketSpec::Shape::Gaussian) {
        const double pref = std::pow(spec.sigma2 * M_PI * eps, -0.25);
        for (int j = 0; j < g->n; ++j) {
            double d = g->k(j) - spec.p0;
            hat.v[j] = pref * std::exp(-d * d / (2.0 * spec.sigma2 * eps));
        }
    } else {
        for (int j = 0; j < g->n; ++j) {
            double d = g->k(j) - spec.p0;
            hat.v[j] = std::exp(-std::pow(d, 6) / (4.0 * eps));
        }
    }
    double n = hat.norm();
    if (n == 0) throw std::runtime_error("packet_momentum: packet not resolved on the grid");
    hat *= cplx(1.0 / n);
    return hat;
}

double packet_position_width(const PacketSpec& spec, const GridPtr& g) {
    GridFunction psi = inverse_scaled_fourier(packet_momentum(spec, g));
    double m0 = 0, m1 = 0, m2 = 0;
    for (int j = 0; j < g->n; ++j) {
        double w = std::norm(psi.v[j]);
        m0 += w;
        m1 += w * g->x(j);
        m2 += w * g->x(j) * g->x(j);
    }
    double mean = m1 / m0;
    return std::sqrt(std::max(m2 / m0 - mean * mean, 0.0));
}

GridFunction free_band_propagate(const GridFunction& psi_hat, double t, int band,
                                 const DiabaticModel& model) {
    if (!model.constant_rho())
        throw std::invalid_argument("free_band_propagate: constant-rho models only");
    if (psi_hat.space != Space::Momentum)
        throw std::invalid_argument("free_band_propagate: momentum-space input required");
    const double eps = psi_hat.grid->epsilon;
    const double sign = band >= 0 ? 1.0 : -1.0;
    GridFunction out = psi_hat;
    for (int j = 0; j < out.size(); ++j) {
        double k = out.grid->k(j);
        out.v[j] *= std::polar(1.0, -(t / eps) * (0.5 * k * k + sign * model.delta()));
    }
    return out;
}

TwoLevelState prepare_incoming(const PacketSpec& spec, const DiabaticModel& model,
                               const GridPtr& g, double t0) {
    if (t0 > 0) throw std::invalid_argument("prepare_incoming: t0 must be non-positive");
    if (t0 < 0) {
        double width = packet_position_width(spec, g);
        if (spec.p0 * std::abs(t0) < 10.0 * width)
            throw std::invalid_argument(
                "prepare_incoming: packet overlaps the crossing region (|t0| too small)");
    }
    GridFunction hat = packet_momentum(spec, g);
    GridFunction hat_t0 = free_band_propagate(hat, t0, +1, model);
    GridFunction plus = inverse_scaled_fourier(hat_t0);
    TwoLevelState s;
    s.up = GridFunction(g, Space::Position);
    s.down = GridFunction(g, Space::Position);
    s.time = t0;
    for (int j = 0; j < g->n; ++j) {
        double half = model.theta(g->x(j)) / 2.0;
        s.up.v[j] = std::cos(half) * plus.v[j];
        s.down.v[j] = std::sin(half) * plus.v[j];
    }
    return s;
}

StrangStepper::StrangStepper(const DiabaticModel& model, const GridPtr& g, double dt)
    : dt_(dt), epsilon_(g->epsilon) {
    const double eps = g->epsilon;
    double phase_bound = dt * g->k_max() * g->k_max() / (2.0 * eps);
    if (!(phase_bound < M_PI))
        throw std::invalid_argument(
            "StrangStepper: dt*k_max^2/(2 eps) >= pi; refine dt or coarsen the dual grid");
    kinetic_half_.resize(g->n);
    for (int j = 0; j < g->n; ++j) {
        double k = g->k(j);
        kinetic_half_[j] = std::polar(1.0, -dt * k * k / (4.0 * eps));
    }
    p11_.resize(g->n);
    p12_.resize(g->n);
    p22_.resize(g->n);
    for (int j = 0; j < g->n; ++j) {
        Mat2 v = model.potential(g->x(j));
        double rho = model.rho(g->x(j));
        double cr = std::cos(dt * rho / eps), sr = std::sin(dt * rho / eps);
        // e^{-i dt V/eps} = cos(dt rho/eps) - i sin(dt rho/eps) V/rho
        p11_[j] = cr - cplx(0, 1) * sr * v(0, 0) / rho;
        p12_[j] = -cplx(0, 1) * sr * v(0, 1) / rho;
        p22_[j] = cr + cplx(0, 1) * sr * v(0, 0) / rho;
    }
}

void StrangStepper::advance(TwoLevelState& state, long steps) const {
    auto& u = state.up.v;
    auto& d = state.down.v;
    const int n = static_cast<int>(u.size());
    const double inv_n = 1.0 / n;
    for (long s = 0; s < steps; ++s) {
        fft_forward_inplace(u);
        fft_forward_inplace(d);
        for (int j = 0; j < n; ++j) {
            u[j] *= kinetic_half_[j];
            d[j] *= kinetic_half_[j];
        }
        fft_backward_inplace(u);
        fft_backward_inplace(d);
        for (int j = 0; j < n; ++j) {
            cplx uu = u[j] * inv_n, dd = d[j] * inv_n;
            u[j] = p11_[j] * uu + p12_[j] * dd;
            d[j] = p12_[j] * uu + p22_[j] * dd;
        }
        fft_forward_inplace(u);
        fft_forward_inplace(d);
        for (int j = 0; j < n; ++j) {
            u[j] *= kinetic_half_[j];
            d[j] *= kinetic_half_[j];
        }
        fft_backward_inplace(u);
        fft_backward_inplace(d);
        for (int j = 0; j < n; ++j) {
            u[j] *= inv_n;
            d[j] *= inv_n;
        }
        if ((s & 0x3f) == 0x3f || s + 1 == steps) {
            if (!std::isfinite(std::abs(u[0])) || !std::isfinite(std::abs(d[n / 2])))
                throw std::runtime_error("strang_evolve: NaN at step " + std::to_string(s));
        }
    }
    state.time += dt_ * steps;
}

TwoLevelState strang_evolve(const TwoLevelState& state, const DiabaticModel& model, double dt,
                            long steps) {
    StrangStepper stepper(model, state.up.grid, dt);
    TwoLevelState out = state;
    stepper.advance(out, steps);
    return out;
}

GridFunction adiabatic_upper_amplitude(const TwoLevelState& s, const DiabaticModel& model) {
    const GridPtr& g = s.up.grid;
    GridFunction out(g, Space::Position);
    for (int j = 0; j < g->n; ++j) {
        double half = model.theta(g->x(j)) / 2.0;
        out.v[j] = std::cos(half) * s.up.v[j] + std::sin(half) * s.down.v[j];
    }
    return out;
}

GridFunction adiabatic_lower_amplitude(const TwoLevelState& s, const DiabaticModel& model) {
    const GridPtr& g = s.up.grid;
    GridFunction out(g, Space::Position);
    for (int j = 0; j < g->n; ++j) {
        double half = model.theta(g->x(j)) / 2.0;
        out.v[j] = -std::sin(half) * s.up.v[j] + std::cos(half) * s.down.v[j];
    }
    return out;
}

QuantizedProjection::QuantizedProjection(const ProjectionSymbol& proj, double epsilon)
    : n_(proj.n) {
    combined_ = PolyPSymbol::matrix_zero(proj.orders.front().grid());
    // fold stacks with the eps weights so the combined symbol keeps the exact
    // derivatives of the non-decaying pi_0 part
    double ej = 1.0;
    for (const auto& pi : proj.orders) {
        combined_.accumulate(pi, ej, 10);
        ej *= epsilon;
    }
}

QuantizedProjection::Split QuantizedProjection::split(const TwoLevelState& state) const {
    Split out;
    auto [pu, pd] = apply(state.up, state.down);
    out.inside.up = pu;
    out.inside.down = pd;
    out.inside.time = state.time;
    out.outside.up = state.up - pu;
    out.outside.down = state.down - pd;
    out.outside.time = state.time;
    out.norm_inside = out.inside.norm();
    out.norm_outside = out.outside.norm();
    return out;
}

std::pair<GridFunction, GridFunction> QuantizedProjection::apply(const GridFunction& up,
                                                                 const GridFunction& down) const {
    return weyl_apply_matrix(combined_, up, down, WeylForm::PositionSpace);
}

}  // namespace superad

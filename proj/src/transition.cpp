#include "superad/transition.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "superad/fourier.hpp"

namespace superad {

TransitionParams TransitionParams::from_model(const DiabaticModel& m, double epsilon, double t) {
    TransitionParams p;
    p.epsilon = epsilon;
    p.delta = m.delta();
    p.q_c = m.poles().q_c;
    p.gamma = m.poles().gamma;
    p.t_report = t;
    return p;
}

std::optional<double> v_of_k(double k, double delta) {
    double disc = k * k - 4.0 * delta;
    if (disc <= 0) return std::nullopt;
    return (k >= 0 ? 1.0 : -1.0) * std::sqrt(disc);
}

namespace {

// ascending packet support [lo, hi] above rel_floor of the peak
std::pair<double, double> packet_support(const GridFunction& hat, double rel_floor) {
    double peak = hat.sup_norm();
    double lo = 0, hi = 0;
    bool found = false;
    for (int j = 0; j < hat.size(); ++j) {
        if (std::abs(hat.v[j]) >= rel_floor * peak) {
            double k = hat.grid->k(j);
            if (!found) {
                lo = hi = k;
                found = true;
            } else {
                lo = std::min(lo, k);
                hi = std::max(hi, k);
            }
        }
    }
    return {lo, hi};
}

double packet_momentum_width(const GridFunction& hat) {
    double m0 = 0, m1 = 0, m2 = 0;
    for (int j = 0; j < hat.size(); ++j) {
        double w = std::norm(hat.v[j]);
        double k = hat.grid->k(j);
        m0 += w;
        m1 += w * k;
        m2 += w * k * k;
    }
    double mean = m1 / m0;
    return std::sqrt(std::max(m2 / m0 - mean * mean, 0.0));
}

TransitionResult formula_branch(const GridFunction& psi_plus, const TransitionParams& par,
                                bool main_branch) {
    if (psi_plus.space != Space::Momentum)
        throw std::invalid_argument("formula_transmitted: momentum-space packet required");
    const GridPtr& g = psi_plus.grid;
    const double eps = par.epsilon;
    BandLimitedInterpolant interp(psi_plus);
    auto [plo, phi] = packet_support(psi_plus, 1e-40);
    const double pad = g->dk();

    TransitionResult out;
    out.psi_minus_hat = GridFunction(g, Space::Momentum);
    const double s = std::sin(M_PI * par.gamma / 2.0);
    double best = 0;
    for (int j = 0; j < g->n; ++j) {
        double k = g->k(j);
        auto v = v_of_k(k, par.delta);
        if (!v) continue;  // chi_{k^2 > 4 delta}: the formula vanishes outside
        double varg = main_branch ? *v : -*v;
        if (varg < plo - pad || varg > phi + pad) continue;
        double sgn = k >= 0 ? 1.0 : -1.0;
        double expo = std::exp(-(par.q_c / eps) * std::abs(k - varg));
        double amp = main_branch ? (1.0 + k / *v) : (-1.0 + k / *v);
        cplx phase = std::polar(1.0, -(par.t_report / eps) * (0.5 * k * k - par.delta));
        cplx val = sgn * s * expo * amp * phase * interp(varg);
        out.psi_minus_hat.v[j] = val;
        if (std::abs(val) > best) {
            best = std::abs(val);
            out.peak_k = k;
        }
    }
    out.l2_norm = out.psi_minus_hat.norm();
    out.method = TransitionMethod::ClosedFormula;

    // indicator-edge warning: packet weight within 3 momentum-widths of 2 sqrt(delta)
    double width = packet_momentum_width(psi_plus);
    double edge = 2.0 * std::sqrt(par.delta);
    double weight = 0, total = 0;
    for (int j = 0; j < g->n; ++j) {
        double w = std::norm(psi_plus.v[j]);
        total += w;
        if (std::abs(std::abs(psi_plus.grid->k(j)) - edge) < 3.0 * width) weight += w;
    }
    if (weight > 1e-6 * total)
        out.warnings.push_back("packet has weight near |k| = 2 sqrt(delta); indicator-edge effects");
    return out;
}

}  // namespace

TransitionResult formula_transmitted(const GridFunction& psi_plus_hat_at_crossing,
                                     const TransitionParams& params) {
    return formula_branch(psi_plus_hat_at_crossing, params, true);
}

TransitionResult formula_transmitted_second_branch(const GridFunction& psi_plus_hat_at_crossing,
                                                   const TransitionParams& params) {
    return formula_branch(psi_plus_hat_at_crossing, params, false);
}

double HistoryCurve::plateau() const {
    if (samples.empty()) return 0;
    size_t tail = std::max<size_t>(1, samples.size() / 10);
    double acc = 0;
    for (size_t i = samples.size() - tail; i < samples.size(); ++i) acc += samples[i].second;
    return acc / tail;
}

double HistoryCurve::overshoot() const {
    double p = plateau();
    double mx = 0;
    for (const auto& [t, v] : samples) mx = std::max(mx, v);
    return p > 0 ? mx / p - 1.0 : 0.0;
}

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || count < 4) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

HistoryCurve history_perturbative(const PacketSpec& spec, const DiabaticModel& model, double n,
                                  const HistoryOptions& opt) {
    if (!model.constant_rho())
        throw std::invalid_argument("history_perturbative: constant-rho models only");
    if (n < 1) throw std::invalid_argument("history_perturbative: n >= 1 required");
    const double eps = spec.epsilon;
    const double delta = model.delta();
    const PoleParams& pp = model.poles();
    const double alpha_lim =
        pp.gamma == 0.0 ? 1.0 : std::sin(M_PI * pp.gamma / 2.0) / (M_PI * pp.gamma / 2.0);
    const bool integer_n = std::abs(n - std::round(n)) < 1e-12;
    const int n_int = static_cast<int>(std::round(n));

    // grid sized for the packet: reuse a default recursion-friendly layout
    auto g = Grid1D::make(-30, 30, 1 << 13, eps);
    GridFunction packet = packet_momentum(spec, g);
    const double dk = g->dk();
    const double dt = opt.dt > 0 ? opt.dt : eps / 40.0;

    // participating eta (packet support) and k (output support) indices
    double peak = packet.sup_norm();
    std::vector<int> eta_idx;
    for (int j = 0; j < g->n; ++j)
        if (std::abs(packet.v[j]) >= opt.packet_floor * peak) eta_idx.push_back(j);
    std::vector<double> eta(eta_idx.size());
    std::vector<cplx> f(eta_idx.size());
    double eta_max = -1e300, eta_min = 1e300;
    for (size_t i = 0; i < eta_idx.size(); ++i) {
        eta[i] = g->k(eta_idx[i]);
        f[i] = packet.v[eta_idx[i]];
        eta_max = std::max(eta_max, eta[i]);
        eta_min = std::min(eta_min, eta[i]);
    }
    const double reach = opt.kernel_decay_cut * eps / pp.q_c;
    std::vector<int> k_idx;
    for (int j = 0; j < g->n; ++j) {
        double k = g->k(j);
        if (k * k <= 4 * delta) continue;
        if (k < eta_min - reach || k > eta_max + reach) continue;
        k_idx.push_back(j);
    }

    // time sampling
    long nsteps = std::lround((opt.t_max - opt.t_min) / dt);
    std::vector<long> sample_steps;
    for (long m = 0; m <= nsteps; m += opt.stride) sample_steps.push_back(m);
    if (sample_steps.back() != nsteps) sample_steps.push_back(nsteps);
    const size_t n_samples = sample_steps.size();

    // optional higher-4m kernels from the recursion table
    struct MKernel {
        int four_m;
        std::vector<cplx> hat_sorted;  // scaled FT of kappa_{n+1}^{4m,-} on ascending k
    };
    std::vector<MKernel> extra;
    if (opt.general_m_table && integer_n) {
        const CoefficientTable& tab = *opt.general_m_table;
        if (tab.n_max() < n_int + 1)
            throw std::invalid_argument("history_perturbative: table too shallow for 4m kernels");
        for (int m4 = 4; m4 <= n_int + 1; m4 += 4) {
            GridFunction km = (tab.y(n_int + 1, m4) - tab.x(n_int + 1, m4))
                                  .pointwise(tab.rho()) * cplx(-2.0);
            if (km.sup_norm() == 0) continue;
            if (!(*tab.grid() == *g))
                throw std::invalid_argument("history_perturbative: table grid mismatch");
            GridFunction hat = scaled_fourier(km);
            MKernel mk;
            mk.four_m = m4;
            mk.hat_sorted.resize(g->n);
            for (int j = 0; j < g->n; ++j)
                mk.hat_sorted[(g->freq_index(j) + g->n / 2 + g->n) % g->n] = hat.v[j];
            extra.push_back(std::move(mk));
        }
    }

    std::vector<std::vector<cplx>> psi_t(n_samples, std::vector<cplx>(k_idx.size(), cplx(0)));
    const double pref_main = pp.gamma * alpha_lim / (4.0 * eps);
    const cplx pref_extra = cplx(0, -1) * std::pow(eps, n) / std::sqrt(2.0 * M_PI * eps);

    parallel_for(static_cast<int>(k_idx.size()), opt.threads, [&](int row) {
        double k = g->k(k_idx[row]);
        std::vector<cplx> acc(n_samples, cplx(0));
        for (size_t i = 0; i < eta.size(); ++i) {
            double e = eta[i];
            double band = pp.q_c * std::abs(k - e) / eps;
            if (band > opt.kernel_decay_cut) continue;
            double ksq = k * k - e * e;
            // kernel weight per eta
            cplx kern;
            double ratio = ksq / (4.0 * delta);
            if (integer_n) {
                kern = pref_main * (e + k) * std::pow(ratio, n_int) * std::exp(-band);
            } else {
                if (ratio <= 0) continue;  // principal power on the positive part
                kern = pref_main * (e + k) * std::pow(ratio, n) * std::exp(-band);
            }
            // optional 4m additions: eps^n (-i)/sqrt(2 pi eps) kappa_hat(k-e) ((e+k)/2)^{n+1-4m}
            for (const auto& mk : extra) {
                double u = k - e;
                int off = static_cast<int>(std::lround(u / dk)) + g->n / 2;
                if (off < 0 || off >= g->n) continue;
                kern += pref_extra * mk.hat_sorted[off] *
                        std::pow(0.5 * (e + k), n_int + 1 - mk.four_m);
            }
            kern *= f[i] * dk;

            // trapezoid of e^{i omega s} on [t_min, t_min + M dt], closed form
            double omega = (ksq - 4.0 * delta) / (2.0 * eps);
            cplx r = std::polar(1.0, omega * dt);
            cplx e0 = std::polar(1.0, omega * opt.t_min);
            cplx denom(-2.0 * std::pow(std::sin(0.5 * omega * dt), 2), std::sin(omega * dt));
            bool tiny = std::abs(omega) * dt < 1e-9;
            cplx r_stride = std::polar(1.0, omega * dt * opt.stride);
            cplx eM = e0;
            long prev = 0;
            for (size_t si = 0; si < n_samples; ++si) {
                long M = sample_steps[si];
                if (si > 0) {
                    long gap = M - prev;
                    eM *= (gap == opt.stride) ? r_stride : std::polar(1.0, omega * dt * gap);
                }
                prev = M;
                cplx trap;
                if (tiny) {
                    trap = dt * static_cast<double>(M) * e0;
                } else {
                    cplx S = (eM * r - e0) / denom;  // sum of e^{i omega s_m}, m=0..M
                    trap = dt * (S - 0.5 * (e0 + eM));
                }
                acc[si] += kern * trap;
            }
        }
        for (size_t si = 0; si < n_samples; ++si) psi_t[si][row] = acc[si];
    });

    HistoryCurve out;
    out.n = n;
    for (size_t si = 0; si < n_samples; ++si) {
        double t = opt.t_min + dt * sample_steps[si];
        double nrm = 0;
        for (const auto& z : psi_t[si]) nrm += std::norm(z);
        out.samples.emplace_back(t, std::sqrt(nrm * dk));
    }
    out.final_psi_hat = GridFunction(g, Space::Momentum);
    double t_final = out.samples.back().first;
    for (size_t row = 0; row < k_idx.size(); ++row) {
        double k = g->k(k_idx[row]);
        cplx phase = std::polar(1.0, -(t_final / eps) * (0.5 * k * k - delta));
        out.final_psi_hat.v[k_idx[row]] = phase * psi_t.back()[row];
    }
    return out;
}

OptimalRepresentation optimal_representation(double p0, double sigma2, const DiabaticModel& model,
                                             double epsilon) {
    if (!model.constant_rho())
        throw std::invalid_argument("optimal_representation: constant-rho Gaussian case only");
    const double delta = model.delta();
    const double qc = model.poles().q_c;
    OptimalRepresentation out;
    double eta = p0;
    int it = 0;
    for (; it < 50; ++it) {
        double k = std::sqrt(eta * eta + 4.0 * delta);
        double gfun = eta - k * (1.0 - (eta - p0) / (sigma2 * qc));
        double dk_de = k > 0 ? eta / k : 0.0;
        double gp = 1.0 - dk_de * (1.0 - (eta - p0) / (sigma2 * qc)) + k / (sigma2 * qc);
        double step = gfun / gp;
        eta -= step;
        if (std::abs(step) < 1e-12) break;
    }
    if (it >= 50) throw std::runtime_error("optimal_representation: Newton did not converge");
    double k = std::sqrt(eta * eta + 4.0 * delta);
    out.eta_star = eta;
    out.k_star = k;
    out.n_star = k > 0 ? 2.0 * delta * qc / (epsilon * k) : 0.0;
    out.newton_iterations = it + 1;

    // positive-definite Hessian of M at the stationary pair
    double n = out.n_star;
    double denom = (k * k - eta * eta);
    if (denom > 0) {
        double a = 2.0 * n * epsilon / (denom * denom);
        double mkk = a * (k * k + eta * eta);
        double mee = mkk + 1.0 / sigma2;
        double mke = -2.0 * a * k * eta;
        out.m_eta_eta = mee;
        out.hessian_positive = (mee > 0) && (mkk * mee - mke * mke > 0);
    } else {
        out.m_eta_eta = 1.0 / sigma2;
        out.hessian_positive = true;  // gapless degeneration
    }
    if (!out.hessian_positive)
        throw std::runtime_error("optimal_representation: stationary point is not a minimum");
    return out;
}

std::vector<std::pair<double, double>> history_error_function_model(
    const PacketSpec& spec, const DiabaticModel& model, double epsilon,
    const std::vector<double>& times, double plateau) {
    if (spec.shape != PacketSpec::Shape::Gaussian)
        throw std::invalid_argument("history_error_function_model: Gaussian packets only");
    OptimalRepresentation opt = optimal_representation(spec.p0, spec.sigma2, model, epsilon);
    const double s_star = 0.0;  // packet real at the crossing
    double A = opt.eta_star * opt.eta_star / opt.m_eta_eta;
    double rate = std::sqrt(A / (2.0 * epsilon));
    std::vector<std::pair<double, double>> out;
    out.reserve(times.size());
    for (double t : times)
        out.emplace_back(t, 0.5 * plateau * (1.0 + std::erf((t - s_star) * rate)));
    return out;
}

LandauZener lz_probability(double p0, const DiabaticModel& model, double epsilon) {
    if (!model.constant_rho())
        throw std::invalid_argument("lz_probability: constant-rho models only");
    const double delta = model.delta();
    const double qc = model.poles().q_c;
    LandauZener lz;
    lz.exact = std::exp(-(qc / epsilon) * (std::sqrt(p0 * p0 + 4.0 * delta) - p0));
    lz.large_p0 = std::exp(-model.poles().tau_c / (p0 * epsilon));
    lz.ratio = lz.exact / lz.large_p0;
    return lz;
}

double momentum_shift_predictor(const std::function<double(double)>& log_modulus,
                                double search_lo, double search_hi, const DiabaticModel& model,
                                double q_c_override) {
    const double delta = model.delta();
    const double qc = q_c_override >= 0 ? q_c_override : model.poles().q_c;
    auto obj = [&](double v) {
        return qc * (std::sqrt(v * v + 4.0 * delta) - v) + log_modulus(v);
    };
    double a = search_lo, b = search_hi;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = obj(c), fd = obj(d);
    for (int i = 0; i < 200 && (b - a) > 1e-12 * (1 + std::abs(a)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = obj(d);
        }
    }
    double v_star = 0.5 * (a + b);
    // unimodality sanity: the found point must beat the bracket ends
    if (obj(v_star) > obj(search_lo) || obj(v_star) > obj(search_hi))
        throw std::runtime_error("momentum_shift_predictor: search bracket is not unimodal");
    return std::sqrt(v_star * v_star + 4.0 * delta);
}

std::function<double(double)> packet_log_modulus(const PacketSpec& spec) {
    if (spec.shape == PacketSpec::Shape::Gaussian) {
        double p0 = spec.p0, s2 = spec.sigma2;
        return [p0, s2](double k) { return (k - p0) * (k - p0) / (2.0 * s2); };
    }
    double p0 = spec.p0;
    return [p0](double k) { return std::pow(k - p0, 6) / 4.0; };
}

}  // namespace superad

#include "superad/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace superad {

namespace {

// FFTW planning is not thread-safe; execution via fftw_execute_dft is, as
// long as plans are created with FFTW_UNALIGNED so any buffer is acceptable.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cplx> tmp(n);
        auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
        fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_[key] = plan;
        return plan;
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

void execute(std::vector<cplx>& data, int sign) {
    fftw_plan plan = PlanCache::instance().get(static_cast<int>(data.size()), sign);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

double boundary_level(const GridFunction& f) {
    double sup = f.sup_norm();
    if (sup == 0) return 0;
    double edge = std::max(std::abs(f.v.front()), std::abs(f.v.back()));
    return edge / sup;
}

}  // namespace

void fft_forward_inplace(std::vector<cplx>& data) { execute(data, FFTW_FORWARD); }
void fft_backward_inplace(std::vector<cplx>& data) { execute(data, FFTW_BACKWARD); }

GridFunction scaled_fourier(const GridFunction& f) {
    if (f.space != Space::Position)
        throw std::invalid_argument("scaled_fourier: expects a position-space function");
    const Grid1D& g = *f.grid;
    GridFunction out(f.grid, Space::Momentum, f.v);
    fft_forward_inplace(out.v);
    const double scale = g.dx() / std::sqrt(2.0 * M_PI * g.epsilon);
    for (int j = 0; j < g.n; ++j) {
        // e^{-ik x_min/eps} carries the offset of the first sample.
        double phase = -g.k(j) * g.x_min / g.epsilon;
        out.v[j] *= scale * std::polar(1.0, phase);
    }
    return out;
}

GridFunction inverse_scaled_fourier(const GridFunction& f) {
    if (f.space != Space::Momentum)
        throw std::invalid_argument("inverse_scaled_fourier: expects a momentum-space function");
    const Grid1D& g = *f.grid;
    GridFunction out(f.grid, Space::Position, f.v);
    for (int j = 0; j < g.n; ++j) {
        double phase = g.k(j) * g.x_min / g.epsilon;
        out.v[j] *= std::polar(1.0, phase);
    }
    fft_backward_inplace(out.v);
    const double scale = g.dk() / std::sqrt(2.0 * M_PI * g.epsilon);
    for (auto& z : out.v) z *= scale;
    return out;
}

GridFunction spectral_derivative(const GridFunction& f, int order, SpectralReport* rep) {
    if (f.space != Space::Position)
        throw std::invalid_argument("spectral_derivative: expects a position-space function");
    if (order < 0 || order > 12)
        throw std::invalid_argument("spectral_derivative: order must be in [0, 12]");
    if (order == 0) return f;
    if (rep) {
        rep->boundary_value = boundary_level(f);
        rep->boundary_warning = rep->boundary_value > 1e-13;
    }
    const Grid1D& g = *f.grid;
    std::vector<cplx> hat = f.v;
    fft_forward_inplace(hat);
    for (int j = 0; j < g.n; ++j) {
        // ik/eps with the scaled dual reduces to 2*pi*i*m/L: the plain derivative.
        cplx ik(0.0, g.k(j) / g.epsilon);
        cplx mult = 1.0;
        for (int o = 0; o < order; ++o) mult *= ik;
        // the unmatched Nyquist mode has no conjugate partner; drop it for odd orders
        if ((order % 2) == 1 && g.freq_index(j) == -g.n / 2) mult = 0.0;
        hat[j] *= mult;
    }
    fft_backward_inplace(hat);
    GridFunction out(f.grid, Space::Position, std::move(hat));
    const double inv_n = 1.0 / g.n;
    for (auto& z : out.v) z *= inv_n;
    return out;
}

GridFunction spectral_derivative_filtered(const GridFunction& f, int order, double floor_rel) {
    if (f.space != Space::Position)
        throw std::invalid_argument("spectral_derivative_filtered: position space only");
    const Grid1D& g = *f.grid;
    std::vector<cplx> hat = f.v;
    fft_forward_inplace(hat);
    double peak = 0;
    for (const auto& z : hat) peak = std::max(peak, std::abs(z));
    if (peak == 0) return GridFunction(f.grid, Space::Position);
    // find the largest |frequency| still above the noise floor
    const double floor = peak * floor_rel;
    int cut = 0;
    for (int j = 0; j < g.n; ++j)
        if (std::abs(hat[j]) > floor) cut = std::max(cut, std::abs(g.freq_index(j)));
    cut = std::min(cut + 2, g.n / 2);
    for (int j = 0; j < g.n; ++j) {
        int m = g.freq_index(j);
        if (std::abs(m) > cut) {
            hat[j] = 0;
            continue;
        }
        cplx ik(0.0, g.k(j) / g.epsilon);
        cplx mult = 1.0;
        for (int o = 0; o < order; ++o) mult *= ik;
        if ((order % 2) == 1 && m == -g.n / 2) mult = 0.0;
        hat[j] *= mult;
    }
    fft_backward_inplace(hat);
    GridFunction out(f.grid, Space::Position, std::move(hat));
    const double inv_n = 1.0 / g.n;
    for (auto& z : out.v) z *= inv_n;
    return out;
}

GridFunction antiderivative_decaying(const GridFunction& f, SpectralReport* rep) {
    if (f.space != Space::Position)
        throw std::invalid_argument("antiderivative_decaying: position space only");
    const double sup = f.sup_norm();
    const double edge = boundary_level(f) * sup;
    if (edge > 1e-12 * std::max(sup, 1.0))
        throw std::invalid_argument("antiderivative_decaying: input has not decayed at the grid ends");
    const Grid1D& g = *f.grid;
    std::vector<cplx> hat = f.v;
    fft_forward_inplace(hat);
    cplx mean = hat[0] / static_cast<double>(g.n);  // grid average of f
    hat[0] = 0;
    for (int j = 1; j < g.n; ++j) {
        cplx ik(0.0, g.k(j) / g.epsilon);
        hat[j] /= ik;
    }
    fft_backward_inplace(hat);
    GridFunction out(f.grid, Space::Position, std::move(hat));
    const double inv_n = 1.0 / g.n;
    for (auto& z : out.v) z *= inv_n;
    // periodic part + ramp carrying the mean; pin F(x_min) = 0
    cplx g0 = out.v[0];
    for (int j = 0; j < g.n; ++j) out.v[j] += mean * (g.x(j) - g.x_min) - g0;
    if (rep) {
        rep->residual_mean = std::abs(mean) * g.length();
        rep->boundary_value = edge;
        rep->boundary_warning = false;
    }
    return out;
}

BandLimitedInterpolant::BandLimitedInterpolant(const GridFunction& momentum_function) {
    if (momentum_function.space != Space::Momentum)
        throw std::invalid_argument("BandLimitedInterpolant: momentum-space input required");
    grid_ = momentum_function.grid;
    GridFunction pos = inverse_scaled_fourier(momentum_function);
    position_ = std::move(pos.v);
    scale_ = grid_->dx() / std::sqrt(2.0 * M_PI * grid_->epsilon);
}

cplx BandLimitedInterpolant::operator()(double v) const {
    const Grid1D& g = *grid_;
    const double w = -v / g.epsilon;
    // phase recursion e^{i w (x_min + j dx)} avoids n trig calls
    cplx phase = std::polar(1.0, w * g.x_min);
    const cplx step = std::polar(1.0, w * g.dx());
    cplx acc = 0;
    for (int j = 0; j < g.n; ++j) {
        acc += position_[j] * phase;
        phase *= step;
    }
    return acc * scale_;
}

}  // namespace superad

#include "superad/symbol.hpp"

#include <cmath>

#include "superad/fourier.hpp"

namespace superad {

PolyPSymbol PolyPSymbol::scalar_zero(GridPtr g) {
    PolyPSymbol s;
    s.matrix_ = false;
    s.grid_ = std::move(g);
    return s;
}

PolyPSymbol PolyPSymbol::matrix_zero(GridPtr g) {
    PolyPSymbol s;
    s.matrix_ = true;
    s.grid_ = std::move(g);
    return s;
}

PolyPSymbol PolyPSymbol::scalar_monomial(int power, GridFunction coeff) {
    PolyPSymbol s = scalar_zero(coeff.grid);
    s.set_coeff(power, 0, std::move(coeff));
    return s;
}

int PolyPSymbol::degree() const {
    int d = 0;
    for (const auto& [p, _] : slots_) d = std::max(d, p);
    return d;
}

std::vector<int> PolyPSymbol::powers() const {
    std::vector<int> out;
    for (const auto& [p, _] : slots_) out.push_back(p);
    return out;
}

PolyPSymbol::Slot& PolyPSymbol::slot(int power) {
    auto it = slots_.find(power);
    if (it == slots_.end()) {
        Slot s;
        for (int e = 0; e < entries(); ++e) s.d[e].push_back(GridFunction(grid_, Space::Position));
        it = slots_.emplace(power, std::move(s)).first;
    }
    return it->second;
}

const GridFunction& PolyPSymbol::zero_fn() const {
    if (!zero_cache_.grid) zero_cache_ = GridFunction(grid_, Space::Position);
    return zero_cache_;
}

void PolyPSymbol::set_coeff(int power, int entry, GridFunction f) {
    Slot& s = slot(power);
    s.d[entry].clear();
    s.d[entry].push_back(std::move(f));
}

void PolyPSymbol::set_stack(int power, int entry, std::vector<GridFunction> stack) {
    if (stack.empty()) throw std::invalid_argument("PolyPSymbol::set_stack: empty stack");
    slot(power).d[entry] = std::move(stack);
}

const GridFunction& PolyPSymbol::coeff(int power, int entry) const {
    auto it = slots_.find(power);
    if (it == slots_.end()) return zero_fn();
    return it->second.d[entry].front();
}

const GridFunction& PolyPSymbol::q_derivative(int power, int entry, int order) const {
    auto it = slots_.find(power);
    if (it == slots_.end()) return zero_fn();
    auto& stack = it->second.d[entry];
    while (static_cast<int>(stack.size()) <= order)
        stack.push_back(spectral_derivative_filtered(stack.back(), 1));
    return stack[order];
}

void PolyPSymbol::add_coeff(int power, int entry, const GridFunction& f, cplx scale) {
    Slot& s = slot(power);
    GridFunction& tgt = s.d[entry].front();
    for (int j = 0; j < tgt.size(); ++j) tgt.v[j] += scale * f.v[j];
    s.d[entry].resize(1);  // stacks are stale after mutation
}

void PolyPSymbol::accumulate(const PolyPSymbol& o, cplx weight, int depth) {
    if (matrix_ != o.matrix_)
        throw std::invalid_argument("PolyPSymbol::accumulate: scalar/matrix mismatch");
    for (const auto& [p, _] : o.slots_) {
        for (int e = 0; e < entries(); ++e) (void)o.q_derivative(p, e, depth);
        Slot& mine = slot(p);
        const Slot& theirs = o.slots_.at(p);
        for (int e = 0; e < entries(); ++e) {
            auto& dst = mine.d[e];
            const auto& src = theirs.d[e];
            while (dst.size() < src.size()) dst.push_back(GridFunction(grid_, Space::Position));
            for (size_t l = 0; l < src.size(); ++l)
                for (int i = 0; i < grid_->n; ++i) dst[l].v[i] += weight * src[l].v[i];
        }
    }
}

PolyPSymbol PolyPSymbol::dp(int order) const {
    PolyPSymbol out;
    out.matrix_ = matrix_;
    out.grid_ = grid_;
    for (const auto& [p, s] : slots_) {
        if (p < order) continue;
        double fac = 1;
        for (int o = 0; o < order; ++o) fac *= (p - o);
        Slot ns;
        for (int e = 0; e < entries(); ++e) {
            ns.d[e] = s.d[e];
            for (auto& g : ns.d[e]) g *= fac;
        }
        out.slots_.emplace(p - order, std::move(ns));
    }
    return out;
}

PolyPSymbol PolyPSymbol::dq(int order) const {
    PolyPSymbol out;
    out.matrix_ = matrix_;
    out.grid_ = grid_;
    for (const auto& [p, s] : slots_) {
        Slot ns;
        for (int e = 0; e < entries(); ++e) {
            (void)q_derivative(p, e, order);  // ensure depth
            auto& stack = slots_.at(p).d[e];
            ns.d[e].assign(stack.begin() + order, stack.end());
        }
        out.slots_.emplace(p, std::move(ns));
    }
    return out;
}

PolyPSymbol PolyPSymbol::entry_scalar(int e) const {
    if (!matrix_) return *this;
    PolyPSymbol out = scalar_zero(grid_);
    for (const auto& [p, s] : slots_) {
        // carry the full derivative stack so non-decaying entries keep their
        // exact derivatives (needed for the p-th power's position form)
        (void)q_derivative(p, e, p > 0 ? p : 0);
        out.set_stack(p, 0, slots_.at(p).d[e]);
    }
    return out;
}

PolyPSymbol PolyPSymbol::promoted() const {
    if (matrix_) return *this;
    PolyPSymbol out = matrix_zero(grid_);
    for (const auto& [p, s] : slots_) {
        Slot ns;
        ns.d[0] = s.d[0];
        ns.d[3] = s.d[0];
        ns.d[1].push_back(GridFunction(grid_, Space::Position));
        ns.d[2].push_back(GridFunction(grid_, Space::Position));
        out.slots_.emplace(p, std::move(ns));
    }
    return out;
}

PolyPSymbol PolyPSymbol::operator+(const PolyPSymbol& o) const {
    if (matrix_ != o.matrix_) return promoted() + o.promoted();
    PolyPSymbol out = *this;
    for (const auto& [p, s] : o.slots_)
        for (int e = 0; e < o.entries(); ++e) out.add_coeff(p, e, s.d[e].front());
    return out;
}

PolyPSymbol PolyPSymbol::operator-(const PolyPSymbol& o) const {
    PolyPSymbol out = *this;
    for (const auto& [p, s] : o.slots_)
        for (int e = 0; e < o.entries(); ++e) out.add_coeff(p, e, s.d[e].front(), cplx(-1.0));
    return out;
}

PolyPSymbol PolyPSymbol::operator*(cplx sc) const {
    PolyPSymbol out = *this;
    for (auto& [p, s] : out.slots_)
        for (int e = 0; e < out.entries(); ++e)
            for (auto& g : s.d[e]) g *= sc;
    return out;
}

PolyPSymbol PolyPSymbol::product(const PolyPSymbol& a, const PolyPSymbol& b) {
    if (a.matrix_ != b.matrix_) return product(a.promoted(), b.promoted());
    PolyPSymbol out;
    out.matrix_ = a.matrix_;
    out.grid_ = a.grid_;
    for (const auto& [pa, sa] : a.slots_)
        for (const auto& [pb, sb] : b.slots_) {
            if (!out.matrix_) {
                GridFunction prod = sa.d[0].front().pointwise(sb.d[0].front());
                out.add_coeff(pa + pb, 0, prod);
            } else {
                // row-major 2x2 product
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c) {
                        GridFunction acc = sa.d[2 * r].front().pointwise(sb.d[c].front());
                        GridFunction t = sa.d[2 * r + 1].front().pointwise(sb.d[2 + c].front());
                        acc += t;
                        out.add_coeff(pa + pb, 2 * r + c, acc);
                    }
            }
        }
    return out;
}

std::array<GridFunction, 4> PolyPSymbol::eval_at_p(double p) const {
    std::array<GridFunction, 4> out;
    for (int e = 0; e < 4; ++e) out[e] = GridFunction(grid_, Space::Position);
    for (const auto& [pw, s] : slots_) {
        double pp = std::pow(p, pw);
        for (int e = 0; e < entries(); ++e)
            for (int j = 0; j < grid_->n; ++j) out[e].v[j] += pp * s.d[e].front().v[j];
    }
    return out;
}

Mat2 PolyPSymbol::eval_entry(double p, int j) const {
    Mat2 m;
    for (const auto& [pw, s] : slots_) {
        double pp = std::pow(p, pw);
        if (matrix_) {
            for (int e = 0; e < 4; ++e) m.a[e] += pp * s.d[e].front().v[j];
        } else {
            cplx val = pp * s.d[0].front().v[j];
            m.a[0] += val;
            m.a[3] += val;
        }
    }
    return m;
}

double PolyPSymbol::sup_norm_at_p(double p) const {
    auto vals = eval_at_p(p);
    double sup = 0;
    for (int j = 0; j < grid_->n; ++j) {
        double s = 0;
        for (int e = 0; e < entries(); ++e) s += std::norm(vals[e].v[j]);
        sup = std::max(sup, s);
    }
    return std::sqrt(sup);
}

namespace {

double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

PolyPSymbol moyal_term(const PolyPSymbol& A, const PolyPSymbol& B, int j) {
    if (j < 0 || j > 8) throw std::invalid_argument("moyal_term: j must be in [0, 8]");
    bool mat = A.is_matrix() || B.is_matrix();
    PolyPSymbol sum = mat ? PolyPSymbol::matrix_zero(A.grid()) : PolyPSymbol::scalar_zero(A.grid());
    for (int alpha = 0; alpha <= j; ++alpha) {
        int beta = j - alpha;
        PolyPSymbol ta = A.dq(alpha).dp(beta);
        PolyPSymbol tb = B.dp(alpha).dq(beta);
        if (ta.empty() || tb.empty()) continue;
        cplx w = ((alpha % 2) ? -1.0 : 1.0) / (factorial(alpha) * factorial(beta));
        sum = sum + PolyPSymbol::product(ta, tb) * w;
    }
    cplx pref = std::pow(cplx(0, 2), -j);
    return sum * pref;
}

namespace {

// zero-padded linear convolution C(k_i) = sum_j A(k_i - k_j) B(k_j) dk on the
// ascending-k arrangement of the dual grid
std::vector<cplx> momentum_convolution(const Grid1D& g, const std::vector<cplx>& a_sorted,
                                       const std::vector<cplx>& b_sorted) {
    int n = g.n;
    int m = 2 * n;
    std::vector<cplx> pa(m, cplx(0)), pb(m, cplx(0));
    for (int i = 0; i < n; ++i) {
        pa[i] = a_sorted[i];
        pb[i] = b_sorted[i];
    }
    fft_forward_inplace(pa);
    fft_forward_inplace(pb);
    for (int i = 0; i < m; ++i) pa[i] *= pb[i];
    fft_backward_inplace(pa);
    std::vector<cplx> out(n);
    const double scale = g.dk() / m;
    for (int i = 0; i < n; ++i) out[i] = pa[i + n / 2] * scale;
    return out;
}

std::vector<cplx> to_sorted(const GridFunction& f) {
    // FFT order -> ascending k (index of frequency -n/2 first)
    const Grid1D& g = *f.grid;
    std::vector<cplx> out(g.n);
    for (int j = 0; j < g.n; ++j) out[(g.freq_index(j) + g.n / 2 + g.n) % g.n] = f.v[j];
    return out;
}

GridFunction from_sorted(const GridPtr& g, const std::vector<cplx>& sorted) {
    GridFunction out(g, Space::Momentum);
    for (int j = 0; j < g->n; ++j) out.v[j] = sorted[(g->freq_index(j) + g->n / 2 + g->n) % g->n];
    return out;
}

}  // namespace

GridFunction weyl_apply(const PolyPSymbol& symbol, const GridFunction& psi, WeylForm form) {
    if (symbol.is_matrix())
        throw std::invalid_argument("weyl_apply: scalar symbols only; apply matrices entry-wise");
    if (!(*symbol.grid() == *psi.grid)) throw std::invalid_argument("weyl_apply: grid mismatch");
    const GridPtr& g = symbol.grid();
    const double eps = g->epsilon;

    if (form == WeylForm::PositionSpace) {
        GridFunction x = psi.space == Space::Position ? psi : inverse_scaled_fourier(psi);
        int max_pow = symbol.degree();
        std::vector<GridFunction> dpsi(max_pow + 1);
        dpsi[0] = x;
        for (int o = 1; o <= max_pow; ++o) dpsi[o] = spectral_derivative(x, o);
        GridFunction out(g, Space::Position);
        for (int m : symbol.powers()) {
            cplx pref = std::pow(cplx(0, -eps), m);
            for (int j = 0; j <= m; ++j) {
                const GridFunction& gj = symbol.q_derivative(m, 0, j);
                double w = binom(m, j) * std::pow(2.0, -j);
                const GridFunction& pj = dpsi[m - j];
                for (int i = 0; i < g->n; ++i) out.v[i] += pref * w * gj.v[i] * pj.v[i];
            }
        }
        return psi.space == Space::Position ? out : scaled_fourier(out);
    }

    // MomentumKernel: (2 pi eps)^{-1/2} int ghat(k-eta) ((eta+k)/2)^m psihat(eta) deta
    GridFunction psihat = psi.space == Space::Momentum ? psi : scaled_fourier(psi);
    std::vector<cplx> psisorted = to_sorted(psihat);
    std::vector<double> ksorted(g->n);
    for (int i = 0; i < g->n; ++i) ksorted[i] = g->dk() * (i - g->n / 2);
    std::vector<cplx> acc(g->n, cplx(0));
    const double pref = 1.0 / std::sqrt(2.0 * M_PI * eps);
    for (int m : symbol.powers()) {
        GridFunction ghat = scaled_fourier(symbol.coeff(m, 0));
        std::vector<cplx> gsorted = to_sorted(ghat);
        for (int r = 0; r <= m; ++r) {
            // ((eta+k)/2)^m = 2^{-m} sum_r C(m,r) k^r eta^{m-r}
            std::vector<cplx> beta(g->n);
            for (int i = 0; i < g->n; ++i)
                beta[i] = psisorted[i] * std::pow(ksorted[i], m - r);
            std::vector<cplx> conv = momentum_convolution(*g, gsorted, beta);
            double w = binom(m, r) * std::pow(2.0, -m);
            for (int i = 0; i < g->n; ++i) acc[i] += pref * w * std::pow(ksorted[i], r) * conv[i];
        }
    }
    GridFunction out = from_sorted(g, acc);
    return psi.space == Space::Momentum ? out : inverse_scaled_fourier(out);
}

std::pair<GridFunction, GridFunction> weyl_apply_matrix(const PolyPSymbol& symbol,
                                                        const GridFunction& up,
                                                        const GridFunction& down, WeylForm form) {
    if (!symbol.is_matrix()) throw std::invalid_argument("weyl_apply_matrix: matrix symbol required");
    std::array<PolyPSymbol, 4> parts;
    for (int e = 0; e < 4; ++e) parts[e] = symbol.entry_scalar(e);
    GridFunction out_up = weyl_apply(parts[0], up, form) + weyl_apply(parts[1], down, form);
    GridFunction out_dn = weyl_apply(parts[2], up, form) + weyl_apply(parts[3], down, form);
    return {out_up, out_dn};
}

PolyPSymbol hamiltonian_symbol(const DiabaticModel& model, const GridPtr& g, int stack_depth) {
    FrameGrids fr = make_frame_grids(model, g, stack_depth);
    ABChain ab = ab_chain(model, g, stack_depth);
    PolyPSymbol h = PolyPSymbol::matrix_zero(g);
    // p^2/2 * identity, constant in q
    for (int e : {0, 3}) {
        std::vector<GridFunction> stack;
        GridFunction half(g, Space::Position);
        for (auto& z : half.v) z = 0.5;
        stack.push_back(half);
        stack.push_back(GridFunction(g, Space::Position));  // derivative of a constant
        h.set_stack(2, e, std::move(stack));
    }
    // V(q) with d^n V = a_n sigma_z + b_n sigma_x
    for (int e = 0; e < 4; ++e) {
        std::vector<GridFunction> stack;
        for (int l = 0; l <= stack_depth; ++l)
            stack.push_back(ab.a[l].pointwise(fr.sigma_z[e]) + ab.b[l].pointwise(fr.sigma_x[e]));
        h.set_stack(0, e, std::move(stack));
    }
    return h;
}

FrameGrids make_frame_grids(const DiabaticModel& model, const GridPtr& g, int depth) {
    FrameGrids fr;
    fr.grid = g;
    for (int e = 0; e < 4; ++e) {
        fr.u0[e] = GridFunction(g, Space::Position);
        fr.sigma_x[e] = GridFunction(g, Space::Position);
        fr.sigma_y[e] = GridFunction(g, Space::Position);
        fr.sigma_z[e] = GridFunction(g, Space::Position);
    }
    for (int j = 0; j < g->n; ++j) {
        AdiabaticFrame f = model.frame(g->x(j));
        for (int e = 0; e < 4; ++e) {
            fr.u0[e].v[j] = f.u0.a[e];
            fr.sigma_x[e].v[j] = f.sigma_x.a[e];
            fr.sigma_y[e].v[j] = f.sigma_y.a[e];
            fr.sigma_z[e].v[j] = f.sigma_z.a[e];
        }
    }
    // d^l sigma_x = px_l sigma_x + pz_l sigma_z with px_0 = 1, pz_0 = 0;
    // px' - theta' pz and pz' + theta' px step the pair. sigma_z swaps roles
    // with a sign: d^l sigma_z = -(pz_l sigma_x) + px-like... track both pairs.
    GridFunction one(g, Space::Position);
    for (auto& z : one.v) z = 1.0;
    GridFunction zero(g, Space::Position);
    GridFunction tp = model.theta_prime_grid(g);
    fr.dx_coeff_x.push_back(one);
    fr.dx_coeff_z.push_back(zero);
    fr.dz_coeff_x.push_back(zero);
    fr.dz_coeff_z.push_back(one);
    for (int l = 0; l < depth; ++l) {
        // derivative of (px sigma_x + pz sigma_z): sigma_x' = theta' sigma_z,
        // sigma_z' = -theta' sigma_x
        GridFunction px = fr.dx_coeff_x.back(), pz = fr.dx_coeff_z.back();
        fr.dx_coeff_x.push_back(spectral_derivative_filtered(px, 1) - tp.pointwise(pz));
        fr.dx_coeff_z.push_back(spectral_derivative_filtered(pz, 1) + tp.pointwise(px));
        GridFunction qx = fr.dz_coeff_x.back(), qz = fr.dz_coeff_z.back();
        fr.dz_coeff_x.push_back(spectral_derivative_filtered(qx, 1) - tp.pointwise(qz));
        fr.dz_coeff_z.push_back(spectral_derivative_filtered(qz, 1) + tp.pointwise(qx));
    }
    return fr;
}

}  // namespace superad

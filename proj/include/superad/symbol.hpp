#pragma once

#include <map>

#include "superad/model.hpp"

namespace superad {

// Phase-space symbol polynomial in p with grid-sampled q-coefficients,
// scalar or 2x2-matrix-valued. Each (power, entry) slot carries a stack of
// q-derivatives: slot 0 is the value, deeper entries are filled on demand by
// spectral differentiation unless exact stacks were supplied at assembly
// (the sigma-matrix built symbols and V do that, since their entries do not
// decay at the grid ends).
class PolyPSymbol {
  public:
    PolyPSymbol() = default;

    static PolyPSymbol scalar_zero(GridPtr g);
    static PolyPSymbol matrix_zero(GridPtr g);
    static PolyPSymbol scalar_monomial(int power, GridFunction coeff);

    bool is_matrix() const { return matrix_; }
    const GridPtr& grid() const { return grid_; }
    int degree() const;
    bool empty() const { return slots_.empty(); }
    std::vector<int> powers() const;
    bool has_power(int power) const { return slots_.count(power) > 0; }

    void set_coeff(int power, int entry, GridFunction f);
    void set_stack(int power, int entry, std::vector<GridFunction> stack);
    const GridFunction& coeff(int power, int entry) const;
    const GridFunction& q_derivative(int power, int entry, int order) const;

    void add_coeff(int power, int entry, const GridFunction& f, cplx scale = 1.0);

    // this += weight * other with derivative stacks aligned to `depth`;
    // missing slots on this side start as zeros. Both symbols must share
    // grid and matrix-ness.
    void accumulate(const PolyPSymbol& other, cplx weight, int depth);

    PolyPSymbol dp(int order = 1) const;  // exact on the p-polynomial
    PolyPSymbol dq(int order = 1) const;  // shifts the derivative stacks

    PolyPSymbol promoted() const;        // scalar -> diagonal matrix symbol
    PolyPSymbol entry_scalar(int e) const;  // one matrix entry with its stack

    PolyPSymbol operator+(const PolyPSymbol& o) const;
    PolyPSymbol operator-(const PolyPSymbol& o) const;
    PolyPSymbol operator*(cplx s) const;

    // Pointwise (matrix) product, polynomial convolution in p.
    static PolyPSymbol product(const PolyPSymbol& a, const PolyPSymbol& b);

    // Sum over powers at fixed momentum: 4 (or 1) grid functions.
    std::array<GridFunction, 4> eval_at_p(double p) const;
    Mat2 eval_entry(double p, int j) const;

    // sup over q of the Frobenius norm at momentum p
    double sup_norm_at_p(double p) const;

    int entries() const { return matrix_ ? 4 : 1; }

  private:
    bool matrix_ = false;
    GridPtr grid_;
    struct Slot {
        std::array<std::vector<GridFunction>, 4> d;  // derivative stacks per entry
    };
    mutable std::map<int, Slot> slots_;  // mutable: stacks grow lazily
    Slot& slot(int power);
    mutable GridFunction zero_cache_;
    const GridFunction& zero_fn() const;
};

// (A # B)_j of Moyal's expansion; p-derivatives exact, q-derivatives
// spectral via the symbols' stacks. j up to 8.
PolyPSymbol moyal_term(const PolyPSymbol& A, const PolyPSymbol& B, int j);

enum class WeylForm { MomentumKernel, PositionSpace };

// Weyl quantization of a scalar symbol applied to psi. The result comes back
// in the same space as psi; internally MomentumKernel works on the momentum
// side (zero-padded discrete convolution per power of p), PositionSpace uses
// (-i eps)^m sum_j binom(m,j) 2^{-j} (d^j g)(x) (d^{m-j} psi)(x).
GridFunction weyl_apply(const PolyPSymbol& symbol, const GridFunction& psi, WeylForm form);

// Matrix symbol applied entry-wise to a two-component function.
std::pair<GridFunction, GridFunction> weyl_apply_matrix(const PolyPSymbol& symbol,
                                                        const GridFunction& up,
                                                        const GridFunction& down, WeylForm form);

// Symbol of H = p^2/2 I + V(q) with exact derivative stacks (Lemma-style
// d^n V = a_n sigma_z + b_n sigma_x).
PolyPSymbol hamiltonian_symbol(const DiabaticModel& model, const GridPtr& g, int stack_depth = 10);

// Transformed Pauli matrices and U0 sampled on a grid, with exact derivative
// stacks for sigma_x and sigma_z (sigma_y is constant in q).
struct FrameGrids {
    GridPtr grid;
    std::array<GridFunction, 4> u0;
    std::array<GridFunction, 4> sigma_x, sigma_y, sigma_z;
    // d^l sigma_x = px[l]*sigma_x + pz[l]*sigma_z, d^l sigma_z = -(...): the
    // coefficient pairs are stored so symbol stacks can be assembled exactly.
    std::vector<GridFunction> dx_coeff_x, dx_coeff_z;  // for sigma_x
    std::vector<GridFunction> dz_coeff_x, dz_coeff_z;  // for sigma_z
    int depth() const { return static_cast<int>(dx_coeff_x.size()) - 1; }
};

FrameGrids make_frame_grids(const DiabaticModel& model, const GridPtr& g, int depth = 10);

}  // namespace superad

#pragma once

#include "superad/symbol.hpp"

namespace superad {

struct ABTable {
    int n_max = 0;
    std::vector<GridFunction> a, b;
};

ABTable ab_tables(const DiabaticModel& model, const GridPtr& g, int n_max);

// Test-only corruption of the recursion; None in production. IndexShift
// mis-couples one feed term so the structural zero pattern breaks.
enum class RecursionFault { None, IndexShift };

// The x_n^m .. w_n^m coefficient functions of the superadiabatic projection
// symbols, coefficient of p^{n-m} at epsilon-order n. Row n=0 holds the
// adiabatic projection (z = w = 1/2).
class CoefficientTable {
  public:
    int n_max() const { return n_max_; }
    const GridPtr& grid() const { return grid_; }
    const GridFunction& x(int n, int m) const { return at(x_, n, m); }
    const GridFunction& y(int n, int m) const { return at(y_, n, m); }
    const GridFunction& z(int n, int m) const { return at(z_, n, m); }
    const GridFunction& w(int n, int m) const { return at(w_, n, m); }
    const GridFunction& rho() const { return rho_; }
    // right-boundary residual of the z/w integrations, relative to sup norm
    double integration_residual() const { return integration_residual_; }

    friend CoefficientTable coefficient_tables(const DiabaticModel&, const GridPtr&, int,
                                               RecursionFault);

  private:
    int n_max_ = 0;
    GridPtr grid_;
    GridFunction rho_;
    std::vector<std::vector<GridFunction>> x_, y_, z_, w_;  // [n][m]
    double integration_residual_ = 0;
    const GridFunction& at(const std::vector<std::vector<GridFunction>>& t, int n, int m) const;
    mutable GridFunction zero_;
};

CoefficientTable coefficient_tables(const DiabaticModel& model, const GridPtr& g, int n_max,
                                    RecursionFault fault = RecursionFault::None);

struct CouplingSymbol {
    int n = 0;
    PolyPSymbol kappa_plus, kappa_minus;
};

// kappa_n^± = -2 rho (y_n ± x_n), per power of p.
CouplingSymbol coupling_symbol(const CoefficientTable& table, int n);

// Closed leading-pole form of the p^n coefficient for constant rho:
// alpha_lim rho i^n (±i)^n (n-1)! ( i gamma/(tau - i tau_c)^n - c.c. ),
// tau = 2 delta q.
struct LeadingPoleCoupling {
    int n = 0;
    GridFunction plus, minus;
};

LeadingPoleCoupling coupling_leading_poles(const DiabaticModel& model, const GridPtr& g, int n);

// pi^(n) = sum_{j<=n} eps^j pi_j as a list of matrix symbols per eps order,
// assembled in the diabatic frame with exact derivative stacks.
struct ProjectionSymbol {
    int n = 0;
    std::vector<PolyPSymbol> orders;  // orders[j] = pi_j
};

ProjectionSymbol projection_symbol(const CoefficientTable& table, const DiabaticModel& model,
                                   int n, int stack_depth = 10);

struct DefectReport {
    int n = 0;
    std::vector<double> epsilons;
    std::vector<double> idempotency_norm;  // |pi#pi - pi| at each eps
    std::vector<double> commutator_norm;   // |[H, pi]_#| at each eps
    double idempotency_order = 0;          // fitted log-log slopes
    double commutator_order = 0;
    double f_offdiag_consistency = 0;  // extracted F_{n+1} vs kappa recursion
    double anchor_error_n0 = 0;        // only for n = 0
};

DefectReport projection_defect(const DiabaticModel& model, const CoefficientTable& table,
                               const ProjectionSymbol& projection,
                               const std::vector<double>& epsilons, double p_eval = 1.0);

}  // namespace superad

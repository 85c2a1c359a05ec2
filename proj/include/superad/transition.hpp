#pragma once

#include <functional>

#include "superad/dynamics.hpp"

namespace superad {

struct TransitionParams {
    double epsilon = 0.1;
    double delta = 0.5;
    double q_c = 1.0;
    double gamma = 1.0 / 3.0;
    double t_report = 0;
    bool support_indicator = true;  // keep chi_{k^2 > 4 delta}

    static TransitionParams from_model(const DiabaticModel& m, double epsilon, double t = 0);
};

enum class TransitionMethod { ClosedFormula, Perturbative, Numeric };

struct TransitionResult {
    GridFunction psi_minus_hat;  // momentum space
    double l2_norm = 0;
    double peak_k = 0;
    TransitionMethod method = TransitionMethod::ClosedFormula;
    int perturbative_n = 0;
    std::vector<std::string> warnings;
};

// Momentum before the transition: sgn(k) sqrt(k^2 - 4 delta) on the support
// k^2 > 4 delta, nullopt outside.
std::optional<double> v_of_k(double k, double delta);

// The transmitted-packet formula evaluated on the k grid from the upper-band
// packet at the crossing instant; band-limited interpolation supplies
// psi_plus(v(k)).
TransitionResult formula_transmitted(const GridFunction& psi_plus_hat_at_crossing,
                                     const TransitionParams& params);

// The negative-branch remainder of the two-branch form; its norm relative to
// the main branch justifies the single-branch formula.
TransitionResult formula_transmitted_second_branch(const GridFunction& psi_plus_hat_at_crossing,
                                                   const TransitionParams& params);

struct HistoryCurve {
    double n = 0;
    std::vector<std::pair<double, double>> samples;          // (t, norm_lower)
    std::vector<std::pair<double, double>> model_prediction; // optional overlay
    GridFunction final_psi_hat;                              // at samples.back().first
    double plateau() const;                                  // mean of the last 10%
    double overshoot() const;                                // max/plateau - 1
};

struct HistoryOptions {
    double t_min = -3.0;
    double t_max = 3.0;
    double dt = 0;        // 0: eps/40
    int stride = 25;      // sample every this many s-steps
    double packet_floor = 1e-30;   // eta support cut relative to the peak
    double kernel_decay_cut = 120; // skip pairs with q_c|k-eta|/eps beyond
    const CoefficientTable* general_m_table = nullptr;  // adds the 4m kernels
    int threads = 2;
};

// Time-resolved first-order perturbative transition in the n-th
// superadiabatic representation (real n allowed; the kernel power uses the
// principal branch on k^2 > eta^2 and drops the rest).
HistoryCurve history_perturbative(const PacketSpec& spec, const DiabaticModel& model, double n,
                                  const HistoryOptions& opt);

struct OptimalRepresentation {
    double eta_star = 0;
    double k_star = 0;
    double n_star = 0;
    int newton_iterations = 0;
    bool hessian_positive = false;
    double m_eta_eta = 0;  // second eta-derivative of the exponent at the point
};

OptimalRepresentation optimal_representation(double p0, double sigma2, const DiabaticModel& model,
                                             double epsilon);

// Error-function transition history at k = k*: plateau/2 * (1 + erf((t - s*)
// sqrt(A/2eps))) with A = eta*^2 / (M_etaeta - i(phi_etaeta - s*)), phi = 0
// for a packet real at the crossing, s* = 0.
std::vector<std::pair<double, double>> history_error_function_model(
    const PacketSpec& spec, const DiabaticModel& model, double epsilon,
    const std::vector<double>& times, double plateau);

struct LandauZener {
    double exact = 0;     // exp(-(q_c/eps)(sqrt(p0^2+4 delta) - p0))
    double large_p0 = 0;  // exp(-tau_c/(p0 eps))
    double ratio = 0;
};

LandauZener lz_probability(double p0, const DiabaticModel& model, double epsilon);

// Minimizes q_c(sqrt(v^2+4 delta) - v) + M(v) by golden section and returns
// the transmitted peak momentum sqrt(v*^2 + 4 delta).
double momentum_shift_predictor(const std::function<double(double)>& log_modulus,
                                double search_lo, double search_hi, const DiabaticModel& model,
                                double q_c_override = -1);

// -eps log|psi_hat(k)| up to a constant, as used by the shift predictor.
std::function<double(double)> packet_log_modulus(const PacketSpec& spec);

}  // namespace superad

#pragma once

#include "superad/superadiabatic.hpp"

namespace superad {

// Two diabatic spinor components plus the current time.
struct TwoLevelState {
    GridFunction up, down;
    double time = 0;

    double norm() const;
};

struct PacketSpec {
    enum class Shape { Gaussian, Sextic };
    Shape shape = Shape::Gaussian;
    double p0 = 5.0;
    double sigma2 = 2.0;  // Gaussian momentum-space variance parameter
    double epsilon = 0.1;
};

// Normalized momentum-space packet on the grid (FFT ordering).
GridFunction packet_momentum(const PacketSpec& spec, const GridPtr& g);

// Position-space standard deviation of |psi|^2 at t = 0.
double packet_position_width(const PacketSpec& spec, const GridPtr& g);

// e^{-(i t/eps)(k^2/2 ± delta)} multiplication; exactly unitary, constant-rho only.
GridFunction free_band_propagate(const GridFunction& psi_hat, double t, int band,
                                 const DiabaticModel& model);

// Upper-band packet evolved backwards to t0 < 0, rotated into the diabatic
// frame (adiabatic spinor (psi_plus, 0)); lower band empty.
TwoLevelState prepare_incoming(const PacketSpec& spec, const DiabaticModel& model,
                               const GridPtr& g, double t0);

// Symmetric Strang splitting: half kinetic, exact traceless-2x2 potential
// exponential, half kinetic. Throws on NaN with the offending step index.
TwoLevelState strang_evolve(const TwoLevelState& state, const DiabaticModel& model, double dt,
                            long steps);

// A reusable stepper for long runs with sampling between bursts.
class StrangStepper {
  public:
    StrangStepper(const DiabaticModel& model, const GridPtr& g, double dt);
    void advance(TwoLevelState& state, long steps) const;
    double dt() const { return dt_; }

  private:
    double dt_;
    double epsilon_;
    std::vector<cplx> kinetic_half_;
    std::vector<cplx> p11_, p12_, p22_;
};

// Adiabatic band amplitudes in the rotation frame: upper = cos(th/2) u +
// sin(th/2) d, lower = -sin(th/2) u + cos(th/2) d. The rotation rows (rather
// than the reflection U0 rows) keep the lower-band sign consistent with the
// transmitted-packet formula.
GridFunction adiabatic_upper_amplitude(const TwoLevelState& s, const DiabaticModel& model);
GridFunction adiabatic_lower_amplitude(const TwoLevelState& s, const DiabaticModel& model);

// Weyl-quantized projection applied to states; caches the combined symbol
// sum_j eps^j pi_j with its derivative stacks.
class QuantizedProjection {
  public:
    QuantizedProjection(const ProjectionSymbol& proj, double epsilon);

    int n() const { return n_; }

    struct Split {
        TwoLevelState inside;   // P psi
        TwoLevelState outside;  // (1 - P) psi
        double norm_inside = 0;
        double norm_outside = 0;
    };
    Split split(const TwoLevelState& state) const;

    std::pair<GridFunction, GridFunction> apply(const GridFunction& up,
                                                const GridFunction& down) const;

  private:
    int n_ = 0;
    PolyPSymbol combined_;
};

}  // namespace superad

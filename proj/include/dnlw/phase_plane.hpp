#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <dnlw/params.hpp>
#include <dnlw/reaction.hpp>

namespace dnlw {

/// Point of the phase plane: X is the density variable, Z the derivative of
/// the pressure profile, Z = -m X^{gamma/(p-1)-1} X'.
struct PhasePoint {
    double X;
    double Z;
};

/// Right-hand side of the non-singular tau-system
///   dX/dtau = (p-1) X |Z|^{p-2} Z,
///   dZ/dtau = c Z - |Z|^p - f_{m,p}(X).
std::pair<double, double> trajectory_rhs(const Params& params, const Reaction& reaction,
                                         PhasePoint point, double c);

/// All real roots Z of c Z - |Z|^p = f_{m,p}(X), sorted ascending.  Each
/// monotone piece of c Z - |Z|^p is searched with safeguarded Newton.
std::vector<double> null_isocline(const Params& params, const Reaction& reaction, double c,
                                  double X);

/// Isocline-touching speed c_0 = p (F_{m,p}/(p-1))^{(p-1)/p}, with F_{m,p}
/// the maximum of f_{m,p} over the positivity interval of f.  The critical
/// speed of the bistable problem satisfies c_* < c_0.
double c0_bound(const Params& params, const Reaction& reaction);

struct CriticalPoint {
    enum class Label { O, A, S, R_c, R_lambda1, R_lambda2, R_lambdastar };
    Label label;
    double X;
    double Z;
};

std::string to_string(CriticalPoint::Label label);

/// Critical points of the tau-system for the given speed.  For gamma > 0
/// these are O, A, S and R_c(0, c^{1/(p-1)}); for gamma = 0 the R-points are
/// the real solutions of c Z - |Z|^p = m f'(0), which for monostable
/// reactions exist only once c reaches p (m^2 f'(0))^{1/(mp)}.
std::vector<CriticalPoint> critical_points(const Params& params, const Reaction& reaction,
                                           double c);

/// Ordinate on the Z-axis that the connecting trajectory lands on for the
/// given speed: c^{1/(p-1)} for gamma > 0, lambda_2(c) for bistable gamma = 0,
/// and the bottleneck center (c/p)^{1/(p-1)} for monostable gamma = 0.
double fate_target(const Params& params, const Reaction& reaction, double c);

/// Launch point (s - eps, lambda eps^sigma) on the trajectory coming into the
/// saddle (S(1,0) for bistable / KPP, A(a,0) for monostable), from the
/// leading-order balance of the trajectory equation.  sigma = 2/p for p < 2
/// (and for the degenerate case c = 0, p > 2), otherwise 1.
PhasePoint launch_from_saddle(const Params& params, const Reaction& reaction, double c,
                              double eps);

enum class TrajectoryFate {
    HitsAxisAboveTarget,
    HitsAxisBelowTarget,
    CrossesZZero,
    Diverged,
    ReachedTarget,
};

std::string to_string(TrajectoryFate fate);

struct TrajectorySample {
    double tau;
    double X;
    double Z;
    double xi;  // physical coordinate, accumulated via d(xi) = -m(p-1) X^{gamma/(p-1)} |Z|^{p-2} d(tau)
};

struct Trajectory {
    std::vector<TrajectorySample> samples;  // tau strictly monotone
    double c = 0.0;
    TrajectoryFate fate = TrajectoryFate::Diverged;
    double target = 0.0;  // fate_target at this c
    double saddle = 1.0;

    /// Z interpolated at a given X over the recorded (monotone in X) range,
    /// using Hermite interpolation with slopes from the trajectory equation.
    double z_at(const Params& params, const Reaction& reaction, double X) const;
};

struct IntegrateOptions {
    double eps = 1e-5;        // saddle launch offset
    double abs_tol = 1e-10;   // adaptive RK absolute tolerance
    double rel_tol = 1e-8;    // adaptive RK relative tolerance
    double fate_tol = 1e-4;   // |Z - target| < fate_tol*(1+target) counts as reached
    double z_cap_factor = 100.0;
    std::size_t max_steps = 4'000'000;
    bool record = true;  // keep all samples (fate-only runs may skip)
};

/// Integrates the trajectory coming into the saddle backward toward
/// X = X_min and classifies its fate.  Samples are ordered with X decreasing
/// (tau decreasing, xi increasing).
Trajectory integrate_Tc(const Params& params, const Reaction& reaction, double c, double X_min,
                        const IntegrateOptions& opts = {});

/// Closed form of the c = 0 trajectory coming into S(1,0):
///   T_0(X) = X^{-1/(p-1)} [h - mp/(p-1) * int_0^X u^{m-1} f(u) du]^{1/p},
/// with h = mp/(p-1) * int_0^1 u^{m-1} f(u) du.  Requires the weighted
/// integral of the reaction to be positive.
double explicit_c0_trajectory(const Params& params, const Reaction& reaction, double X);

// --- low-level flow engine, shared with the wave construction -------------

struct FlowEvents {
    double x_min = -1e300;
    double x_max = 1e300;
    double z_hi = 1e300;
    double z_lo = -1e300;
    bool stop_z_zero_down = false;
    bool stop_z_zero_up = false;
    double z_zero_floor = 0.0;  // crossing threshold: |Z| <= floor counts as zero
    std::optional<PhasePoint> near_point;
    double near_tol = 1e-4;
    std::optional<double> mark_x_down;  // record (without stopping) the first down-crossing of X
    double tau_max = 1e300;             // |tau - tau_0| budget; exceeding it stops the flow
    bool record = true;
    std::size_t max_steps = 4'000'000;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
};

enum class FlowStop { XMin, XMax, ZHi, ZLo, ZZeroDown, ZZeroUp, NearPoint, TauMax };

struct FlowResult {
    std::vector<TrajectorySample> samples;
    TrajectorySample last{};
    FlowStop stop = FlowStop::XMin;
    std::optional<TrajectorySample> marked;
};

/// Adaptive RK5(4) integration of the tau-system from `start`, forward or
/// backward in tau, stopping at the first triggered event.
FlowResult flow_phase(const Params& params, const Reaction& reaction, double c,
                      TrajectorySample start, bool backward, const FlowEvents& ev);

}  // namespace dnlw

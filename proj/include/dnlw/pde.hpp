#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <dnlw/params.hpp>
#include <dnlw/reaction.hpp>

namespace dnlw {

/// Uniform cell-centered grid: the full line [-L, L] or the radial domain
/// [0, L] of an N-dimensional radially symmetric problem (face at r = 0).
struct Grid {
    enum class Kind { Line1D, RadialND };
    Kind kind = Kind::Line1D;
    int N = 1;  // spatial dimension (>= 2 for RadialND)
    double L = 0.0;
    double dx = 0.0;
    std::vector<double> x;  // cell centers; mirror-symmetric for Line1D

    static Grid line(double L, double dx);
    static Grid radial(int N, double L, double dx);

    std::size_t size() const { return x.size(); }
    double face(std::size_t j) const;    // coordinate of face j in [0, size()]
    double weight(std::size_t i) const;  // r^{N-1} at the cell center (1 in 1D)
};

struct PdeState {
    std::vector<double> u;
    double t = 0.0;
    double mass = 0.0;  // weighted cell sum of u
};

PdeState make_state(const Grid& grid, std::vector<double> u0);
double total_mass(const Grid& grid, const std::vector<double>& u);

/// Face flux |dw|^{p-2} dw with w = u^m, dw = (w_right - w_left)/dx.
double dnl_flux(const Params& params, double u_left, double u_right, double dx);

/// Largest stable explicit step: sigma_d dx^2 / max_i D_i with the effective
/// diffusivity D_i = m(p-1) u^{m-1} |dw|^{p-2} (floored at 1e-14), capped by
/// sigma_r / max|f'| when a reaction is present and by dt_max.
double stable_dt(const Params& params, const Reaction* reaction, const PdeState& state,
                 const Grid& grid, double dt_max = 1.0);

/// One explicit conservative Euler step; zero-flux boundaries, reflective
/// ghost at r = 0.  Throws CFLError if dt exceeds the stability bound.
void step(const Params& params, const Reaction* reaction, PdeState& state, const Grid& grid,
          double dt);

// --- Barenblatt reference solutions ----------------------------------------

double barenblatt_alpha(const Params& params, int N);

/// Self-similarity constant k of the Barenblatt profile, from substituting
/// the ansatz into the equation: (gamma/(mp)) (alpha/N)^{1/(p-1)} for
/// gamma > 0 and (p-1) p^{-p/(p-1)}/m for gamma = 0.  The numerical residual
/// oracle in the test suite independently confirms this value (for m != 1 it
/// differs from the constant quoted in parts of the literature by 1/m).
double barenblatt_k(const Params& params, int N);

/// Literature value of the constant, kept for comparison reports.
double barenblatt_k_literature(const Params& params, int N);

/// B(x,t) = t^{-alpha} F(|x| t^{-alpha/N}) with profile
/// F(xi) = (C - k xi^{p/(p-1)})_+^{(p-1)/gamma}  (gamma > 0, free boundary)
/// F(xi) = C exp(-k xi^{p/(p-1)})                (gamma = 0, positive).
double barenblatt(const Params& params, int N, double C, double x, double t);

// --- time integration -------------------------------------------------------

struct FrontTrace {
    std::vector<double> times;
    std::vector<double> positions;     // outermost crossing of `level` (NaN if absent)
    std::vector<double> support_edge;  // outermost cell center with u > u_tiny
    double level = 0.5;
};

struct SimulateOptions {
    double level = 0.5;
    int trace_samples = 400;
    double dt_max = 1.0;
    double u_tiny = 1e-10;  // support-edge threshold
    std::function<void(const PdeState&)> on_sample;
};

struct SimulateResult {
    PdeState state;
    FrontTrace trace;
};

SimulateResult simulate(const Params& params, const Reaction* reaction, const Grid& grid,
                        std::vector<double> u0, double t_end, const SimulateOptions& opts = {});

/// Least-squares slope of front position against time over the last
/// window_frac of the recorded trace.
double measure_speed(const FrontTrace& trace, double window_frac = 0.5,
                     bool use_support_edge = false);

// --- threshold / saturation experiment data ---------------------------------

/// "Not-reacting" datum of the bistable problem: 0.99 times the minimum of a
/// clamped 0-to-a wave and its reflection; compactly supported, <= a.
std::vector<double> make_not_reacting_datum(const Params& params, const Reaction& reaction,
                                            const Grid& grid, double plateau_halfwidth = 2.0);

/// "Reacting" datum: max of a change-sign wave and its reflection (1D), or a
/// plateau of radius R glued to the change-sign decay (radial).
std::vector<double> make_reacting_datum(const Params& params, const Reaction& reaction,
                                        const Grid& grid, double c, double R);

struct SaturationReport {
    double eps = 0.0;
    double a = 0.0;
    double c_star = 0.0;
    double t_end = 0.0;
    bool band_reached = false;   // max u dropped below a + eps
    double t_eps = 0.0;          // first such time (valid if band_reached)
    double max_u_final = 0.0;
    double inner_dev_final = 0.0;  // max |u - a| over {|x| <= 0.8 c* t_end}
    double outer_max_final = 0.0;  // max u over {|x| >= 1.2 c* t_end}
    double front_speed = 0.0;      // measured level-a/2 speed (expected ~ c*)
    bool converged = false;        // band_reached && inner_dev_final <= eps
};

/// Monostable saturation experiment: waiting time until u <= a + eps, inner
/// uniform convergence to a, and outer decay, per the asymptotic description
/// of the monostable problem.
SaturationReport saturation_experiment(const Params& params, const Reaction& reaction,
                                       const Grid& grid, std::vector<double> u0, double eps,
                                       double t_end = 200.0);

}  // namespace dnlw

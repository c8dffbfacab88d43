#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <dnlw/phase_plane.hpp>

namespace dnlw {

enum class ProfileKind {
    FiniteFB,          // admissible wave vanishing beyond a finite xi0 (gamma > 0)
    Positive,          // admissible wave positive everywhere (gamma = 0)
    ChangeSign2,       // compact bump with two free boundaries
    ZeroToA,           // rises from a free boundary to 1-eps, decays to a
    AToZero,           // reflection of the above
    IncreasingAToOne,  // rises from a to 1 at a finite xi0
};

std::string to_string(ProfileKind kind);

/// Wave profile phi(xi) on an ascending non-uniform grid inherited from the
/// adaptive integration.  Finite profiles carry their free-boundary points;
/// eval() returns 0 beyond them.
struct WaveProfile {
    std::vector<double> xi;
    std::vector<double> phi;
    double c = 0.0;
    ProfileKind kind = ProfileKind::Positive;
    std::optional<double> fb_left;                  // free boundary left of the support
    std::optional<double> fb_right;                 // free boundary right of the support
    std::optional<std::pair<double, double>> peak;  // (xi_peak, height)
    std::optional<double> first_touch_a;            // ZeroToA: first xi > 0 with phi = a

    double eval(double x) const;
    /// Largest xi with phi >= level (profiles decreasing on the right part).
    double xi_at_level(double level) const;
    void reflect();  // xi -> -xi
};

struct WaveResult {
    double c_star = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    int iterations = 0;
    WaveProfile profile;
    // problem coordinates, kept for export
    double m = 0.0, p = 0.0, gamma = 0.0, a = 0.0;
    ReactionKind kind = ReactionKind::TypeC;
};

/// Critical propagation speed by bisection on the trajectory fate, bracketed
/// by [~0, c0_bound] for bistable reactions and by the explicit gamma = 0
/// analog (geometrically expanded if needed) for monostable ones.  The
/// returned profile is reconstructed at the bracket midpoint.
WaveResult find_cstar(const Params& params, const Reaction& reaction, double tol = 1e-6,
                      std::optional<double> c_hint = std::nullopt);

/// Explicit critical speed c_* = p (m^2 f'(0))^{1/(mp)} of the pseudo-linear
/// monostable problem.
double explicit_cstar_gamma0_cprime(const Params& params, const Reaction& reaction);

/// Companion ordinate lambda_* = (m^2 f'(0))^{1/p} = (c_*/p)^m.
double explicit_lambdastar_gamma0_cprime(const Params& params, const Reaction& reaction);

/// Maps trajectory samples to a physical profile (xi, phi), shifted so that
/// phi(anchor.first) = anchor.second.  For gamma > 0 the free boundary xi0 is
/// extrapolated from the Darcy local model phi^{gamma/(p-1)} ~ C (xi0 - xi)
/// and a terminal (xi0, 0) sample is appended.
WaveProfile reconstruct_profile(const Params& params, const Trajectory& trajectory,
                                std::pair<double, double> anchor);

/// Least-squares slope of log phi against log(xi0 - xi) over the window
/// xi in (xi0 - window, xi0); expected value (p-1)/gamma.
double darcy_exponent(const WaveProfile& profile, double window);

/// Compactly supported change-sign wave of type 2: peak a+delta (bistable)
/// or delta (monostable) at xi = 0, vanishing at xi0 < 0 < xi1.  Exists for
/// 0 <= c < c_* and delta above a c-dependent threshold.
WaveProfile change_sign_tw(const Params& params, const Reaction& reaction, double c,
                           double delta);

/// Minimal admissible delta for change_sign_tw at this speed, by bisection.
/// Throws DeltaTooSmall if no delta in the admissible range works (c >= c_*).
double detect_delta_c(const Params& params, const Reaction& reaction, double c,
                      double tol = 1e-4);

/// "0-to-a" wave (bistable, c >= c_*): free boundary at xi0 < 0, peak 1-eps
/// at xi = 0, decay toward the intermediate state a.  With reflect = true
/// returns the "a-to-0" mirror image.
WaveProfile zero_to_a_tw(const Params& params, const Reaction& reaction, double c, double eps,
                         bool reflect = false);

/// Increasing wave from a to 1 (monostable): phi(-inf) = a, phi(0) = 1,
/// phi' > 0; used as a super-solution barrier.
WaveProfile increasing_a_to_1_tw(const Params& params, const Reaction& reaction, double c);

/// Resamples a profile onto a uniform n-point grid with monotone cubic
/// interpolation (for export; the native grid is non-uniform).
WaveProfile resample_profile(const WaveProfile& profile, int n);

struct TailFit {
    double rate;   // expected lambda_*/m
    double power;  // the fixed |xi|^{2/p} correction used
};

/// Fits log phi - (2/p) log|xi| against xi on the far tail of the critical
/// pseudo-linear monostable profile.
TailFit tail_fit_gamma0(const Params& params, const Reaction& reaction,
                        const WaveProfile& profile);

}  // namespace dnlw

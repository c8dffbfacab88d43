#include <dnlw/phase_plane.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include <dnlw/errors.hpp>
#include <dnlw/numerics.hpp>

namespace dnlw {

namespace {

inline double pow_abs(double z, double e) {
    const double az = std::fabs(z);
    if (az == 0.0) return e > 0.0 ? 0.0 : (e == 0.0 ? 1.0 : 1e300);
    return std::pow(az, e);
}

// c Z - |Z|^p and its derivative
inline double iso_g(double c, double p, double Z) {
    return c * Z - pow_abs(Z, p);
}
inline double iso_dg(double c, double p, double Z) {
    return c - p * pow_abs(Z, p - 1.0) * (Z >= 0.0 ? 1.0 : -1.0);
}

}  // namespace

std::pair<double, double> trajectory_rhs(const Params& params, const Reaction& reaction,
                                         PhasePoint pt, double c) {
    const double p = params.p;
    const double zfac = pow_abs(pt.Z, p - 2.0) * pt.Z;
    const double dX = (p - 1.0) * pt.X * zfac;
    const double dZ = c * pt.Z - pow_abs(pt.Z, p) - f_mp(params, reaction, pt.X);
    return {dX, dZ};
}

std::vector<double> null_isocline(const Params& params, const Reaction& reaction, double c,
                                  double X) {
    if (!(c > 0.0)) throw DomainError("null_isocline: c must be positive");
    const double p = params.p;
    const double K = f_mp(params, reaction, X);
    std::vector<double> roots;

    auto solve_piece = [&](double lo, double hi) {
        roots.push_back(newton_bracketed([&](double Z) { return iso_g(c, p, Z) - K; },
                                         [&](double Z) { return iso_dg(c, p, Z); }, lo, hi));
    };

    if (K == 0.0) {
        roots.push_back(0.0);
        roots.push_back(std::pow(c, 1.0 / (p - 1.0)));
        return roots;
    }
    if (K < 0.0) {
        // one root on the increasing negative branch
        double lo = -std::max(1.0, std::pow(-K, 1.0 / p));
        while (iso_g(c, p, lo) > K) lo *= 2.0;
        solve_piece(lo, 0.0);
        // one root on the decreasing branch beyond c^{1/(p-1)}
        double r0 = std::pow(c, 1.0 / (p - 1.0));
        double hi = 2.0 * r0 + 1.0;
        while (iso_g(c, p, hi) > K) hi *= 2.0;
        solve_piece(r0, hi);
        std::sort(roots.begin(), roots.end());
        return roots;
    }
    // K > 0: roots only inside the positive hump
    const double Zm = std::pow(c / p, 1.0 / (p - 1.0));
    const double gmax = iso_g(c, p, Zm);
    if (K > gmax) return roots;
    if (K == gmax) {
        roots.push_back(Zm);
        return roots;
    }
    solve_piece(0.0, Zm);
    double hi = 2.0 * Zm + 1.0;
    while (iso_g(c, p, hi) > K) hi *= 2.0;
    solve_piece(Zm, hi);
    std::sort(roots.begin(), roots.end());
    return roots;
}

double c0_bound(const Params& params, const Reaction& reaction) {
    const auto [lo, hi] = reaction.positivity_interval();
    auto g = [&](double X) { return f_mp(params, reaction, X); };
    const double xa = lo + 1e-12, xb = hi - 1e-12;
    double xstar = golden_max(g, xa, xb, 1e-12);
    // Newton polish on the derivative of f_mp (interior maxima only)
    const double e = params.gamma / (params.p - 1.0) - 1.0;
    for (int it = 0; it < 8; ++it) {
        if (xstar <= xa || xstar >= xb) break;
        const double fv = reaction.f(xstar), fd = reaction.fprime(xstar);
        const double d1 = params.m * std::pow(xstar, e) * (e * fv / xstar + fd);
        const double h = 1e-6 * (1.0 + std::fabs(xstar));
        const double d2 = (params.m * std::pow(xstar + h, e) *
                               (e * reaction.f(xstar + h) / (xstar + h) + reaction.fprime(xstar + h)) -
                           d1) /
                          h;
        if (d2 == 0.0) break;
        const double xn = xstar - d1 / d2;
        if (!(xn > xa && xn < xb)) break;
        if (std::fabs(xn - xstar) < 1e-15) break;
        xstar = xn;
    }
    double F = std::max({g(xstar), g(xa), g(xb), g(lo == 0.0 ? 0.0 : xa)});
    if (!(F > 0.0)) throw DomainError("c0_bound: f_mp has no positive maximum");
    const double p = params.p;
    return p * std::pow(F / (p - 1.0), (p - 1.0) / p);
}

std::string to_string(CriticalPoint::Label label) {
    using L = CriticalPoint::Label;
    switch (label) {
        case L::O: return "O";
        case L::A: return "A";
        case L::S: return "S";
        case L::R_c: return "R_c";
        case L::R_lambda1: return "R_lambda1";
        case L::R_lambda2: return "R_lambda2";
        case L::R_lambdastar: return "R_lambdastar";
    }
    return "?";
}

std::vector<CriticalPoint> critical_points(const Params& params, const Reaction& reaction,
                                           double c) {
    if (!(c > 0.0)) throw DomainError("critical_points: c must be positive");
    using L = CriticalPoint::Label;
    std::vector<CriticalPoint> pts;
    pts.push_back({L::S, 1.0, 0.0});
    if (reaction.kind() != ReactionKind::Kpp) pts.push_back({L::A, reaction.a(), 0.0});

    const double p = params.p;
    if (params.gamma > 0.0) {
        pts.push_back({L::O, 0.0, 0.0});
        pts.push_back({L::R_c, 0.0, std::pow(c, 1.0 / (p - 1.0))});
        return pts;
    }
    // gamma = 0: the R-points solve c Z - |Z|^p = m f'(0)
    const double F0 = params.m * reaction.fprime(0.0);
    if (reaction.kind() == ReactionKind::TypeC) {
        // F0 < 0: one negative and one positive solution
        double lo = -std::max(1.0, std::pow(-F0, 1.0 / p));
        while (iso_g(c, p, lo) > F0) lo *= 2.0;
        const double l1 = newton_bracketed([&](double Z) { return iso_g(c, p, Z) - F0; },
                                           [&](double Z) { return iso_dg(c, p, Z); }, lo, 0.0);
        const double r0 = std::pow(c, 1.0 / (p - 1.0));
        double hi = 2.0 * r0 + 1.0;
        while (iso_g(c, p, hi) > F0) hi *= 2.0;
        const double l2 = newton_bracketed([&](double Z) { return iso_g(c, p, Z) - F0; },
                                           [&](double Z) { return iso_dg(c, p, Z); }, r0, hi);
        pts.push_back({L::R_lambda1, 0.0, l1});
        pts.push_back({L::R_lambda2, 0.0, l2});
        return pts;
    }
    // monostable: F0 > 0, R-points exist only for c >= c_* = p (m^2 f'(0))^{1/(mp)}
    const double Zm = std::pow(c / p, 1.0 / (p - 1.0));
    const double gmax = iso_g(c, p, Zm);
    const double rel = (gmax - F0) / (std::fabs(F0) + 1e-300);
    if (rel < -1e-12) return pts;  // c < c_*: no further critical points
    if (std::fabs(rel) <= 1e-12) {
        pts.push_back({L::R_lambdastar, 0.0, Zm});
        return pts;
    }
    const double l1 = newton_bracketed([&](double Z) { return iso_g(c, p, Z) - F0; },
                                       [&](double Z) { return iso_dg(c, p, Z); }, 0.0, Zm);
    double hi = 2.0 * Zm + 1.0;
    while (iso_g(c, p, hi) > F0) hi *= 2.0;
    const double l2 = newton_bracketed([&](double Z) { return iso_g(c, p, Z) - F0; },
                                       [&](double Z) { return iso_dg(c, p, Z); }, Zm, hi);
    pts.push_back({L::R_lambda1, 0.0, l1});
    pts.push_back({L::R_lambda2, 0.0, l2});
    return pts;
}

double fate_target(const Params& params, const Reaction& reaction, double c) {
    const double p = params.p;
    if (params.gamma > 0.0) return c > 0.0 ? std::pow(c, 1.0 / (p - 1.0)) : 0.0;
    if (reaction.kind() == ReactionKind::TypeC) {
        const double F0 = params.m * reaction.fprime(0.0);  // < 0
        const double r0 = c > 0.0 ? std::pow(c, 1.0 / (p - 1.0)) : 0.0;
        double hi = 2.0 * r0 + 1.0;
        while (iso_g(c, p, hi) > F0) hi *= 2.0;
        return newton_bracketed([&](double Z) { return iso_g(c, p, Z) - F0; },
                                [&](double Z) { return iso_dg(c, p, Z); }, r0, hi);
    }
    // monostable pseudo-linear: landing ordinate collapses to the bottleneck
    // center (c/p)^{1/(p-1)}, which at c_* equals lambda_*
    return std::pow(c / p, 1.0 / (p - 1.0));
}

PhasePoint launch_from_saddle(const Params& params, const Reaction& reaction, double c,
                              double eps) {
    if (!(eps > 1e-8 && eps < 1e-2)) {
        throw DomainError("launch_from_saddle: eps must lie in (1e-8, 1e-2)");
    }
    if (c < 0.0) throw DomainError("launch_from_saddle: c must be nonnegative");
    const double p = params.p;
    const double s = reaction.saddle_abscissa();
    const double fps = reaction.fprime(s);
    if (!(fps < 0.0)) throw DomainError("launch_from_saddle: saddle requires f'(s) < 0");
    const double e = params.gamma / (p - 1.0) - 1.0;
    const double kappa = -params.m * std::pow(s, e) * fps;  // > 0

    double lambda, sigma;
    if (p == 2.0) {
        // s lambda^2 + c lambda - kappa = 0, positive root
        lambda = (-c + std::sqrt(c * c + 4.0 * s * kappa)) / (2.0 * s);
        sigma = 1.0;
    } else if (p < 2.0) {
        lambda = std::pow(p * kappa / (2.0 * (p - 1.0) * s), 1.0 / p);
        sigma = 2.0 / p;
    } else {
        const double lam_sub = std::pow(p * kappa / (2.0 * (p - 1.0) * s), 1.0 / p);
        const double sig_sub = 2.0 / p;
        if (c > 0.0 && (kappa / c) * eps < lam_sub * std::pow(eps, sig_sub)) {
            lambda = kappa / c;
            sigma = 1.0;
        } else {
            lambda = lam_sub;  // c = 0 (or tiny): sublinear balance
            sigma = sig_sub;
        }
    }
    return {s - eps, lambda * std::pow(eps, sigma)};
}

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) for the tau-system with event location.
// ---------------------------------------------------------------------------

namespace {

struct Y3 {
    double X, Z, xi;
};

inline Y3 operator+(Y3 a, Y3 b) { return {a.X + b.X, a.Z + b.Z, a.xi + b.xi}; }
inline Y3 operator*(double s, Y3 a) { return {s * a.X, s * a.Z, s * a.xi}; }

struct HermiteStep {
    Y3 y0, y1, f0, f1;
    double h;
    Y3 at(double th) const {
        const double u = 1.0 - th;
        Y3 lin = u * y0 + th * y1;
        Y3 d = y1 + (-1.0 * y0);
        Y3 corr = (1.0 - 2.0 * th) * d + (th - 1.0) * h * f0 + th * h * f1;
        return lin + th * u * corr;
    }
};

}  // namespace

FlowResult flow_phase(const Params& params, const Reaction& reaction, double c,
                      TrajectorySample start, bool backward, const FlowEvents& ev) {
    const double p = params.p;
    const double gpm = params.gamma / (p - 1.0);
    const double dir = backward ? -1.0 : 1.0;

    auto rhs = [&](const Y3& y) -> Y3 {
        const double zfac = pow_abs(y.Z, p - 2.0);
        const double dX = (p - 1.0) * y.X * zfac * y.Z;
        const double dZ = c * y.Z - pow_abs(y.Z, p) - f_mp(params, reaction, y.X);
        const double dxi = -params.m * (p - 1.0) * pow_abs(y.X, gpm) * zfac;
        return {dir * dX, dir * dZ, dir * dxi};
    };

    FlowResult out;
    Y3 y{start.X, start.Z, start.xi};
    double sig = 0.0;  // internal nonnegative time; tau = start.tau + dir*sig
    Y3 k1 = rhs(y);

    auto push = [&](double s, const Y3& v) {
        if (ev.record) out.samples.push_back({start.tau + dir * s, v.X, v.Z, v.xi});
        out.last = {start.tau + dir * s, v.X, v.Z, v.xi};
    };
    push(0.0, y);

    // initial step heuristic
    double h = 1e300;
    {
        const double n0 = std::max({std::fabs(k1.X), std::fabs(k1.Z), std::fabs(k1.xi), 1e-12});
        h = std::min(1e-2, 1e-3 * (1.0 + std::fabs(y.Z)) / n0);
    }

    bool marked_done = !ev.mark_x_down.has_value();
    std::size_t steps = 0;
    while (true) {
        if (++steps > ev.max_steps) {
            throw StepFailure("flow_phase: step budget exhausted");
        }
        // Dormand-Prince 5(4)
        Y3 k2, k3, k4, k5, k6, k7, ynew;
        bool accepted = false;
        double err = 0.0;
        for (int attempt = 0; attempt < 64; ++attempt) {
            k2 = rhs(y + (h * 0.2) * k1);
            k3 = rhs(y + (3.0 / 40.0 * h) * k1 + (9.0 / 40.0 * h) * k2);
            k4 = rhs(y + (44.0 / 45.0 * h) * k1 + (-56.0 / 15.0 * h) * k2 + (32.0 / 9.0 * h) * k3);
            k5 = rhs(y + (19372.0 / 6561.0 * h) * k1 + (-25360.0 / 2187.0 * h) * k2 +
                     (64448.0 / 6561.0 * h) * k3 + (-212.0 / 729.0 * h) * k4);
            k6 = rhs(y + (9017.0 / 3168.0 * h) * k1 + (-355.0 / 33.0 * h) * k2 +
                     (46732.0 / 5247.0 * h) * k3 + (49.0 / 176.0 * h) * k4 +
                     (-5103.0 / 18656.0 * h) * k5);
            ynew = y + (35.0 / 384.0 * h) * k1 + (500.0 / 1113.0 * h) * k3 +
                   (125.0 / 192.0 * h) * k4 + (-2187.0 / 6784.0 * h) * k5 + (11.0 / 84.0 * h) * k6;
            k7 = rhs(ynew);
            const Y3 e = (71.0 / 57600.0 * h) * k1 + (-71.0 / 16695.0 * h) * k3 +
                         (71.0 / 1920.0 * h) * k4 + (-17253.0 / 339200.0 * h) * k5 +
                         (22.0 / 525.0 * h) * k6 + (-1.0 / 40.0 * h) * k7;
            auto comp = [&](double ei, double y0i, double y1i, double abs_tol) {
                const double sc = abs_tol + ev.rel_tol * std::max(std::fabs(y0i), std::fabs(y1i));
                return (ei / sc) * (ei / sc);
            };
            // X decays exponentially over hundreds of decades on the deep
            // runs; an absolute floor would stall it at the noise level, so
            // X is controlled in relative error only.
            err = std::sqrt((comp(e.X, y.X, ynew.X, 1e-280) + comp(e.Z, y.Z, ynew.Z, ev.abs_tol) +
                             comp(e.xi, y.xi, ynew.xi, ev.abs_tol)) /
                            3.0);
            if (!std::isfinite(err)) err = 1e6;
            if (err <= 1.0) {
                accepted = true;
                break;
            }
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-15 * (1.0 + sig)) {
                throw StepFailure("flow_phase: step size underflow");
            }
        }
        if (!accepted) throw StepFailure("flow_phase: repeated step rejection");

        const HermiteStep dense{y, ynew, k1, k7, h};

        // event scan on this step
        struct Hit {
            double theta;
            FlowStop stop;
            int priority;
        };
        std::optional<Hit> best;
        auto locate = [&](auto&& g, double g0, double g1) {
            // g crosses zero from >0 to <=0; bisect on the dense polynomial
            double lo = 0.0, hi = 1.0;
            (void)g0;
            (void)g1;
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (g(dense.at(mid)) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return hi;
        };
        auto consider = [&](bool active, double g0, double g1, auto&& g, FlowStop stop,
                            int priority) {
            if (!active || !(g0 > 0.0) || !(g1 <= 0.0)) return;
            const double th = locate(g, g0, g1);
            if (!best || th < best->theta - 1e-12 ||
                (std::fabs(th - best->theta) <= 1e-12 && priority < best->priority)) {
                best = Hit{th, stop, priority};
            }
        };

        consider(true, ev.z_hi - y.Z, ev.z_hi - ynew.Z,
                 [&](Y3 v) { return ev.z_hi - v.Z; }, FlowStop::ZHi, 0);
        consider(true, y.Z - ev.z_lo, ynew.Z - ev.z_lo,
                 [&](Y3 v) { return v.Z - ev.z_lo; }, FlowStop::ZLo, 0);
        const double zf = ev.z_zero_floor;
        consider(ev.stop_z_zero_down, y.Z - zf, ynew.Z - zf, [&](Y3 v) { return v.Z - zf; },
                 FlowStop::ZZeroDown, 1);
        consider(ev.stop_z_zero_up, -y.Z - zf, -ynew.Z - zf, [&](Y3 v) { return -v.Z - zf; },
                 FlowStop::ZZeroUp, 1);
        consider(true, y.X - ev.x_min, ynew.X - ev.x_min, [&](Y3 v) { return v.X - ev.x_min; },
                 FlowStop::XMin, 2);
        consider(true, ev.x_max - y.X, ev.x_max - ynew.X, [&](Y3 v) { return ev.x_max - v.X; },
                 FlowStop::XMax, 2);

        if (!marked_done) {
            const double m0 = y.X - *ev.mark_x_down, m1 = ynew.X - *ev.mark_x_down;
            if (m0 > 0.0 && m1 <= 0.0) {
                const double th = locate([&](Y3 v) { return v.X - *ev.mark_x_down; }, m0, m1);
                if (!best || th <= best->theta) {
                    const Y3 v = dense.at(th);
                    out.marked = TrajectorySample{start.tau + dir * (sig + th * h), v.X, v.Z, v.xi};
                    marked_done = true;
                }
            }
        }

        if (best) {
            const Y3 v = dense.at(best->theta);
            push(sig + best->theta * h, v);
            out.stop = best->stop;
            return out;
        }

        sig += h;
        y = ynew;
        k1 = k7;
        push(sig, y);

        if (ev.near_point) {
            const double d = std::hypot(y.X - ev.near_point->X, y.Z - ev.near_point->Z);
            if (d < ev.near_tol) {
                out.stop = FlowStop::NearPoint;
                return out;
            }
        }
        if (sig >= ev.tau_max) {
            out.stop = FlowStop::TauMax;
            return out;
        }
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
}

std::string to_string(TrajectoryFate fate) {
    switch (fate) {
        case TrajectoryFate::HitsAxisAboveTarget: return "HitsAxisAboveTarget";
        case TrajectoryFate::HitsAxisBelowTarget: return "HitsAxisBelowTarget";
        case TrajectoryFate::CrossesZZero: return "CrossesZZero";
        case TrajectoryFate::Diverged: return "Diverged";
        case TrajectoryFate::ReachedTarget: return "ReachedTarget";
    }
    return "?";
}

Trajectory integrate_Tc(const Params& params, const Reaction& reaction, double c, double X_min,
                        const IntegrateOptions& opts) {
    const double s = reaction.saddle_abscissa();
    if (!(X_min >= 0.0 && X_min < s - opts.eps)) {
        throw DomainError("integrate_Tc: need 0 <= X_min < saddle abscissa");
    }
    const PhasePoint y0 = launch_from_saddle(params, reaction, c, opts.eps);
    const double target = fate_target(params, reaction, c);
    const double rc = c > 0.0 ? std::pow(c, 1.0 / (params.p - 1.0)) : 0.0;
    const double zcap = opts.z_cap_factor * std::max({1.0, target, rc});

    FlowEvents ev;
    ev.x_min = X_min;
    ev.z_hi = zcap;
    ev.stop_z_zero_down = true;
    ev.record = opts.record;
    ev.max_steps = opts.max_steps;
    ev.abs_tol = opts.abs_tol;
    ev.rel_tol = opts.rel_tol;
    if (reaction.kind() == ReactionKind::TypeC) {
        // In the node regime (large c) the trajectory slides into the
        // backward-attracting interior point A(a,0) with Z -> 0+ but no
        // crossing; treat capture as reaching the axis below the target.
        ev.near_point = PhasePoint{reaction.a(), 0.0};
        ev.near_tol = 1e-4;
    }

    FlowResult fr = flow_phase(params, reaction, c, {0.0, y0.X, y0.Z, 0.0}, /*backward=*/true, ev);

    Trajectory out;
    out.samples = std::move(fr.samples);
    out.c = c;
    out.target = target;
    out.saddle = s;
    switch (fr.stop) {
        case FlowStop::ZHi: out.fate = TrajectoryFate::Diverged; break;
        case FlowStop::ZZeroDown: out.fate = TrajectoryFate::CrossesZZero; break;
        case FlowStop::NearPoint: out.fate = TrajectoryFate::HitsAxisBelowTarget; break;
        case FlowStop::XMin: {
            const double z = fr.last.Z;
            const double tol = opts.fate_tol * (1.0 + target);
            if (std::fabs(z - target) < tol) {
                out.fate = TrajectoryFate::ReachedTarget;
            } else if (z > target) {
                out.fate = TrajectoryFate::HitsAxisAboveTarget;
            } else {
                out.fate = TrajectoryFate::HitsAxisBelowTarget;
            }
            break;
        }
        default:
            throw StepFailure("integrate_Tc: unexpected stop condition");
    }
    if (!opts.record) {
        out.samples.clear();
        out.samples.push_back(fr.last);
    }
    return out;
}

double Trajectory::z_at(const Params& params, const Reaction& reaction, double X) const {
    if (samples.size() < 2) throw InsufficientData("Trajectory::z_at: too few samples");
    const bool dec = samples.front().X > samples.back().X;
    auto cmp = [&](const TrajectorySample& a, double x) { return dec ? (a.X > x) : (a.X < x); };
    auto it = std::lower_bound(samples.begin(), samples.end(), X, cmp);
    if (it == samples.begin() || it == samples.end()) {
        throw AnchorError("Trajectory::z_at: X outside sampled range");
    }
    const TrajectorySample& s1 = *it;
    const TrajectorySample& s0 = *(it - 1);
    const double dx = s1.X - s0.X;
    if (dx == 0.0) return s0.Z;
    auto slope = [&](const TrajectorySample& s) {
        const auto [dXt, dZt] = trajectory_rhs(params, reaction, {s.X, s.Z}, c);
        return dXt != 0.0 ? dZt / dXt : 0.0;
    };
    const double t = (X - s0.X) / dx;
    const double d0 = slope(s0), d1 = slope(s1);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * s0.Z + (t3 - 2 * t2 + t) * dx * d0 +
           (-2 * t3 + 3 * t2) * s1.Z + (t3 - t2) * dx * d1;
}

double explicit_c0_trajectory(const Params& params, const Reaction& reaction, double X) {
    if (!(X > 0.0 && X < 1.0)) {
        throw DomainError("explicit_c0_trajectory: X must lie in (0,1)");
    }
    const double m = params.m, p = params.p;
    const double total = weighted_integral(reaction, m, 1.0);
    if (!(total > 0.0)) {
        throw DomainError("explicit_c0_trajectory: weighted integral must be positive");
    }
    const double h = m * p / (p - 1.0) * total;
    const double bracket = h - m * p / (p - 1.0) * weighted_integral(reaction, m, X);
    if (bracket < 0.0) {
        throw DomainError("explicit_c0_trajectory: bracket negative");
    }
    return std::pow(X, -1.0 / (p - 1.0)) * std::pow(bracket, 1.0 / p);
}

}  // namespace dnlw

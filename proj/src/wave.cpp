#include <dnlw/wave.hpp>

#include <algorithm>
#include <cmath>

#include <dnlw/errors.hpp>
#include <dnlw/numerics.hpp>

namespace dnlw {

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::FiniteFB: return "FiniteFB";
        case ProfileKind::Positive: return "Positive";
        case ProfileKind::ChangeSign2: return "ChangeSign2";
        case ProfileKind::ZeroToA: return "ZeroToA";
        case ProfileKind::AToZero: return "AToZero";
        case ProfileKind::IncreasingAToOne: return "IncreasingAToOne";
    }
    return "?";
}

double WaveProfile::eval(double x) const {
    if (xi.empty()) throw InsufficientData("WaveProfile::eval: empty profile");
    if (x <= xi.front()) {
        const bool compact_left = kind == ProfileKind::ChangeSign2 ||
                                  kind == ProfileKind::ZeroToA ||
                                  kind == ProfileKind::AToZero;
        return compact_left && fb_left ? 0.0 : phi.front();
    }
    if (x >= xi.back()) {
        const bool compact_right = kind == ProfileKind::FiniteFB ||
                                   kind == ProfileKind::ChangeSign2 ||
                                   kind == ProfileKind::AToZero;
        return compact_right && fb_right ? 0.0 : phi.back();
    }
    auto it = std::upper_bound(xi.begin(), xi.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xi.begin()) - 1;
    const double t = (x - xi[i]) / (xi[i + 1] - xi[i]);
    return (1.0 - t) * phi[i] + t * phi[i + 1];
}

double WaveProfile::xi_at_level(double level) const {
    for (std::size_t k = xi.size(); k-- > 1;) {
        if (phi[k - 1] >= level && phi[k] < level) {
            const double t = (phi[k - 1] - level) / (phi[k - 1] - phi[k]);
            return xi[k - 1] + t * (xi[k] - xi[k - 1]);
        }
    }
    throw InsufficientData("WaveProfile::xi_at_level: level not crossed");
}

void WaveProfile::reflect() {
    std::reverse(xi.begin(), xi.end());
    std::reverse(phi.begin(), phi.end());
    for (auto& v : xi) v = -v;
    const auto l = fb_left, r = fb_right;
    fb_left = r ? std::optional<double>(-*r) : std::nullopt;
    fb_right = l ? std::optional<double>(-*l) : std::nullopt;
    if (peak) peak->first = -peak->first;
    if (first_touch_a) first_touch_a = -*first_touch_a;
    if (kind == ProfileKind::ZeroToA) {
        kind = ProfileKind::AToZero;
    } else if (kind == ProfileKind::AToZero) {
        kind = ProfileKind::ZeroToA;
    }
}

namespace {

bool fate_means_c_too_small(TrajectoryFate fate) {
    return fate == TrajectoryFate::Diverged || fate == TrajectoryFate::HitsAxisAboveTarget;
}

}  // namespace

double explicit_cstar_gamma0_cprime(const Params& params, const Reaction& reaction) {
    if (params.gamma != 0.0) {
        throw DomainError("explicit_cstar_gamma0_cprime: requires gamma = 0");
    }
    if (reaction.kind() == ReactionKind::TypeC) {
        throw DomainError("explicit_cstar_gamma0_cprime: requires a monostable reaction");
    }
    const double fp0 = reaction.fprime(0.0);
    return params.p * std::pow(params.m * params.m * fp0, 1.0 / (params.m * params.p));
}

double explicit_lambdastar_gamma0_cprime(const Params& params, const Reaction& reaction) {
    if (params.gamma != 0.0 || reaction.kind() == ReactionKind::TypeC) {
        throw DomainError("explicit_lambdastar_gamma0_cprime: requires gamma = 0, monostable");
    }
    return std::pow(params.m * params.m * reaction.fprime(0.0), 1.0 / params.p);
}

WaveProfile reconstruct_profile(const Params& params, const Trajectory& trajectory,
                                std::pair<double, double> anchor) {
    const auto& s = trajectory.samples;
    if (s.size() < 2) throw InsufficientData("reconstruct_profile: too few samples");

    const double x_lo = s.back().X, x_hi = s.front().X;
    const double X_ref = anchor.second;
    if (!(X_ref >= x_lo && X_ref <= x_hi)) {
        throw AnchorError("reconstruct_profile: anchor level outside trajectory range");
    }
    // xi(X_ref) by Hermite interpolation of xi as a function of X,
    // d(xi)/dX = -m X^{gamma/(p-1)-1}/Z
    const double e = params.gamma / (params.p - 1.0) - 1.0;
    auto dxi_dX = [&](const TrajectorySample& q) {
        return -params.m * std::pow(q.X, e) / q.Z;
    };
    auto it = std::lower_bound(s.begin(), s.end(), X_ref,
                               [](const TrajectorySample& q, double x) { return q.X > x; });
    double xi_ref;
    if (it == s.begin()) {
        xi_ref = s.front().xi;
    } else if (it == s.end()) {
        xi_ref = s.back().xi;
    } else {
        const auto &q1 = *it, &q0 = *(it - 1);
        const double dx = q1.X - q0.X;
        const double t = (X_ref - q0.X) / dx;
        const double t2 = t * t, t3 = t2 * t;
        xi_ref = (2 * t3 - 3 * t2 + 1) * q0.xi + (t3 - 2 * t2 + t) * dx * dxi_dX(q0) +
                 (-2 * t3 + 3 * t2) * q1.xi + (t3 - t2) * dx * dxi_dX(q1);
    }
    const double shift = anchor.first - xi_ref;

    WaveProfile prof;
    prof.c = trajectory.c;
    prof.xi.reserve(s.size() + 2);
    prof.phi.reserve(s.size() + 2);
    for (const auto& q : s) {
        prof.xi.push_back(q.xi + shift);
        prof.phi.push_back(q.X);
    }
    // pin the anchor as an explicit grid point so evaluation honors it exactly
    {
        auto pos = std::upper_bound(prof.xi.begin(), prof.xi.end(), anchor.first);
        const std::size_t idx = static_cast<std::size_t>(pos - prof.xi.begin());
        prof.xi.insert(pos, anchor.first);
        prof.phi.insert(prof.phi.begin() + idx, X_ref);
    }
    if (params.gamma > 0.0) {
        // Darcy local model: phi^{gamma/(p-1)} ~ gamma Z /(m(p-1)) (xi0 - xi)
        const double Zref = trajectory.target > 0.0 ? trajectory.target : s.back().Z;
        const double tail = params.m * (params.p - 1.0) *
                            std::pow(s.back().X, params.gamma / (params.p - 1.0)) /
                            (params.gamma * Zref);
        const double xi0 = prof.xi.back() + tail;
        prof.xi.push_back(xi0);
        prof.phi.push_back(0.0);
        prof.kind = ProfileKind::FiniteFB;
        prof.fb_right = xi0;
    } else {
        prof.kind = ProfileKind::Positive;
    }
    return prof;
}

WaveResult find_cstar(const Params& params, const Reaction& reaction, double tol,
                      std::optional<double> c_hint) {
    if (!(tol >= 1e-8)) throw DomainError("find_cstar: tol must be >= 1e-8");
    const bool bistable = reaction.kind() == ReactionKind::TypeC;

    double lo = 1e-6, hi;
    if (bistable) {
        hi = c0_bound(params, reaction);
    } else {
        const double fp0 = reaction.fprime(0.0);
        const double analog =
            params.p * std::pow(params.m * params.m * fp0, 1.0 / (params.m * params.p));
        hi = std::max(2.0 * analog, 4.0 * std::sqrt(params.m * fp0));
    }

    // The pseudo-linear monostable front is pulled: the speed selection happens
    // in a bottleneck sitting exactly on the Z-axis, so the fate run must go
    // extremely deep in X before trajectories on either side of c_* separate.
    const bool deep = params.pseudo_linear() && !bistable;
    const double x_min_fate = deep ? 1e-100 : 1e-5;

    IntegrateOptions fate_opts;
    fate_opts.record = false;

    auto too_small = [&](double c, double eps) {
        fate_opts.eps = eps;
        return fate_means_c_too_small(
            integrate_Tc(params, reaction, c, x_min_fate, fate_opts).fate);
    };

    double eps = 1e-5;
    if (!too_small(lo, eps)) {
        throw BracketError("find_cstar: no admissible bracket (weighted integral <= 0?)");
    }
    int expansions = 0;
    while (too_small(hi, eps)) {
        if (bistable || ++expansions > 8) {
            throw BracketError("find_cstar: upper endpoint does not bracket c_*");
        }
        hi *= 2.0;
    }
    if (c_hint && *c_hint > lo && *c_hint < hi) {
        (too_small(*c_hint, eps) ? lo : hi) = *c_hint;
    }

    int iterations = 0;
    auto bisect = [&](double l, double h, double launch_eps) {
        while (h - l > tol) {
            const double mid = 0.5 * (l + h);
            (too_small(mid, launch_eps) ? l : h) = mid;
            ++iterations;
        }
        return std::pair<double, double>{l, h};
    };

    // Richardson check on the launch offset: halving eps must not move the
    // recovered speed by more than 0.1 tol, otherwise refine and retry.  The
    // recheck restarts from a window around the first answer and falls back
    // to the full bracket if the window no longer brackets.  The deep
    // pseudo-linear runs carry a classification noise of ~1e-4 independent
    // of eps, so the loop is capped.
    auto [blo, bhi] = bisect(lo, hi, eps);
    double c1 = 0.5 * (blo + bhi);
    for (int round = 0; round < 2; ++round) {
        eps *= 0.5;
        const double window = std::max(50.0 * tol, deep ? 2e-3 : 0.0);
        double l0 = std::max(lo, c1 - window);
        double h0 = std::min(hi, c1 + window);
        if (!too_small(l0, eps) || too_small(h0, eps)) {
            l0 = lo;
            h0 = hi;
        }
        auto [l2, h2] = bisect(l0, h0, eps);
        const double c2 = 0.5 * (l2 + h2);
        const bool agree = std::fabs(c2 - c1) < std::max(0.1 * tol, deep ? 5e-4 : 0.0);
        blo = l2;
        bhi = h2;
        c1 = c2;
        if (agree) break;
    }

    WaveResult res;
    res.bracket = {blo, bhi};
    res.iterations = iterations;
    res.c_star = c1;
    res.m = params.m;
    res.p = params.p;
    res.gamma = params.gamma;
    res.a = reaction.a();
    res.kind = reaction.kind();

    IntegrateOptions prof_opts;
    const double x_min_prof = params.gamma > 0.0 ? 1e-5 : 1e-10;
    Trajectory traj = integrate_Tc(params, reaction, res.c_star, x_min_prof, prof_opts);
    const double anchor_level = 0.5 * reaction.saddle_abscissa();
    res.profile = reconstruct_profile(params, traj, {0.0, anchor_level});
    return res;
}

double darcy_exponent(const WaveProfile& profile, double window) {
    if (profile.kind != ProfileKind::FiniteFB || !profile.fb_right) {
        throw DomainError("darcy_exponent: profile must have a right free boundary");
    }
    const double xi0 = *profile.fb_right;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < profile.xi.size(); ++i) {
        const double d = xi0 - profile.xi[i];
        if (d > 0.0 && d < window && profile.phi[i] > 0.0) {
            lx.push_back(std::log(d));
            ly.push_back(std::log(profile.phi[i]));
        }
    }
    if (lx.size() < 20) throw WindowError("darcy_exponent: fewer than 20 samples in window");
    return ls_slope(lx, ly);
}

namespace {

// Both halves of a compact bump trajectory through (peak, 0).  Returns the
// samples ordered by increasing xi, or throws DeltaTooSmall.
struct BumpBranches {
    std::vector<TrajectorySample> left;   // xi < 0, ends prepended with the fb point
    std::vector<TrajectorySample> right;  // xi > 0
    double xi0, xi1;
};

BumpBranches integrate_bump(const Params& params, const Reaction& reaction, double c,
                            double peak, bool record) {
    const double p = params.p;
    const double eps_z = 1e-7;
    const double rc = c > 0.0 ? std::pow(c, 1.0 / (p - 1.0)) : 0.0;
    const double z_big = 1e4 * std::max(1.0, rc);

    auto tail_xi = [&](const TrajectorySample& q) {
        // remaining xi from (X,Z) to the free boundary along Z ~ K X^{-1/(p-1)}
        const double K = std::fabs(q.Z) * std::pow(q.X, 1.0 / (p - 1.0));
        return std::pow(q.X, params.m) / K;
    };

    FlowEvents ev;
    ev.record = record;
    ev.x_min = 1e-12;
    ev.z_hi = z_big;
    ev.z_lo = -z_big;
    ev.stop_z_zero_down = true;  // right branch must not re-touch Z = 0
    ev.z_zero_floor = 1e-10;     // also catches the asymptotic creep into O
    ev.tau_max = 1e5;            // slaved drift toward O means an infinite tail, not a bump
    FlowResult right = flow_phase(params, reaction, c, {0.0, peak, eps_z, 0.0},
                                  /*backward=*/true, ev);
    const bool right_ok =
        right.stop == FlowStop::ZHi ||
        (right.stop == FlowStop::XMin && right.last.Z > 10.0 * std::max(1.0, rc));
    if (!right_ok) {
        throw DeltaTooSmall("change_sign_tw: decaying branch lands instead of blowing up");
    }

    FlowEvents evl;
    evl.record = record;
    evl.x_min = 1e-12;
    evl.z_hi = z_big;
    evl.z_lo = -z_big;
    evl.stop_z_zero_up = true;  // re-entry into Z > 0 means delta below the threshold
    evl.z_zero_floor = 1e-10;
    evl.tau_max = 1e5;
    FlowResult left = flow_phase(params, reaction, c, {0.0, peak, -eps_z, 0.0},
                                 /*backward=*/false, evl);
    const bool left_ok =
        left.stop == FlowStop::ZLo ||
        (left.stop == FlowStop::XMin && left.last.Z < -10.0 * std::max(1.0, rc));
    if (!left_ok) {
        throw DeltaTooSmall("change_sign_tw: rising branch re-enters Z > 0");
    }

    BumpBranches out;
    out.xi1 = right.last.xi + tail_xi(right.last);
    out.xi0 = left.last.xi - tail_xi(left.last);
    out.left = std::move(left.samples);
    out.right = std::move(right.samples);
    return out;
}

WaveProfile assemble_bump(const Params& params, const Reaction& reaction, double c, double peak,
                          ProfileKind kind) {
    BumpBranches br = integrate_bump(params, reaction, c, peak, /*record=*/true);
    WaveProfile prof;
    prof.c = c;
    prof.kind = kind;
    prof.fb_left = br.xi0;
    prof.fb_right = br.xi1;
    prof.peak = {0.0, peak};
    prof.xi.reserve(br.left.size() + br.right.size() + 2);
    prof.phi.reserve(br.left.size() + br.right.size() + 2);
    prof.xi.push_back(br.xi0);
    prof.phi.push_back(0.0);
    for (auto it = br.left.rbegin(); it != br.left.rend(); ++it) {
        prof.xi.push_back(it->xi);
        prof.phi.push_back(it->X);
    }
    for (std::size_t i = 1; i < br.right.size(); ++i) {  // skip duplicate peak sample
        prof.xi.push_back(br.right[i].xi);
        prof.phi.push_back(br.right[i].X);
    }
    prof.xi.push_back(br.xi1);
    prof.phi.push_back(0.0);
    return prof;
}

}  // namespace

WaveProfile change_sign_tw(const Params& params, const Reaction& reaction, double c,
                           double delta) {
    if (c < 0.0) throw DomainError("change_sign_tw: c must be nonnegative");
    double peak;
    if (reaction.kind() == ReactionKind::TypeC) {
        if (!(delta > 0.0 && reaction.a() + delta < 1.0)) {
            throw DomainError("change_sign_tw: need 0 < delta < 1-a");
        }
        peak = reaction.a() + delta;
    } else {
        if (!(delta > 0.0 && delta < reaction.a())) {
            throw DomainError("change_sign_tw: need 0 < delta < a");
        }
        peak = delta;
    }
    return assemble_bump(params, reaction, c, peak, ProfileKind::ChangeSign2);
}

double detect_delta_c(const Params& params, const Reaction& reaction, double c, double tol) {
    const bool bistable = reaction.kind() == ReactionKind::TypeC;
    const double span = bistable ? 1.0 - reaction.a() : reaction.a();
    auto peak_of = [&](double d) { return bistable ? reaction.a() + d : d; };
    auto valid = [&](double d) {
        try {
            integrate_bump(params, reaction, c, peak_of(d), /*record=*/false);
            return true;
        } catch (const DeltaTooSmall&) {
            return false;
        }
    };
    double lo = 1e-6, hi = span - 1e-6;
    if (valid(lo)) return lo;
    if (!valid(hi)) {
        throw DeltaTooSmall("detect_delta_c: no admissible amplitude at this speed");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (valid(mid) ? hi : lo) = mid;
    }
    return hi;
}

WaveProfile zero_to_a_tw(const Params& params, const Reaction& reaction, double c, double eps,
                         bool reflect) {
    if (reaction.kind() != ReactionKind::TypeC) {
        throw DomainError("zero_to_a_tw: requires a bistable reaction");
    }
    if (!(eps > 0.0 && eps < 1.0 - reaction.a())) {
        throw DomainError("zero_to_a_tw: need 0 < eps < 1-a");
    }
    const double p = params.p;
    const double a = reaction.a();
    const double peak = 1.0 - eps;
    const double eps_z = 1e-7;
    const double rc = c > 0.0 ? std::pow(c, 1.0 / (p - 1.0)) : 0.0;
    const double z_big = 1e4 * std::max(1.0, rc);

    // decaying side: must be captured by the backward-attracting point A(a,0)
    FlowEvents ev;
    ev.z_hi = z_big;
    ev.z_lo = -z_big;
    ev.x_min = 1e-9;
    ev.near_point = PhasePoint{a, 0.0};
    ev.near_tol = 1e-4 * (1.0 + a);
    ev.mark_x_down = a;
    FlowResult right = flow_phase(params, reaction, c, {0.0, peak, eps_z, 0.0},
                                  /*backward=*/true, ev);
    if (right.stop != FlowStop::NearPoint) {
        throw SpeedTooLow("zero_to_a_tw: trajectory not captured by A (c < c_*?)");
    }

    // rising side: blows up toward the free boundary like the bump branches
    FlowEvents evl;
    evl.x_min = 1e-12;
    evl.z_hi = z_big;
    evl.z_lo = -z_big;
    evl.stop_z_zero_up = true;
    FlowResult left = flow_phase(params, reaction, c, {0.0, peak, -eps_z, 0.0},
                                 /*backward=*/false, evl);
    const bool left_ok =
        left.stop == FlowStop::ZLo ||
        (left.stop == FlowStop::XMin && left.last.Z < -10.0 * std::max(1.0, rc));
    if (!left_ok) {
        throw SpeedTooLow("zero_to_a_tw: rising branch fails (c < c_*?)");
    }
    const double K = std::fabs(left.last.Z) * std::pow(left.last.X, 1.0 / (p - 1.0));
    const double xi0 = left.last.xi - std::pow(left.last.X, params.m) / K;

    WaveProfile prof;
    prof.c = c;
    prof.kind = ProfileKind::ZeroToA;
    prof.fb_left = xi0;
    prof.peak = {0.0, peak};
    if (right.marked) {
        prof.first_touch_a = right.marked->xi;
    } else {
        prof.first_touch_a = right.last.xi;  // node regime: no finite touch, use capture point
    }
    prof.xi.push_back(xi0);
    prof.phi.push_back(0.0);
    for (auto it = left.samples.rbegin(); it != left.samples.rend(); ++it) {
        prof.xi.push_back(it->xi);
        prof.phi.push_back(it->X);
    }
    for (std::size_t i = 1; i < right.samples.size(); ++i) {
        prof.xi.push_back(right.samples[i].xi);
        prof.phi.push_back(right.samples[i].X);
    }
    if (reflect) prof.reflect();
    return prof;
}

WaveProfile increasing_a_to_1_tw(const Params& params, const Reaction& reaction, double c) {
    if (reaction.kind() != ReactionKind::TypeCPrime) {
        throw DomainError("increasing_a_to_1_tw: requires a monostable reaction");
    }
    if (!(c > 0.0)) throw DomainError("increasing_a_to_1_tw: c must be positive");
    const double eps = 1e-5;
    const PhasePoint lp = launch_from_saddle(params, reaction, c, eps);
    const double a = reaction.a();
    // mirror the incoming tangent across the saddle into [a,1] x (-inf,0]
    const double X0 = 2.0 * a - lp.X;  // a + eps
    const double Z0 = -lp.Z;

    FlowEvents ev;
    ev.x_max = 1.0;
    ev.z_lo = -1e6;
    ev.stop_z_zero_up = true;
    FlowResult fr = flow_phase(params, reaction, c, {0.0, X0, Z0, 0.0}, /*backward=*/true, ev);
    if (fr.stop != FlowStop::XMax) {
        throw StepFailure("increasing_a_to_1_tw: trajectory failed to reach X = 1");
    }
    WaveProfile prof;
    prof.c = c;
    prof.kind = ProfileKind::IncreasingAToOne;
    const double shift = -fr.samples.back().xi;  // phi(0) = 1
    prof.xi.reserve(fr.samples.size());
    prof.phi.reserve(fr.samples.size());
    for (const auto& q : fr.samples) {
        prof.xi.push_back(q.xi + shift);
        prof.phi.push_back(q.X);
    }
    prof.peak = {0.0, 1.0};
    return prof;
}

WaveProfile resample_profile(const WaveProfile& profile, int n) {
    if (n < 2) throw DomainError("resample_profile: need n >= 2");
    if (profile.xi.size() < 2) throw InsufficientData("resample_profile: empty profile");
    std::vector<double> xs, ys;
    xs.reserve(profile.xi.size());
    ys.reserve(profile.xi.size());
    for (std::size_t i = 0; i < profile.xi.size(); ++i) {
        if (xs.empty() || profile.xi[i] > xs.back()) {
            xs.push_back(profile.xi[i]);
            ys.push_back(profile.phi[i]);
        }
    }
    Pchip interp(std::move(xs), std::move(ys));
    WaveProfile out = profile;
    out.xi.resize(n);
    out.phi.resize(n);
    const double lo = interp.grid().front(), hi = interp.grid().back();
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        out.xi[i] = x;
        out.phi[i] = std::max(0.0, interp(x));
    }
    return out;
}

TailFit tail_fit_gamma0(const Params& params, const Reaction& reaction,
                        const WaveProfile& profile) {
    if (params.gamma != 0.0) throw DomainError("tail_fit_gamma0: requires gamma = 0");
    (void)reaction;
    double min_phi = 1e300;
    for (double ph : profile.phi) {
        if (ph > 0.0) min_phi = std::min(min_phi, ph);
    }
    if (profile.phi.empty() || min_phi >= 1e-4) {
        throw TailTooShort("tail_fit_gamma0: grid does not reach phi < 1e-4");
    }
    // fit over the deepest available decades: the slope carries an O(1/xi)
    // bias, so farther out is more accurate
    const double lo = std::max(2.0 * min_phi, 1e-10);
    const double hi = std::min(1e3 * lo, 1e-2);
    std::vector<double> xs, ys;
    const double power = 2.0 / params.p;
    for (std::size_t i = 0; i < profile.xi.size(); ++i) {
        const double ph = profile.phi[i];
        if (ph >= lo && ph <= hi && profile.xi[i] > 0.0) {
            xs.push_back(profile.xi[i]);
            ys.push_back(std::log(ph) - power * std::log(std::fabs(profile.xi[i])));
        }
    }
    if (xs.size() < 20) throw TailTooShort("tail_fit_gamma0: too few tail samples");
    return {-ls_slope(xs, ys), power};
}

}  // namespace dnlw

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <dnlw/phase_plane.hpp>

#include "oracles.hpp"

using namespace dnlw;

namespace {
const Params p22 = make_params(2, 2);
const Params p12 = make_params(1, 2);
const Params p13 = make_params(1, 3);
const Reaction rc3 = Reaction::cubic(ReactionKind::TypeC, 0.3);
const Reaction rp3 = Reaction::cubic(ReactionKind::TypeCPrime, 0.3);

double H_of(const Params& par, const Reaction& r, double X, double Z, double c) {
    auto [dX, dZ] = trajectory_rhs(par, r, {X, Z}, c);
    return dZ / dX;
}
}  // namespace

TEST_CASE("trajectory_rhs at critical and generic points") {
    auto [dx1, dz1] = trajectory_rhs(p22, rc3, {0.3, 0.0}, 1.0);
    CHECK(dx1 == 0.0);
    CHECK(dz1 == doctest::Approx(0.0).epsilon(1e-15));  // A(a,0)

    auto [dx2, dz2] = trajectory_rhs(p22, rc3, {0.0, 1.0}, 1.0);
    CHECK(dx2 == 0.0);
    CHECK(dz2 == doctest::Approx(0.0).epsilon(1e-15));  // R_c, c^{1/(p-1)} = 1

    // (p-1) X |Z|^{p-2} Z = 0.25 and c Z - |Z|^p - f_mp = 0.5 - 0.25 - 0.1
    auto [dx3, dz3] = trajectory_rhs(p22, rc3, {0.5, 0.5}, 1.0);
    CHECK(dx3 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(dz3 == doctest::Approx(0.15).epsilon(1e-13));
}

TEST_CASE("null isocline roots") {
    // X = a: roots are exactly {0, c^{1/(p-1)}}
    for (auto par : {p22, p12, p13}) {
        for (double c : {0.3, 1.0, 2.5}) {
            auto roots = null_isocline(par, rc3, c, 0.3);
            REQUIRE(roots.size() == 2);
            CHECK(std::fabs(roots[0]) < 1e-12);
            CHECK(roots[1] == doctest::Approx(std::pow(c, 1.0 / (par.p - 1.0))).epsilon(1e-12));
        }
    }
    // X = 1, TypeC: f(1) = 0 so roots {0, c}
    auto roots1 = null_isocline(p12, rc3, 0.7, 1.0);
    REQUIRE(roots1.size() == 2);
    CHECK(roots1[1] == doctest::Approx(0.7).epsilon(1e-12));

    // hump too low: no roots where f_mp exceeds max(cZ - Z^p)
    auto none = null_isocline(p12, rc3, 0.2, 0.7296);
    CHECK(none.empty());

    // all returned roots satisfy the defining equation
    for (double X : {0.05, 0.2, 0.45, 0.6, 0.9}) {
        for (double c : {0.4, 1.1}) {
            for (double z : null_isocline(p22, rc3, c, X)) {
                const double lhs = c * z - std::pow(std::fabs(z), p22.p);
                CHECK(lhs == doctest::Approx(f_mp(p22, rc3, X)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("c0_bound against brute-force maximization") {
    // (1,2): f_mp = f(X)/X = (1-X)(X-a); the maximum over (a,1) is exactly
    // 0.1225 at X = 0.65, giving c0 = 0.7
    CHECK(c0_bound(p12, rc3) == doctest::Approx(0.7).epsilon(1e-10));

    // (2,2): f_mp = 2 f; independent grid maximization
    const double F22 = oracles::grid_max([&](double x) { return 2.0 * rc3.f(x); }, 0.3, 1.0);
    CHECK(c0_bound(p22, rc3) == doctest::Approx(2.0 * std::sqrt(F22)).epsilon(1e-10));

    // homogeneity: scaling f by s scales c0 by s^{(p-1)/p}
    std::vector<double> u, fs;
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        u.push_back(x);
        fs.push_back(3.0 * rc3.f(x));
    }
    auto scaled = Reaction::tabulated(ReactionKind::TypeC, 0.3, u, fs);
    CHECK(c0_bound(p22, scaled) ==
          doctest::Approx(std::sqrt(3.0) * c0_bound(p22, rc3)).epsilon(1e-4));

    // monostable: the pseudo-linear maximum sits at the X = 0 endpoint
    CHECK(c0_bound(p12, rp3) == doctest::Approx(2.0 * std::sqrt(0.3)).epsilon(1e-9));
}

TEST_CASE("launch_from_saddle leading-order slopes") {
    const double cstar = oracles::classical_speed(0.3);
    const double eps = 1e-5;
    auto pt = launch_from_saddle(p12, rc3, cstar, eps);
    CHECK(pt.X == doctest::Approx(1.0 - eps));
    // quadratic balance at the exact classical speed gives lambda = 1/sqrt(2)
    CHECK(pt.Z / eps == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));

    // eps -> 0 collapses to the saddle
    auto pt2 = launch_from_saddle(p12, rc3, cstar, 1e-7);
    CHECK(pt2.Z < pt.Z);
    CHECK(pt2.Z == doctest::Approx(0.0).epsilon(1e-6));

    // p = 1.5 sublinear balance: lambda = (p kappa / (2(p-1)))^{1/p}
    auto p15 = make_params(2, 1.5);  // gamma = 0
    auto ptq = launch_from_saddle(p15, rc3, 0.2, eps);
    const double kappa = -p15.m * rc3.fprime(1.0);
    const double lam = std::pow(1.5 * kappa / (2.0 * 0.5), 1.0 / 1.5);
    CHECK(ptq.Z == doctest::Approx(lam * std::pow(eps, 2.0 / 1.5)).epsilon(1e-9));

    CHECK_THROWS_AS(launch_from_saddle(p12, rc3, 0.2, 1e-9), DomainError);
    CHECK_THROWS_AS(launch_from_saddle(p12, rc3, 0.2, 0.5), DomainError);
}

TEST_CASE("integrate_Tc fates around the classical critical speed") {
    auto low = integrate_Tc(p12, rc3, 0.1, 1e-4);
    CHECK((low.fate == TrajectoryFate::HitsAxisAboveTarget ||
           low.fate == TrajectoryFate::Diverged));

    auto high = integrate_Tc(p12, rc3, 0.5, 1e-4);
    CHECK((high.fate == TrajectoryFate::CrossesZZero ||
           high.fate == TrajectoryFate::HitsAxisBelowTarget));

    auto crit = integrate_Tc(p12, rc3, oracles::classical_speed(0.3), 1e-4);
    CHECK(crit.fate == TrajectoryFate::ReachedTarget);
    CHECK(crit.target == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(crit.samples.back().Z == doctest::Approx(crit.target).epsilon(1e-3));

    // tau strictly monotone along samples
    for (std::size_t i = 1; i < crit.samples.size(); ++i) {
        CHECK(crit.samples[i].tau < crit.samples[i - 1].tau);
        CHECK(crit.samples[i].xi > crit.samples[i - 1].xi);
    }
    // the (1,2) critical trajectory is the exact line Z = (1-X)/sqrt(2)
    for (const auto& s : crit.samples) {
        CHECK(s.Z == doctest::Approx((1.0 - s.X) / std::sqrt(2.0)).epsilon(1e-5));
    }
}

TEST_CASE("explicit c=0 trajectory: values and agreement with integration") {
    CHECK(explicit_c0_trajectory(p12, rc3, 0.5) ==
          doctest::Approx(0.5082650227325635).epsilon(1e-12));
    // X = 1 boundary: bracket vanishes by the choice k = h
    CHECK(explicit_c0_trajectory(p12, rc3, 1.0 - 1e-12) ==
          doctest::Approx(0.0).epsilon(1e-5));
    // divergence like X^{-1/(p-1)} toward X = 0
    CHECK(explicit_c0_trajectory(p12, rc3, 1e-4) > 100.0 * explicit_c0_trajectory(p12, rc3, 0.5));

    for (auto par : {p12, p22, p13}) {
        auto traj = integrate_Tc(par, rc3, 0.0, 1e-3);
        double worst = 0.0;
        int used = 0;
        for (const auto& s : traj.samples) {
            if (s.X >= 0.05 && s.X <= 0.95) {
                worst = std::max(worst,
                                 std::fabs(s.Z - explicit_c0_trajectory(par, rc3, s.X)));
                ++used;
            }
        }
        CHECK(used > 30);
        CHECK(worst < 1e-6);
    }
    // violating the positive-integral assumption is an error
    auto bad = Reaction::cubic(ReactionKind::TypeC, 0.7);
    CHECK_THROWS_AS(explicit_c0_trajectory(p12, bad, 0.5), DomainError);
}

TEST_CASE("reflection symmetry of H at c = 0") {
    for (double X : {0.1, 0.35, 0.6, 0.9}) {
        for (double Z : {0.2, 0.9, 2.0}) {
            CHECK(H_of(p22, rc3, X, -Z, 0.0) ==
                  doctest::Approx(-H_of(p22, rc3, X, Z, 0.0)).epsilon(1e-13));
            CHECK(H_of(p13, rc3, X, -Z, 0.0) ==
                  doctest::Approx(-H_of(p13, rc3, X, Z, 0.0)).epsilon(1e-13));
        }
    }
}

TEST_CASE("dH/dc positivity, and equality with 1/X at p = 2") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> ux(0.05, 1.0), uz(0.05, 2.0), uc(0.1, 1.5);
    for (int it = 0; it < 200; ++it) {
        const double X = ux(rng), Z = uz(rng), c = uc(rng);
        const double h = 1e-6;
        const double d22 = (H_of(p22, rc3, X, Z, c + h) - H_of(p22, rc3, X, Z, c - h)) / (2 * h);
        CHECK(d22 == doctest::Approx(1.0 / X).epsilon(1e-6));
        const double d13 = (H_of(p13, rc3, X, Z, c + h) - H_of(p13, rc3, X, Z, c - h)) / (2 * h);
        CHECK(d13 > 0.0);
        // general p: dH/dc = |Z|^{2-p} / ((p-1) X)
        CHECK(d13 ==
              doctest::Approx(std::pow(Z, -1.0) / (2.0 * X)).epsilon(1e-5));
    }
}

TEST_CASE("monotonicity of T_c in c on (a,1)") {
    std::vector<Trajectory> trajs;
    for (double c : {0.1, 0.2, 0.3}) {
        trajs.push_back(integrate_Tc(p22, rc3, c, 1e-3));
    }
    for (double X = 0.35; X <= 0.95; X += 0.025) {
        const double z1 = trajs[0].z_at(p22, rc3, X);
        const double z2 = trajs[1].z_at(p22, rc3, X);
        const double z3 = trajs[2].z_at(p22, rc3, X);
        CHECK(z2 < z1);
        CHECK(z3 < z2);
    }
}

TEST_CASE("blow-up trajectories follow Z ~ X^{-1/(p-1)}") {
    for (auto par : {p12, p22, p13}) {
        IntegrateOptions o;
        o.z_cap_factor = 3000.0;
        auto traj = integrate_Tc(par, rc3, 0.05, 1e-6, o);
        // p = 3 blows up like X^{-1/2}, too slowly to hit the cap by X_min
        REQUIRE((traj.fate == TrajectoryFate::Diverged ||
                 traj.fate == TrajectoryFate::HitsAxisAboveTarget));
        // local slope of log|Z| vs log X over the last stretch
        const auto& s = traj.samples;
        std::vector<double> lx, lz;
        for (const auto& q : s) {
            if (q.Z > 30.0) {
                lx.push_back(std::log(q.X));
                lz.push_back(std::log(q.Z));
            }
        }
        REQUIRE(lx.size() > 10);
        const double slope = ls_slope(lx, lz);
        CHECK(slope == doctest::Approx(-1.0 / (par.p - 1.0)).epsilon(0.05));
    }
}

TEST_CASE("critical points per range and kind") {
    auto pts = critical_points(p22, rc3, 4.0);
    bool found_rc = false;
    for (const auto& q : pts) {
        if (q.label == CriticalPoint::Label::R_c) {
            found_rc = true;
            CHECK(q.Z == doctest::Approx(4.0));  // c^{1/(p-1)} = c at p = 2
        }
    }
    CHECK(found_rc);
    CHECK(pts.size() == 4);  // O, A, S, R_c

    // pseudo-linear monostable: no R-points below the explicit critical speed
    auto below = critical_points(p12, rp3, 1.0);
    for (const auto& q : below) {
        CHECK(q.label != CriticalPoint::Label::R_lambda1);
        CHECK(q.label != CriticalPoint::Label::R_lambda2);
        CHECK(q.label != CriticalPoint::Label::R_lambdastar);
    }
    // at c_* exactly one tangency point at height lambda_*
    const double cs = 2.0 * std::sqrt(0.3);
    auto at = critical_points(p12, rp3, cs);
    int nstar = 0;
    for (const auto& q : at) {
        if (q.label == CriticalPoint::Label::R_lambdastar) {
            ++nstar;
            CHECK(q.Z == doctest::Approx(std::sqrt(0.3)).epsilon(1e-9));
        }
    }
    CHECK(nstar == 1);
    // above c_*: two R-points straddling lambda_*
    auto up = critical_points(p12, rp3, 1.3);
    double l1 = -1, l2 = -1;
    for (const auto& q : up) {
        if (q.label == CriticalPoint::Label::R_lambda1) l1 = q.Z;
        if (q.label == CriticalPoint::Label::R_lambda2) l2 = q.Z;
    }
    CHECK(l1 > 0.0);
    CHECK(l2 > l1);
    CHECK(l1 < std::sqrt(0.3));
    CHECK(l2 > std::sqrt(0.3));

    // pseudo-linear bistable: lambda_1 < 0 < c^m < lambda_2
    auto bis = critical_points(p12, rc3, 0.4);
    double b1 = 1, b2 = -1;
    for (const auto& q : bis) {
        if (q.label == CriticalPoint::Label::R_lambda1) b1 = q.Z;
        if (q.label == CriticalPoint::Label::R_lambda2) b2 = q.Z;
    }
    CHECK(b1 < 0.0);
    CHECK(b2 > 0.4);
}

TEST_CASE("fate_target matches the landing ordinates") {
    // gamma = 0 bistable: lambda_2 at the classical speed equals 1/sqrt(2)
    CHECK(fate_target(p12, rc3, oracles::classical_speed(0.3)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // gamma > 0: c^{1/(p-1)}
    CHECK(fate_target(p22, rc3, 0.49) == doctest::Approx(0.49));
    CHECK(fate_target(p13, rc3, 0.25) == doctest::Approx(0.5));
    // pseudo-linear monostable: bottleneck center (c/p)^{1/(p-1)}
    CHECK(fate_target(p12, rp3, 1.0) == doctest::Approx(0.5));
}

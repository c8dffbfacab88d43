#include <dnlw/pde.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <dnlw/errors.hpp>
#include <dnlw/numerics.hpp>
#include <dnlw/wave.hpp>

namespace dnlw {

namespace {

constexpr double kSigmaD = 0.4;
constexpr double kSigmaR = 0.1;
constexpr double kDmin = 1e-14;

inline double pow_u_m(double u, double m) {
    if (m == 1.0) return u;
    if (m == 2.0) return u * u;
    return std::pow(u, m);
}

inline double phi_p(double s, double p) {
    if (p == 2.0) return s;
    if (s == 0.0) return 0.0;
    return std::pow(std::fabs(s), p - 2.0) * s;
}

}  // namespace

Grid Grid::line(double L, double dx) {
    if (!(L > 0.0 && dx > 0.0 && dx < L)) throw DomainError("Grid::line: need 0 < dx < L");
    Grid g;
    g.kind = Kind::Line1D;
    g.N = 1;
    g.dx = dx;
    const std::size_t half = static_cast<std::size_t>(std::llround(L / dx));
    g.L = static_cast<double>(half) * dx;
    g.x.resize(2 * half);
    for (std::size_t i = 0; i < half; ++i) {
        const double pos = (static_cast<double>(i) + 0.5) * dx;
        g.x[half + i] = pos;
        g.x[half - 1 - i] = -pos;  // mirror-exact
    }
    return g;
}

Grid Grid::radial(int N, double L, double dx) {
    if (N < 2) throw DomainError("Grid::radial: N must be >= 2");
    if (!(L > 0.0 && dx > 0.0 && dx < L)) throw DomainError("Grid::radial: need 0 < dx < L");
    Grid g;
    g.kind = Kind::RadialND;
    g.N = N;
    g.dx = dx;
    const std::size_t n = static_cast<std::size_t>(std::llround(L / dx));
    g.L = static_cast<double>(n) * dx;
    g.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.x[i] = (static_cast<double>(i) + 0.5) * dx;
    return g;
}

double Grid::face(std::size_t j) const {
    if (kind == Kind::Line1D) return -L + static_cast<double>(j) * dx;
    return static_cast<double>(j) * dx;
}

double Grid::weight(std::size_t i) const {
    if (kind == Kind::Line1D) return 1.0;
    return std::pow(x[i], N - 1);
}

double total_mass(const Grid& grid, const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * grid.weight(i);
    return s * grid.dx;
}

PdeState make_state(const Grid& grid, std::vector<double> u0) {
    if (u0.size() != grid.size()) throw DomainError("make_state: size mismatch");
    for (double v : u0) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("make_state: u0 must lie in [0,1]");
    }
    PdeState st;
    st.u = std::move(u0);
    st.t = 0.0;
    st.mass = total_mass(grid, st.u);
    return st;
}

double dnl_flux(const Params& params, double u_left, double u_right, double dx) {
    const double dw = (pow_u_m(u_right, params.m) - pow_u_m(u_left, params.m)) / dx;
    return phi_p(dw, params.p);
}

namespace {

// Shared flux/diffusivity sweep.  Fluxes are per face (size n+1, zero at the
// boundary faces); returns the largest per-cell diffusion rate
// (beta_left + beta_right) / (2 w_i), directly comparable to dx^2/dt.
struct SweepBuffers {
    std::vector<double> w;     // u^m
    std::vector<double> flux;  // face fluxes, weighted by r^{N-1} for radial
};

double flux_sweep(const Params& params, const PdeState& st, const Grid& grid, SweepBuffers& buf) {
    const std::size_t n = st.u.size();
    const double m = params.m, p = params.p;
    buf.w.resize(n);
    buf.flux.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) buf.w[i] = pow_u_m(st.u[i], m);

    const bool radial = grid.kind == Grid::Kind::RadialND;
    double max_rate = 0.0;
    double beta_prev = 0.0;  // r^{N-1} D at the left face of cell i
    for (std::size_t j = 1; j < n; ++j) {
        const double dw = (buf.w[j] - buf.w[j - 1]) / grid.dx;
        const double zf = (p == 2.0) ? 1.0 : std::pow(std::fabs(dw), p - 2.0);
        double F = (p == 2.0) ? dw : ((dw == 0.0) ? 0.0 : zf * dw);
        const double ubar = std::max({st.u[j - 1], st.u[j], 1e-300});
        double D = m * (p - 1.0) * ((m == 1.0) ? 1.0 : std::pow(ubar, m - 1.0)) *
                   ((p == 2.0) ? 1.0 : ((dw == 0.0) ? 0.0 : zf));
        double geo = 1.0;
        if (radial) {
            const double rf = grid.face(j);
            const double wfac = std::pow(rf, grid.N - 1);
            F *= wfac;
            geo = wfac;
        }
        buf.flux[j] = F;
        const double beta = D * geo;
        const double wc = grid.weight(j - 1);
        const double rate = (beta_prev + beta) / (2.0 * wc);
        max_rate = std::max(max_rate, rate);
        beta_prev = beta;
    }
    if (n > 0) {
        const double rate = beta_prev / (2.0 * grid.weight(n - 1));
        max_rate = std::max(max_rate, rate);
    }
    return std::max(max_rate, kDmin);
}

}  // namespace

double stable_dt(const Params& params, const Reaction* reaction, const PdeState& state,
                 const Grid& grid, double dt_max) {
    SweepBuffers buf;
    const double max_rate = flux_sweep(params, state, grid, buf);
    double dt = kSigmaD * grid.dx * grid.dx / max_rate;
    if (reaction != nullptr) {
        const double lf = reaction->max_abs_fprime();
        if (lf > 0.0) dt = std::min(dt, kSigmaR / lf);
    }
    return std::min(dt, dt_max);
}

namespace {

void apply_update(const Reaction* reaction, PdeState& st, const Grid& grid, double dt,
                  const SweepBuffers& buf, double max_rate) {
    const std::size_t n = st.u.size();
    if (dt > kSigmaD * grid.dx * grid.dx / max_rate * (1.0 + 1e-9)) {
        throw CFLError("step: dt exceeds the diffusive stability bound");
    }
    if (reaction != nullptr) {
        const double lf = reaction->max_abs_fprime();
        if (lf > 0.0 && dt > kSigmaR / lf * (1.0 + 1e-9)) {
            throw CFLError("step: dt exceeds the reaction stability bound");
        }
    }
    const double r = dt / grid.dx;
    double lo = 0.0, hi = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double un = st.u[i] + r * (buf.flux[i + 1] - buf.flux[i]) / grid.weight(i);
        if (reaction != nullptr) un += dt * reaction->f(st.u[i]);
        st.u[i] = un;
        lo = std::min(lo, un);
        hi = std::max(hi, un);
    }
    if (lo < -1e-12 || hi > 1.0 + 1e-12) {
        throw Error("step: solution left [0,1]; comparison structure violated");
    }
    st.t += dt;
    st.mass = total_mass(grid, st.u);
}

}  // namespace

void step(const Params& params, const Reaction* reaction, PdeState& state, const Grid& grid,
          double dt) {
    if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
    SweepBuffers buf;
    const double max_rate = flux_sweep(params, state, grid, buf);
    apply_update(reaction, state, grid, dt, buf, max_rate);
}

// --- Barenblatt --------------------------------------------------------------

double barenblatt_alpha(const Params& params, int N) {
    return 1.0 / (params.gamma + params.p / static_cast<double>(N));
}

double barenblatt_k(const Params& params, int N) {
    const double alpha = barenblatt_alpha(params, N);
    const double beta = alpha / static_cast<double>(N);
    if (params.gamma > 0.0) {
        return params.gamma / (params.m * params.p) * std::pow(beta, 1.0 / (params.p - 1.0));
    }
    return (params.p - 1.0) * std::pow(params.p, -params.p / (params.p - 1.0)) / params.m;
}

double barenblatt_k_literature(const Params& params, int N) {
    const double alpha = barenblatt_alpha(params, N);
    const double beta = alpha / static_cast<double>(N);
    if (params.gamma > 0.0) {
        return params.gamma / params.p * std::pow(beta, 1.0 / (params.p - 1.0));
    }
    return (params.p - 1.0) * std::pow(params.p, -params.p / (params.p - 1.0));
}

double barenblatt(const Params& params, int N, double C, double x, double t) {
    if (!(t > 0.0)) throw DomainError("barenblatt: t must be positive");
    if (!(C > 0.0)) throw DomainError("barenblatt: C must be positive");
    const double alpha = barenblatt_alpha(params, N);
    const double k = barenblatt_k(params, N);
    const double xi = std::fabs(x) * std::pow(t, -alpha / static_cast<double>(N));
    const double q = params.p / (params.p - 1.0);
    if (params.gamma > 0.0) {
        const double bracket = C - k * std::pow(xi, q);
        if (bracket <= 0.0) return 0.0;
        return std::pow(t, -alpha) * std::pow(bracket, (params.p - 1.0) / params.gamma);
    }
    return std::pow(t, -alpha) * C * std::exp(-k * std::pow(xi, q));
}

// --- simulate ----------------------------------------------------------------

namespace {

double level_position(const Grid& grid, const std::vector<double>& u, double level) {
    for (std::size_t k = u.size(); k-- > 1;) {
        if (u[k - 1] >= level && u[k] < level) {
            const double t = (u[k - 1] - level) / (u[k - 1] - u[k]);
            return grid.x[k - 1] + t * (grid.x[k] - grid.x[k - 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double support_edge(const Grid& grid, const std::vector<double>& u, double u_tiny) {
    for (std::size_t k = u.size(); k-- > 0;) {
        if (u[k] > u_tiny) return grid.x[k];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SimulateResult simulate(const Params& params, const Reaction* reaction, const Grid& grid,
                        std::vector<double> u0, double t_end, const SimulateOptions& opts) {
    if (!(t_end > 0.0)) throw DomainError("simulate: t_end must be positive");
    SimulateResult out;
    out.state = make_state(grid, std::move(u0));
    out.trace.level = opts.level;

    SweepBuffers buf;
    const int ns = std::max(1, opts.trace_samples);
    int next_sample = 0;

    auto record = [&]() {
        out.trace.times.push_back(out.state.t);
        out.trace.positions.push_back(level_position(grid, out.state.u, opts.level));
        out.trace.support_edge.push_back(support_edge(grid, out.state.u, opts.u_tiny));
        if (opts.on_sample) opts.on_sample(out.state);
    };
    record();
    ++next_sample;

    while (out.state.t < t_end * (1.0 - 1e-12)) {
        const double max_rate = flux_sweep(params, out.state, grid, buf);
        double dt = kSigmaD * grid.dx * grid.dx / max_rate;
        if (reaction != nullptr) {
            const double lf = reaction->max_abs_fprime();
            if (lf > 0.0) dt = std::min(dt, kSigmaR / lf);
        }
        dt = std::min(dt, opts.dt_max);
        const double t_next = std::min(t_end, static_cast<double>(next_sample) * t_end / ns);
        dt = std::min(dt, t_next - out.state.t);
        apply_update(reaction, out.state, grid, dt, buf, max_rate);
        if (out.state.t >= t_next * (1.0 - 1e-12)) {
            record();
            ++next_sample;
        }
    }
    return out;
}

double measure_speed(const FrontTrace& trace, double window_frac, bool use_support_edge) {
    const auto& pos = use_support_edge ? trace.support_edge : trace.positions;
    if (trace.times.size() != pos.size() || trace.times.empty()) {
        throw InsufficientData("measure_speed: empty trace");
    }
    const double t1 = trace.times.back();
    const double t0 = t1 - window_frac * (t1 - trace.times.front());
    std::vector<double> ts, xs;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (trace.times[i] >= t0 && std::isfinite(pos[i])) {
            ts.push_back(trace.times[i]);
            xs.push_back(pos[i]);
        }
    }
    if (ts.size() < 10) throw InsufficientData("measure_speed: fewer than 10 samples in window");
    return ls_slope(ts, xs);
}

// --- threshold data ----------------------------------------------------------

std::vector<double> make_not_reacting_datum(const Params& params, const Reaction& reaction,
                                            const Grid& grid, double plateau_halfwidth) {
    if (reaction.kind() != ReactionKind::TypeC) {
        throw DomainError("make_not_reacting_datum: requires a bistable reaction");
    }
    const double a = reaction.a();
    const WaveResult wr = find_cstar(params, reaction, 1e-5);
    const WaveProfile w = zero_to_a_tw(params, reaction, wr.c_star, 0.05);
    const double xi0 = *w.fb_left;
    const double xi1 = *w.first_touch_a;

    // barrier clamp: 0 left of the free boundary, the wave inside,
    // a beyond the first touch of level a.
    auto clamped = [&](double x) {
        if (x <= xi0) return 0.0;
        if (x >= xi1) return a;
        return std::min(w.eval(x), a);
    };
    const double off = plateau_halfwidth + xi1;  // settle point sits at -plateau_halfwidth
    const double support = std::fabs(xi0 - xi1 - plateau_halfwidth);
    if (support > grid.L - 5.0) {
        throw GridTooSmall("make_not_reacting_datum: barrier support exceeds grid");
    }
    std::vector<double> u0(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x[i];
        u0[i] = 0.99 * std::min(clamped(x + off), clamped(-x + off));
    }
    return u0;
}

std::vector<double> make_reacting_datum(const Params& params, const Reaction& reaction,
                                        const Grid& grid, double c, double R) {
    const double span = reaction.kind() == ReactionKind::TypeC ? 1.0 - reaction.a()
                                                               : reaction.a();
    const double dc = detect_delta_c(params, reaction, c);
    const double delta = 0.5 * (dc + span);
    const WaveProfile cs = change_sign_tw(params, reaction, c, delta);
    const double xi1 = *cs.fb_right;

    std::vector<double> u0(grid.size());
    if (grid.kind == Grid::Kind::Line1D) {
        if (xi1 > grid.L - 5.0) throw GridTooSmall("make_reacting_datum: bump exceeds grid");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid.x[i];
            u0[i] = std::max(cs.eval(x), cs.eval(-x));
        }
    } else {
        if (R + xi1 > grid.L - 5.0) {
            throw GridTooSmall("make_reacting_datum: plateau + bump exceeds grid");
        }
        const double peak = cs.peak->second;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.x[i];
            u0[i] = r <= R ? peak : cs.eval(r - R);
        }
    }
    return u0;
}

SaturationReport saturation_experiment(const Params& params, const Reaction& reaction,
                                       const Grid& grid, std::vector<double> u0, double eps,
                                       double t_end) {
    if (reaction.kind() != ReactionKind::TypeCPrime) {
        throw DomainError("saturation_experiment: requires a monostable reaction");
    }
    SaturationReport rep;
    rep.eps = eps;
    rep.a = reaction.a();
    rep.t_end = t_end;
    rep.c_star = find_cstar(params, reaction, 1e-5).c_star;

    const double band = reaction.a() + eps;
    SimulateOptions opts;
    opts.level = 0.5 * reaction.a();
    opts.on_sample = [&](const PdeState& st) {
        if (!rep.band_reached) {
            const double mx = *std::max_element(st.u.begin(), st.u.end());
            if (mx <= band) {
                rep.band_reached = true;
                rep.t_eps = st.t;
            }
        }
    };
    SimulateResult sim = simulate(params, &reaction, grid, std::move(u0), t_end, opts);

    const double r_in = 0.8 * rep.c_star * t_end;
    const double r_out = 1.2 * rep.c_star * t_end;
    double inner = 0.0, outer = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = std::fabs(grid.x[i]);
        const double u = sim.state.u[i];
        mx = std::max(mx, u);
        if (r <= r_in) inner = std::max(inner, std::fabs(u - reaction.a()));
        if (r >= r_out) outer = std::max(outer, u);
    }
    rep.max_u_final = mx;
    rep.inner_dev_final = inner;
    rep.outer_max_final = outer;
    try {
        rep.front_speed = measure_speed(sim.trace);
    } catch (const InsufficientData&) {
        rep.front_speed = std::numeric_limits<double>::quiet_NaN();
    }
    rep.converged = rep.band_reached && inner <= eps;
    return rep;
}

}  // namespace dnlw

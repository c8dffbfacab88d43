// Command-line front end: critical speeds, phase-plane exports, PDE
// experiments and parameter sweeps with reproducible JSON configs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <dnlw/errors.hpp>
#include <dnlw/io.hpp>
#include <dnlw/pde.hpp>
#include <dnlw/phase_plane.hpp>
#include <dnlw/version.hpp>
#include <dnlw/wave.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dnlw;

namespace {

struct RunConfig {
    std::string command;
    double m = 1.0, p = 2.0, a = 0.3;
    std::string kind = "C";
    double tol = 1e-6;
    double c = -1.0;  // <0: not set
    double delta = -1.0;
    double eps = 0.05;
    double L = 150.0, dx = 0.05, t_end = 200.0;
    int N = 1;
    int jobs = 0;
    unsigned seed = 0;
    std::string out;
    std::string wave;           // profile: "", cs, zero-to-a, a-to-zero, a-to-1
    std::string u0 = "box";     // simulate: box | reacting | not-reacting | barenblatt
    double u0_height = 1.0;
    double u0_halfwidth = 10.0;
    double R = 20.0;            // reacting plateau radius (radial)
    double C = 1.0;             // barenblatt constant
    std::string mp_list;        // sweep: "m,p;m,p;..."
    std::string gamma_line;     // sweep: "theta:m_lo:m_hi:n"
    int resample = 0;           // profile: uniform export grid size (0 = native)
    int snapshots = 0;          // simulate: number of intermediate snapshots
};

void to_json(json& j, const RunConfig& cfg) {
    j = json{{"command", cfg.command}, {"m", cfg.m},       {"p", cfg.p},
             {"a", cfg.a},             {"kind", cfg.kind}, {"tol", cfg.tol},
             {"c", cfg.c},             {"delta", cfg.delta}, {"eps", cfg.eps},
             {"L", cfg.L},             {"dx", cfg.dx},     {"t_end", cfg.t_end},
             {"N", cfg.N},             {"jobs", cfg.jobs}, {"seed", cfg.seed},
             {"out", cfg.out},         {"wave", cfg.wave}, {"u0", cfg.u0},
             {"u0_height", cfg.u0_height},                 {"u0_halfwidth", cfg.u0_halfwidth},
             {"R", cfg.R},             {"C", cfg.C},       {"mp_list", cfg.mp_list},
             {"gamma_line", cfg.gamma_line},               {"resample", cfg.resample},
             {"snapshots", cfg.snapshots}};
}

void from_json(const json& j, RunConfig& cfg) {
    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) j.at(key).get_to(dst);
    };
    get("command", cfg.command);
    get("m", cfg.m);
    get("p", cfg.p);
    get("a", cfg.a);
    get("kind", cfg.kind);
    get("tol", cfg.tol);
    get("c", cfg.c);
    get("delta", cfg.delta);
    get("eps", cfg.eps);
    get("L", cfg.L);
    get("dx", cfg.dx);
    get("t_end", cfg.t_end);
    get("N", cfg.N);
    get("jobs", cfg.jobs);
    get("seed", cfg.seed);
    get("out", cfg.out);
    get("wave", cfg.wave);
    get("u0", cfg.u0);
    get("u0_height", cfg.u0_height);
    get("u0_halfwidth", cfg.u0_halfwidth);
    get("R", cfg.R);
    get("C", cfg.C);
    get("mp_list", cfg.mp_list);
    get("gamma_line", cfg.gamma_line);
    get("resample", cfg.resample);
    get("snapshots", cfg.snapshots);
}

ReactionKind parse_kind(const std::string& k) {
    if (k == "C") return ReactionKind::TypeC;
    if (k == "Cprime") return ReactionKind::TypeCPrime;
    throw DomainError("unknown reaction kind: " + k + " (expected C or Cprime)");
}

fs::path prepare_outdir(RunConfig& cfg, const std::string& argv_line) {
    if (cfg.out.empty()) {
        const char* env = std::getenv("DNLW_OUT");
        cfg.out = env != nullptr ? env : "dnlw_out";
    }
    fs::path dir(cfg.out);
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "resolved_config.json");
        os << json(cfg).dump(2) << '\n';
    }
    {
        std::ofstream os(dir / "provenance.txt");
        os << "dnlw " << kVersion << '\n' << argv_line << '\n';
    }
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    os << j.dump(2) << '\n';
}

std::vector<double> build_u0(const RunConfig& cfg, const Params& params,
                             const Reaction& reaction, const Grid& grid) {
    if (cfg.u0 == "box") {
        std::vector<double> u0(grid.size(), 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::fabs(grid.x[i]) <= cfg.u0_halfwidth) u0[i] = cfg.u0_height;
        }
        return u0;
    }
    if (cfg.u0 == "reacting") {
        const double cs = cfg.c > 0.0 ? cfg.c
                                      : 0.5 * find_cstar(params, reaction, 1e-5).c_star;
        return make_reacting_datum(params, reaction, grid, cs, cfg.R);
    }
    if (cfg.u0 == "not-reacting") {
        return make_not_reacting_datum(params, reaction, grid);
    }
    if (cfg.u0 == "barenblatt") {
        std::vector<double> u0(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            u0[i] = barenblatt(params, grid.N, cfg.C, grid.x[i], 1.0);
        }
        return u0;
    }
    throw DomainError("unknown u0 kind: " + cfg.u0);
}

// --- subcommands -------------------------------------------------------------

int cmd_cstar(RunConfig cfg, const std::string& argv_line) {
    const auto params = make_params(cfg.m, cfg.p);
    const auto reaction = Reaction::cubic(parse_kind(cfg.kind), cfg.a);
    const fs::path dir = prepare_outdir(cfg, argv_line);
    const WaveResult wr = find_cstar(params, reaction, cfg.tol,
                                     cfg.c > 0.0 ? std::optional<double>(cfg.c) : std::nullopt);
    write_json(dir / "cstar.json", wave_result_to_json(wr));
    write_profile_csv((dir / "profile.csv").string(), wr.profile);
    std::cout << format_double(wr.c_star) << '\n';
    return 0;
}

int cmd_trajectory(RunConfig cfg, const std::string& argv_line) {
    const auto params = make_params(cfg.m, cfg.p);
    const auto reaction = Reaction::cubic(parse_kind(cfg.kind), cfg.a);
    const fs::path dir = prepare_outdir(cfg, argv_line);
    const double c = cfg.c >= 0.0 ? cfg.c : 0.0;
    const Trajectory traj = integrate_Tc(params, reaction, c, 1e-4);
    write_trajectory_csv((dir / "trajectory.csv").string(), traj);
    std::cout << "fate " << to_string(traj.fate) << '\n';
    return 0;
}

int cmd_isocline(RunConfig cfg, const std::string& argv_line) {
    const auto params = make_params(cfg.m, cfg.p);
    const auto reaction = Reaction::cubic(parse_kind(cfg.kind), cfg.a);
    if (!(cfg.c > 0.0)) throw DomainError("isocline: --c must be positive");
    const fs::path dir = prepare_outdir(cfg, argv_line);
    write_isocline_csv((dir / "isocline.csv").string(), params, reaction, cfg.c, 200);
    return 0;
}

int cmd_profile(RunConfig cfg, const std::string& argv_line) {
    const auto params = make_params(cfg.m, cfg.p);
    const auto reaction = Reaction::cubic(parse_kind(cfg.kind), cfg.a);
    const fs::path dir = prepare_outdir(cfg, argv_line);
    WaveProfile prof;
    if (cfg.wave.empty() || cfg.wave == "critical") {
        prof = find_cstar(params, reaction, cfg.tol).profile;
    } else if (cfg.wave == "cs") {
        const double c = cfg.c >= 0.0 ? cfg.c : 0.0;
        const double delta =
            cfg.delta > 0.0 ? cfg.delta : detect_delta_c(params, reaction, c) + 0.05;
        prof = change_sign_tw(params, reaction, c, delta);
    } else if (cfg.wave == "zero-to-a" || cfg.wave == "a-to-zero") {
        const double c = cfg.c > 0.0 ? cfg.c : find_cstar(params, reaction, cfg.tol).c_star;
        prof = zero_to_a_tw(params, reaction, c, cfg.eps, cfg.wave == "a-to-zero");
    } else if (cfg.wave == "a-to-1") {
        const double c = cfg.c > 0.0 ? cfg.c : 1.0;
        prof = increasing_a_to_1_tw(params, reaction, c);
    } else {
        throw DomainError("unknown --wave: " + cfg.wave);
    }
    if (cfg.resample > 1) prof = resample_profile(prof, cfg.resample);
    write_profile_csv((dir / "profile.csv").string(), prof);
    json j{{"kind", to_string(prof.kind)}, {"c", prof.c}};
    if (prof.fb_left) j["fb_left"] = *prof.fb_left;
    if (prof.fb_right) j["fb_right"] = *prof.fb_right;
    write_json(dir / "wave.json", j);
    return 0;
}

int cmd_simulate(RunConfig cfg, const std::string& argv_line) {
    const auto params = make_params(cfg.m, cfg.p);
    const auto reaction = Reaction::cubic(parse_kind(cfg.kind), cfg.a);
    const fs::path dir = prepare_outdir(cfg, argv_line);
    const Grid grid = cfg.N >= 2 ? Grid::radial(cfg.N, cfg.L, cfg.dx) : Grid::line(cfg.L, cfg.dx);
    const auto u0 = build_u0(cfg, params, reaction, grid);
    SimulateOptions opts;
    int written = 0;
    if (cfg.snapshots > 0) {
        const double stride = cfg.t_end / cfg.snapshots;
        opts.on_sample = [&](const PdeState& st) {
            if (st.t + 1e-9 >= (written + 1) * stride && written < cfg.snapshots) {
                char name[64];
                std::snprintf(name, sizeof(name), "snapshot_%03d.csv", ++written);
                write_snapshot_csv((dir / name).string(), grid, st.u);
            }
        };
    }
    SimulateResult sim = simulate(params, &reaction, grid, u0, cfg.t_end, opts);
    write_snapshot_csv((dir / "snapshot.csv").string(), grid, sim.state.u);
    write_trace_csv((dir / "trace.csv").string(), sim.trace);
    json rep;
    rep["t_end"] = sim.state.t;
    rep["mass"] = sim.state.mass;
    try {
        rep["front_speed"] = measure_speed(sim.trace);
        rep["support_speed"] = measure_speed(sim.trace, 0.5, true);
    } catch (const InsufficientData&) {
        rep["front_speed"] = nullptr;
    }
    write_json(dir / "report.json", rep);
    return 0;
}

int cmd_threshold(RunConfig cfg, const std::string& argv_line) {
    const auto params = make_params(cfg.m, cfg.p);
    const auto reaction = Reaction::cubic(parse_kind(cfg.kind), cfg.a);
    const fs::path dir = prepare_outdir(cfg, argv_line);
    const Grid grid = Grid::line(cfg.L, cfg.dx);
    const WaveResult wr = find_cstar(params, reaction, 1e-5);

    json rep;
    rep["c_star"] = wr.c_star;

    {
        auto u0 = make_not_reacting_datum(params, reaction, grid);
        double t_ext = -1.0;
        SimulateOptions opts;
        opts.on_sample = [&](const PdeState& st) {
            if (t_ext < 0.0) {
                const double mx = *std::max_element(st.u.begin(), st.u.end());
                if (mx < 1e-3) t_ext = st.t;
            }
        };
        SimulateResult sim = simulate(params, &reaction, grid, u0, cfg.t_end, opts);
        write_trace_csv((dir / "notreacting_trace.csv").string(), sim.trace);
        rep["not_reacting"] = {{"extinct", t_ext >= 0.0},
                               {"extinction_time", t_ext >= 0.0 ? json(t_ext) : json(nullptr)}};
    }
    {
        auto u0 = make_reacting_datum(params, reaction, grid, 0.5 * wr.c_star, cfg.R);
        SimulateResult sim = simulate(params, &reaction, grid, u0, cfg.t_end);
        write_trace_csv((dir / "reacting_trace.csv").string(), sim.trace);
        double min_inner = 1.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::fabs(grid.x[i]) <= 20.0) min_inner = std::min(min_inner, sim.state.u[i]);
        }
        json r;
        r["min_u_inner20"] = min_inner;
        try {
            r["front_speed"] = measure_speed(sim.trace);
        } catch (const InsufficientData&) {
            r["front_speed"] = nullptr;
        }
        rep["reacting"] = r;
    }
    write_json(dir / "report.json", rep);
    std::cout << rep.dump(2) << '\n';
    return 0;
}

int cmd_saturate(RunConfig cfg, const std::string& argv_line) {
    const auto params = make_params(cfg.m, cfg.p);
    const auto reaction = Reaction::cubic(ReactionKind::TypeCPrime, cfg.a);
    const fs::path dir = prepare_outdir(cfg, argv_line);
    const Grid grid = cfg.N >= 2 ? Grid::radial(cfg.N, cfg.L, cfg.dx) : Grid::line(cfg.L, cfg.dx);
    std::vector<double> u0(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::fabs(grid.x[i]) <= cfg.u0_halfwidth) u0[i] = cfg.u0_height;
    }
    const SaturationReport rep =
        saturation_experiment(params, reaction, grid, u0, cfg.eps, cfg.t_end);
    write_json(dir / "report.json", saturation_report_to_json(rep));
    std::cout << saturation_report_to_json(rep).dump(2) << '\n';
    return 0;  // scientific negative is still exit 0
}

int cmd_barenblatt(RunConfig cfg, const std::string& argv_line) {
    const auto params = make_params(cfg.m, cfg.p);
    const fs::path dir = prepare_outdir(cfg, argv_line);
    json rep;
    rep["alpha"] = barenblatt_alpha(params, cfg.N);
    rep["k"] = barenblatt_k(params, cfg.N);
    rep["k_literature"] = barenblatt_k_literature(params, cfg.N);

    auto run_once = [&](double dx) {
        const Grid grid =
            cfg.N >= 2 ? Grid::radial(cfg.N, cfg.L, dx) : Grid::line(cfg.L, dx);
        std::vector<double> u0(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            u0[i] = barenblatt(params, grid.N, cfg.C, grid.x[i], 1.0);
        }
        SimulateOptions opts;
        opts.trace_samples = 8;
        SimulateResult sim = simulate(params, nullptr, grid, u0, 1.0, opts);  // t: 1 -> 2
        double err = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double ref = barenblatt(params, grid.N, cfg.C, grid.x[i], 2.0);
            err += std::fabs(sim.state.u[i] - ref) * grid.weight(i);
            norm += ref * grid.weight(i);
        }
        return err / norm;
    };
    const double e1 = run_once(cfg.dx);
    const double e2 = run_once(0.5 * cfg.dx);
    rep["table"] = json::array({{{"dx", cfg.dx}, {"rel_l1", e1}},
                                {{"dx", 0.5 * cfg.dx}, {"rel_l1", e2}}});
    rep["ratio"] = e1 / e2;
    write_json(dir / "report.json", rep);
    std::cout << rep.dump(2) << '\n';
    return 0;
}

int cmd_sweep(RunConfig cfg, const std::string& argv_line) {
    std::vector<std::pair<double, double>> cells;
    if (!cfg.gamma_line.empty()) {
        // theta:m_lo:m_hi:n  ->  p = 1 + theta/m along the line m(p-1) = theta
        double theta, mlo, mhi;
        int n;
        if (std::sscanf(cfg.gamma_line.c_str(), "%lf:%lf:%lf:%d", &theta, &mlo, &mhi, &n) != 4 ||
            n < 2) {
            throw DomainError("sweep: bad --gamma-line (theta:m_lo:m_hi:n)");
        }
        for (int i = 0; i < n; ++i) {
            const double m = mlo + (mhi - mlo) * i / (n - 1);
            cells.emplace_back(m, 1.0 + theta / m);
        }
    } else if (!cfg.mp_list.empty()) {
        std::stringstream ss(cfg.mp_list);
        std::string item;
        while (std::getline(ss, item, ';')) {
            double m, p;
            if (std::sscanf(item.c_str(), "%lf,%lf", &m, &p) != 2) {
                throw DomainError("sweep: bad --mp-list entry: " + item);
            }
            cells.emplace_back(m, p);
        }
    } else {
        cells.emplace_back(cfg.m, cfg.p);
    }
    if (cells.empty()) throw DomainError("sweep: no cells");

    const fs::path dir = prepare_outdir(cfg, argv_line);
    const ReactionKind kind = parse_kind(cfg.kind);

    struct Row {
        double m, p, gamma, c_star;
        bool ok;
        std::string error;
    };
    std::vector<Row> rows(cells.size());
    const int jobs = cfg.jobs > 0 ? cfg.jobs
                                  : static_cast<int>(std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            Row& r = rows[i];
            r.m = cells[i].first;
            r.p = cells[i].second;
            try {
                const auto params = make_params(r.m, r.p);
                const auto reaction = Reaction::cubic(kind, cfg.a);
                r.gamma = params.gamma;
                r.c_star = find_cstar(params, reaction, cfg.tol).c_star;
                r.ok = true;
            } catch (const std::exception& e) {
                r.gamma = r.m * (r.p - 1.0) - 1.0;
                r.c_star = 0.0;
                r.ok = false;
                r.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ofstream os(dir / "sweep.csv");
    os << "m,p,gamma,c_star,status,jump_flag\n";
    double prev = -1.0;
    bool any_flag = false;
    for (const auto& r : rows) {
        bool flag = false;
        if (r.ok && prev > 0.0) {
            flag = std::fabs(r.c_star - prev) / prev > 0.05;
            any_flag |= flag;
        }
        os << format_double(r.m) << ',' << format_double(r.p) << ',' << format_double(r.gamma)
           << ',' << (r.ok ? format_double(r.c_star) : std::string("nan")) << ','
           << (r.ok ? "ok" : "error") << ',' << (flag ? 1 : 0) << '\n';
        if (r.ok) prev = r.c_star;
    }
    std::cout << "cells " << rows.size() << " flagged_jumps " << (any_flag ? 1 : 0) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::string argv_line;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) argv_line += ' ';
        argv_line += argv[i];
    }

    CLI::App app{"Traveling waves and front propagation for reaction equations with "
                 "doubly nonlinear diffusion"};
    app.set_version_flag("--version", std::string("dnlw ") + kVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "load options from a resolved config JSON");
        sub->add_option("--m", cfg.m, "diffusion power m > 0");
        sub->add_option("--p", cfg.p, "gradient power p > 1");
        sub->add_option("--kind", cfg.kind, "reaction kind: C | Cprime");
        sub->add_option("--a", cfg.a, "intermediate zero in (0,1)");
        sub->add_option("--tol", cfg.tol, "bisection tolerance");
        sub->add_option("--c", cfg.c, "wave speed");
        sub->add_option("--delta", cfg.delta, "change-sign amplitude");
        sub->add_option("--eps", cfg.eps, "profile peak offset / saturation band");
        sub->add_option("--L", cfg.L, "domain half-length (line) or radius (radial)");
        sub->add_option("--dx", cfg.dx, "grid spacing");
        sub->add_option("--t-end", cfg.t_end, "final time");
        sub->add_option("--N", cfg.N, "space dimension (1 = line, >=2 radial)");
        sub->add_option("--jobs", cfg.jobs, "sweep worker count (0 = hardware)");
        sub->add_option("--seed", cfg.seed, "seed recorded in the config");
        sub->add_option("--out", cfg.out, "output directory (default env DNLW_OUT or dnlw_out)");
        sub->add_option("--wave", cfg.wave, "profile family: cs|zero-to-a|a-to-zero|a-to-1");
        sub->add_option("--u0", cfg.u0, "initial datum: box|reacting|not-reacting|barenblatt");
        sub->add_option("--u0-height", cfg.u0_height, "box datum height");
        sub->add_option("--u0-halfwidth", cfg.u0_halfwidth, "box datum half-width");
        sub->add_option("--R", cfg.R, "reacting plateau radius");
        sub->add_option("--C", cfg.C, "Barenblatt profile constant");
        sub->add_option("--mp-list", cfg.mp_list, "sweep cells: \"m,p;m,p;...\"");
        sub->add_option("--gamma-line", cfg.gamma_line, "sweep line theta:m_lo:m_hi:n");
        sub->add_option("--resample", cfg.resample, "profile export grid size (0 = native)");
        sub->add_option("--snapshots", cfg.snapshots, "intermediate snapshot count");
    };

    std::vector<std::pair<std::string, int (*)(RunConfig, const std::string&)>> commands = {
        {"cstar", cmd_cstar},         {"trajectory", cmd_trajectory},
        {"isocline", cmd_isocline},   {"profile", cmd_profile},
        {"simulate", cmd_simulate},   {"threshold", cmd_threshold},
        {"saturate", cmd_saturate},   {"barenblatt", cmd_barenblatt},
        {"sweep", cmd_sweep},
    };
    for (auto& [name, fn] : commands) {
        add_common(app.add_subcommand(name));
    }

    // pre-scan for --config so that explicit flags override the loaded file
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream is(argv[i + 1]);
            if (!is) {
                std::cerr << "error: cannot read config " << argv[i + 1] << '\n';
                return 2;
            }
            json j;
            is >> j;
            cfg = j.get<RunConfig>();
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [name, fn] : commands) {
            if (app.get_subcommand(name)->parsed()) {
                cfg.command = name;
                return fn(cfg, argv_line);
            }
        }
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 1;
    }
}

#include <dnlw/io.hpp>

#include <charconv>
#include <fstream>

#include <dnlw/errors.hpp>

namespace dnlw {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open for writing: " + path);
    return os;
}

void write_row(std::ofstream& os, std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
        if (!first) os << ',';
        os << format_double(v);
        first = false;
    }
    os << '\n';
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    auto os = open_out(path);
    os << "tau,X,Z,xi\n";
    for (const auto& s : traj.samples) write_row(os, {s.tau, s.X, s.Z, s.xi});
}

void write_profile_csv(const std::string& path, const WaveProfile& profile) {
    auto os = open_out(path);
    os << "xi,phi\n";
    for (std::size_t i = 0; i < profile.xi.size(); ++i) {
        write_row(os, {profile.xi[i], profile.phi[i]});
    }
}

void write_snapshot_csv(const std::string& path, const Grid& grid,
                        const std::vector<double>& u) {
    auto os = open_out(path);
    os << "x,u\n";
    for (std::size_t i = 0; i < u.size(); ++i) write_row(os, {grid.x[i], u[i]});
}

void write_trace_csv(const std::string& path, const FrontTrace& trace) {
    auto os = open_out(path);
    os << "t,front_pos,support_edge\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        write_row(os, {trace.times[i], trace.positions[i], trace.support_edge[i]});
    }
}

void write_isocline_csv(const std::string& path, const Params& params, const Reaction& reaction,
                        double c, int n_points) {
    auto os = open_out(path);
    os << "X,Z\n";
    for (int i = 0; i <= n_points; ++i) {
        const double X = static_cast<double>(i) / n_points;
        for (double z : null_isocline(params, reaction, c, X)) write_row(os, {X, z});
    }
}

nlohmann::json wave_result_to_json(const WaveResult& r) {
    nlohmann::json j;
    j["m"] = r.m;
    j["p"] = r.p;
    j["gamma"] = r.gamma;
    j["kind"] = to_string(r.kind);
    j["a"] = r.a;
    j["c_star"] = r.c_star;
    j["bracket"] = {r.bracket.first, r.bracket.second};
    j["iterations"] = r.iterations;
    j["profile_kind"] = to_string(r.profile.kind);
    if (r.profile.fb_left || r.profile.fb_right) {
        auto arr = nlohmann::json::array();
        if (r.profile.fb_left) arr.push_back(*r.profile.fb_left);
        if (r.profile.fb_right) arr.push_back(*r.profile.fb_right);
        j["fb"] = arr;
    } else {
        j["fb"] = nullptr;
    }
    return j;
}

nlohmann::json saturation_report_to_json(const SaturationReport& r) {
    nlohmann::json j;
    j["eps"] = r.eps;
    j["a"] = r.a;
    j["c_star"] = r.c_star;
    j["t_end"] = r.t_end;
    j["band_reached"] = r.band_reached;
    j["t_eps"] = r.band_reached ? nlohmann::json(r.t_eps) : nlohmann::json(nullptr);
    j["max_u_final"] = r.max_u_final;
    j["inner_dev_final"] = r.inner_dev_final;
    j["outer_max_final"] = r.outer_max_final;
    j["front_speed"] = r.front_speed;
    j["converged"] = r.converged;
    return j;
}

}  // namespace dnlw

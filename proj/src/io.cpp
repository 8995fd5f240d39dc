#include "dflow/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace dflow {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string scheme_to_string(DerivScheme s) {
    return s == DerivScheme::spectral ? "spectral" : "central_fd";
}

DerivScheme scheme_from_string(const std::string& s) {
    if (s == "spectral") return DerivScheme::spectral;
    if (s == "central_fd") return DerivScheme::central_fd;
    throw Error("unknown derivative scheme: " + s);
}

json grid_to_json(const GridSpec& g) {
    return json{{"num_points", g.num_points},
                {"domain_length", g.domain_length},
                {"scheme", scheme_to_string(g.scheme)},
                {"fd_order", g.fd_order}};
}

GridSpec grid_from_json(const json& j) {
    GridSpec g;
    g.num_points = j.at("num_points").get<int>();
    g.domain_length = j.at("domain_length").get<double>();
    g.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    g.fd_order = j.at("fd_order").get<int>();
    return g;
}

} // namespace

void write_curve(const std::string& path, const DiscreteCurve& u, const std::string& params_hash) {
    json header = {{"grid", grid_to_json(u.grid)},
                   {"time_stamp", u.time_stamp},
                   {"params_hash", params_hash}};
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("write_curve: cannot open " + path);
    f << header.dump() << '\n';
    static_assert(sizeof(double) == 8);
    for (const auto& p : u.points) {
        double triplet[3] = {p.x, p.y, p.z};
        f.write(reinterpret_cast<const char*>(triplet), sizeof(triplet));
    }
    if (!f) throw Error("write_curve: write failed for " + path);
}

DiscreteCurve read_curve(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("read_curve: cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw Error("read_curve: missing header line in " + path);
    json header;
    try {
        header = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error("read_curve: header parse error in " + path + ": " + e.what());
    }
    DiscreteCurve u;
    try {
        u.grid = grid_from_json(header.at("grid"));
        u.time_stamp = header.at("time_stamp").get<double>();
    } catch (const json::exception& e) {
        throw Error("read_curve: bad header in " + path + ": " + e.what());
    }
    u.grid.validate();
    u.points.resize(static_cast<size_t>(u.grid.num_points));
    size_t base = line.size() + 1;
    for (size_t i = 0; i < u.points.size(); ++i) {
        double triplet[3];
        f.read(reinterpret_cast<char*>(triplet), sizeof(triplet));
        if (!f)
            throw Error("read_curve: truncated payload in " + path + " at byte offset " +
                        std::to_string(base + 24 * i));
        u.points[i] = Vec3(triplet[0], triplet[1], triplet[2]);
    }
    return u;
}

void write_trajectory(const std::string& dir, const Trajectory& traj,
                      const std::string& params_hash) {
    fs::create_directories(dir);
    json meta = {
        {"params",
         {{"a", traj.params.a},
          {"b", traj.params.b},
          {"c", traj.params.c},
          {"epsilon", traj.params.epsilon},
          {"delta", traj.params.delta}}},
        {"stepper",
         {{"dt", traj.stepper.dt},
          {"method", traj.stepper.method == StepMethod::picard ? "picard" : "rk4"},
          {"snapshot_stride", traj.stepper.snapshot_stride}}},
        {"num_snapshots", traj.snapshots.size()},
        {"params_hash", params_hash},
    };
    std::ofstream(dir + "/metadata.json") << meta.dump(2) << '\n';

    char name[32];
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
        std::snprintf(name, sizeof(name), "snap_%06zu.curve", i);
        write_curve(dir + "/" + name, traj.snapshots[i], params_hash);
    }

    std::ofstream csv(dir + "/series.csv");
    csv << "t,defect_sup\n";
    for (const auto& r : traj.defect_series)
        csv << fmt_double(r.t) << ',' << fmt_double(r.defect_sup) << '\n';
}

void write_gauge_csv(const std::string& path, const std::vector<GaugeCsvRow>& rows, int k,
                     bool with_twin) {
    std::ofstream f(path);
    if (!f) throw Error("write_gauge_csv: cannot open " + path);
    f << "t,N_sq";
    for (int l = 0; l <= k; ++l) f << ",ladder_" << l;
    f << ",defect";
    if (with_twin) f << ",D_sq";
    f << '\n';
    for (const auto& r : rows) {
        f << fmt_double(r.t) << ',' << fmt_double(r.n_sq);
        for (double lv : r.ladder) f << ',' << fmt_double(lv);
        f << ',' << fmt_double(r.defect);
        if (with_twin) f << ',' << fmt_double(r.d_sq);
        f << '\n';
    }
}

void write_audit_csv(const std::string& path, const AuditReport& rep) {
    std::ofstream f(path);
    if (!f) throw Error("write_audit_csv: cannot open " + path);
    f << "t,norm_v_sq,dissipation,residual,C_min\n";
    for (const auto& r : rep.records)
        f << fmt_double(r.t) << ',' << fmt_double(r.norm_v_sq) << ','
          << fmt_double(r.dissipation) << ',' << fmt_double(r.residual) << ','
          << fmt_double(rep.c_min) << '\n';
}

} // namespace dflow

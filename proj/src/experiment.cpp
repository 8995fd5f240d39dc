#include "dflow/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace dflow {

using nlohmann::json;
namespace fs = std::filesystem;

ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "flow") return ExperimentKind::flow;
    if (s == "linear") return ExperimentKind::linear;
    if (s == "energy_audit") return ExperimentKind::energy_audit;
    if (s == "epsilon_sweep") return ExperimentKind::epsilon_sweep;
    if (s == "delta_sweep") return ExperimentKind::delta_sweep;
    if (s == "twin") return ExperimentKind::twin;
    if (s == "smoothing") return ExperimentKind::smoothing;
    if (s == "commutator") return ExperimentKind::commutator;
    throw Error("unknown experiment: " + s);
}

std::string experiment_to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::flow: return "flow";
        case ExperimentKind::linear: return "linear";
        case ExperimentKind::energy_audit: return "energy_audit";
        case ExperimentKind::epsilon_sweep: return "epsilon_sweep";
        case ExperimentKind::delta_sweep: return "delta_sweep";
        case ExperimentKind::twin: return "twin";
        case ExperimentKind::smoothing: return "smoothing";
        case ExperimentKind::commutator: return "commutator";
    }
    throw Error("unknown experiment kind");
}

namespace {

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw Error("config: " + path + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw Error("config: unknown key " +
                        (path.empty() ? it.key() : path + "." + it.key()));
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    check_keys(j, "", {"experiment", "grid", "flow_params", "gauge_params", "stepper",
                       "initial_data", "linear", "T", "output_dir", "seed"});
    if (j.contains("experiment"))
        c.experiment = experiment_from_string(j.at("experiment").get<std::string>());

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"num_points", "domain_length", "scheme", "fd_order"});
        get_if(g, "num_points", c.grid.num_points);
        get_if(g, "domain_length", c.grid.domain_length);
        if (g.contains("scheme")) {
            std::string s = g.at("scheme").get<std::string>();
            if (s == "spectral") c.grid.scheme = DerivScheme::spectral;
            else if (s == "central_fd") c.grid.scheme = DerivScheme::central_fd;
            else throw Error("config: grid.scheme must be spectral or central_fd");
        }
        get_if(g, "fd_order", c.grid.fd_order);
    }

    if (j.contains("flow_params")) {
        const json& f = j.at("flow_params");
        check_keys(f, "flow_params", {"preset", "a", "b", "c", "epsilon", "delta", "form"});
        if (f.contains("preset")) {
            c.preset = preset_from_string(f.at("preset").get<std::string>());
            if (c.preset != PresetName::custom) c.flow_params = flow_preset(c.preset);
        }
        get_if(f, "a", c.flow_params.a);
        get_if(f, "b", c.flow_params.b);
        get_if(f, "c", c.flow_params.c);
        get_if(f, "epsilon", c.flow_params.epsilon);
        get_if(f, "delta", c.flow_params.delta);
        if (f.contains("form")) {
            std::string s = f.at("form").get<std::string>();
            if (s == "intrinsic") c.flow_params.form = RhsForm::intrinsic;
            else if (s == "extrinsic_model") c.flow_params.form = RhsForm::extrinsic_model;
            else if (s == "embedded") c.flow_params.form = RhsForm::embedded;
            else throw Error("config: flow_params.form unknown: " + s);
        }
        // a = 0 is only meaningful through the schrodinger_map preset
        c.flow_params.validate(c.preset == PresetName::schrodinger_map);
    }

    if (j.contains("gauge_params")) {
        const json& g = j.at("gauge_params");
        check_keys(g, "gauge_params", {"M", "k"});
        get_if(g, "M", c.gauge_params.M);
        get_if(g, "k", c.gauge_params.k);
        c.gauge_params.validate();
    }

    if (j.contains("stepper")) {
        const json& s = j.at("stepper");
        check_keys(s, "stepper",
                   {"dt", "method", "picard_max_iters", "picard_tol", "projection_mode",
                    "threshold_tau", "linear_splitting", "c_cfl", "cfl_policy",
                    "snapshot_stride"});
        get_if(s, "dt", c.stepper.dt);
        if (s.contains("method")) {
            std::string m = s.at("method").get<std::string>();
            if (m == "rk4") c.stepper.method = StepMethod::rk4;
            else if (m == "picard") c.stepper.method = StepMethod::picard;
            else throw Error("config: stepper.method must be rk4 or picard");
        }
        get_if(s, "picard_max_iters", c.stepper.picard_max_iters);
        get_if(s, "picard_tol", c.stepper.picard_tol);
        if (s.contains("projection_mode")) {
            std::string m = s.at("projection_mode").get<std::string>();
            if (m == "every_step") c.stepper.projection_mode = ProjectionMode::every_step;
            else if (m == "never") c.stepper.projection_mode = ProjectionMode::never;
            else if (m == "threshold") c.stepper.projection_mode = ProjectionMode::threshold;
            else throw Error("config: stepper.projection_mode unknown: " + m);
        }
        get_if(s, "threshold_tau", c.stepper.threshold_tau);
        if (s.contains("linear_splitting")) {
            std::string m = s.at("linear_splitting").get<std::string>();
            if (m == "delta_only") c.stepper.linear_splitting = LinearSplitting::delta_only;
            else if (m == "delta_and_epsilon")
                c.stepper.linear_splitting = LinearSplitting::delta_and_epsilon;
            else throw Error("config: stepper.linear_splitting unknown: " + m);
        }
        get_if(s, "c_cfl", c.stepper.c_cfl);
        if (s.contains("cfl_policy")) {
            std::string m = s.at("cfl_policy").get<std::string>();
            if (m == "warn") c.stepper.cfl_policy = CflPolicy::warn;
            else if (m == "reject") c.stepper.cfl_policy = CflPolicy::reject;
            else throw Error("config: stepper.cfl_policy must be warn or reject");
        }
        get_if(s, "snapshot_stride", c.stepper.snapshot_stride);
        c.stepper.validate();
    }

    if (j.contains("initial_data")) {
        const json& d = j.at("initial_data");
        check_keys(d, "initial_data", {"kind", "amplitude", "mode", "width", "center", "path"});
        if (d.contains("kind"))
            c.initial_data.kind = initial_kind_from_string(d.at("kind").get<std::string>());
        get_if(d, "amplitude", c.initial_data.amplitude);
        get_if(d, "mode", c.initial_data.mode);
        get_if(d, "width", c.initial_data.width);
        get_if(d, "center", c.initial_data.center);
        get_if(d, "path", c.initial_data.path);
        c.initial_data.validate();
    }

    if (j.contains("linear")) {
        const json& l = j.at("linear");
        check_keys(l, "linear",
                   {"a", "beta_amp", "gamma_kind", "gamma_value", "phi_kind", "phi_scale",
                    "phi_width", "cutoff_radius", "carrier", "bandwidth", "T", "dt"});
        get_if(l, "a", c.linear.a);
        get_if(l, "beta_amp", c.linear.beta_amp);
        get_if(l, "gamma_kind", c.linear.gamma_kind);
        get_if(l, "gamma_value", c.linear.gamma_value);
        get_if(l, "phi_kind", c.linear.phi_kind);
        get_if(l, "phi_scale", c.linear.phi_scale);
        get_if(l, "phi_width", c.linear.phi_width);
        get_if(l, "cutoff_radius", c.linear.cutoff_radius);
        get_if(l, "carrier", c.linear.carrier);
        get_if(l, "bandwidth", c.linear.bandwidth);
        get_if(l, "T", c.linear.T);
        get_if(l, "dt", c.linear.dt);
    }

    get_if(j, "T", c.T);
    get_if(j, "output_dir", c.output_dir);
    get_if(j, "seed", c.seed);
    c.grid.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = experiment_to_string(c.experiment);
    j["grid"] = {{"num_points", c.grid.num_points},
                 {"domain_length", c.grid.domain_length},
                 {"scheme", c.grid.scheme == DerivScheme::spectral ? "spectral" : "central_fd"},
                 {"fd_order", c.grid.fd_order}};
    j["flow_params"] = {
        {"preset", preset_to_string(c.preset)},
        {"a", c.flow_params.a},
        {"b", c.flow_params.b},
        {"c", c.flow_params.c},
        {"epsilon", c.flow_params.epsilon},
        {"delta", c.flow_params.delta},
        {"form", c.flow_params.form == RhsForm::intrinsic
                     ? "intrinsic"
                     : c.flow_params.form == RhsForm::extrinsic_model ? "extrinsic_model"
                                                                      : "embedded"}};
    j["gauge_params"] = {{"M", c.gauge_params.M}, {"k", c.gauge_params.k}};
    j["stepper"] = {
        {"dt", c.stepper.dt},
        {"method", c.stepper.method == StepMethod::picard ? "picard" : "rk4"},
        {"picard_max_iters", c.stepper.picard_max_iters},
        {"picard_tol", c.stepper.picard_tol},
        {"projection_mode", c.stepper.projection_mode == ProjectionMode::every_step
                                ? "every_step"
                                : c.stepper.projection_mode == ProjectionMode::never
                                      ? "never"
                                      : "threshold"},
        {"threshold_tau", c.stepper.threshold_tau},
        {"linear_splitting", c.stepper.linear_splitting == LinearSplitting::delta_only
                                 ? "delta_only"
                                 : "delta_and_epsilon"},
        {"c_cfl", c.stepper.c_cfl},
        {"cfl_policy", c.stepper.cfl_policy == CflPolicy::warn ? "warn" : "reject"},
        {"snapshot_stride", c.stepper.snapshot_stride}};
    j["initial_data"] = {{"kind", initial_kind_to_string(c.initial_data.kind)},
                         {"amplitude", c.initial_data.amplitude},
                         {"mode", c.initial_data.mode},
                         {"width", c.initial_data.width},
                         {"center", c.initial_data.center},
                         {"path", c.initial_data.path}};
    j["linear"] = {{"a", c.linear.a},
                   {"beta_amp", c.linear.beta_amp},
                   {"gamma_kind", c.linear.gamma_kind},
                   {"gamma_value", c.linear.gamma_value},
                   {"phi_kind", c.linear.phi_kind},
                   {"phi_scale", c.linear.phi_scale},
                   {"phi_width", c.linear.phi_width},
                   {"cutoff_radius", c.linear.cutoff_radius},
                   {"carrier", c.linear.carrier},
                   {"bandwidth", c.linear.bandwidth},
                   {"T", c.linear.T},
                   {"dt", c.linear.dt}};
    j["T"] = c.T;
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    return j;
}

void apply_override(json& doc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw Error("--set expects key=value, got: " + assignment);
    std::string key = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    std::vector<std::string> parts;
    size_t pos = 0;
    while (true) {
        size_t dotp = key.find('.', pos);
        std::string part = key.substr(pos, dotp == std::string::npos ? dotp : dotp - pos);
        if (part.empty()) throw Error("--set: empty path component in " + key);
        parts.push_back(part);
        if (dotp == std::string::npos) break;
        pos = dotp + 1;
    }
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value; // bare string
    }
    json* node = &doc;
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = parsed;
}

LinearSpec build_linear_spec(const LinearConfig& lc, const GridSpec& g) {
    LinearSpec spec;
    spec.a = lc.a;
    spec.cutoff_radius = lc.cutoff_radius;
    RVec xs = g.nodes();
    double mid = 0.5 * g.domain_length;
    size_t n = xs.size();
    if (lc.phi_kind == "sech2") {
        spec.phi.resize(n);
        for (size_t i = 0; i < n; ++i) {
            double d = (xs[i] - mid) / lc.phi_width;
            double c = std::cosh(d);
            spec.phi[i] = lc.phi_scale / (c * c);
        }
    } else if (lc.phi_kind != "none") {
        throw Error("linear.phi_kind must be none or sech2");
    }
    if (lc.beta_amp != 0.0) {
        spec.beta.resize(n);
        for (size_t i = 0; i < n; ++i) {
            double d = (xs[i] - mid) / lc.phi_width;
            double c = std::cosh(d);
            spec.beta[i] = lc.beta_amp / (c * c);
        }
    }
    if (lc.gamma_kind == "real") {
        spec.gamma.assign(n, std::complex<double>(lc.gamma_value, 0.0));
    } else if (lc.gamma_kind == "match_phi") {
        if (spec.phi.empty()) throw Error("linear.gamma_kind match_phi needs a phi profile");
        spec.gamma.resize(n);
        for (size_t i = 0; i < n; ++i) spec.gamma[i] = std::complex<double>(0.0, spec.phi[i]);
    } else if (lc.gamma_kind == "constant_imag") {
        spec.gamma.assign(n, std::complex<double>(0.0, lc.gamma_value));
        spec.allow_hypothesis_violation = true;
    } else if (lc.gamma_kind != "none") {
        throw Error("linear.gamma_kind unknown: " + lc.gamma_kind);
    }
    return spec;
}

CVec wave_packet(const GridSpec& g, double carrier, double rel_width) {
    RVec xs = g.nodes();
    double mid = 0.5 * g.domain_length;
    double w = rel_width * g.domain_length;
    CVec u(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        double d = (xs[i] - mid) / w;
        u[i] = std::exp(std::complex<double>(-d * d, carrier * (xs[i] - mid)));
    }
    return u;
}

namespace {

std::vector<GaugeCsvRow> gauge_rows(const Sphere& s, const Trajectory& traj,
                                    const GaugeParams& gp, const FlowParams& p) {
    std::vector<GaugeCsvRow> rows;
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
        const DiscreteCurve& u = traj.snapshots[i];
        GaugeCsvRow row;
        row.t = u.time_stamp;
        EnergyLadder lad = sobolev_energies(s, u, gp.k);
        row.ladder = lad.levels;
        if (p.a != 0.0) {
            row.n_sq = gauge_energy(s, u, gp, p).energy_sq;
        } else {
            for (double lv : lad.levels) row.n_sq += lv;
        }
        double dmax = 0.0;
        for (const auto& q : u.points) dmax = std::max(dmax, std::abs(norm(q) - 1.0));
        row.defect = dmax;
        rows.push_back(row);
    }
    return rows;
}

void write_manifest(const ExperimentConfig& c, const std::string& status) {
    json j;
    json cfg = config_to_json(c);
    j["config"] = cfg;
    j["config_hash"] = fnv1a(cfg.dump());
    j["version"] = "0.1.0";
    j["status"] = status;
    auto now = std::chrono::system_clock::now().time_since_epoch();
    j["wallclock_unix"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count() / 1000.0;
    std::ofstream(c.output_dir + "/manifest.json") << j.dump(2) << '\n';
}

void run_flow(const ExperimentConfig& c) {
    Sphere s;
    DiscreteCurve u0 = make_initial(c.initial_data, c.grid);
    Trajectory traj = evolve(s, u0, c.T, c.stepper, c.flow_params);
    write_trajectory(c.output_dir + "/trajectory", traj);
    write_gauge_csv(c.output_dir + "/energies.csv",
                    gauge_rows(s, traj, c.gauge_params, c.flow_params), c.gauge_params.k,
                    false);
}

void run_linear(const ExperimentConfig& c) {
    LinearSpec spec = build_linear_spec(c.linear, c.grid);
    CVec u0 = wave_packet(c.grid, c.linear.carrier);
    LinearTrajectory traj = evolve_linear(c.grid, spec, u0, c.linear.T, c.linear.dt);
    std::ofstream csv(c.output_dir + "/norms.csv");
    csv << "t,norm_u\n";
    for (size_t i = 0; i < traj.times.size(); ++i)
        csv << fmt_double(traj.times[i]) << ',' << fmt_double(l2_norm(c.grid, traj.states[i]))
            << '\n';
    if (!spec.phi.empty())
        write_audit_csv(c.output_dir + "/audit.csv",
                        gauged_energy_audit(c.grid, spec, traj, true));
}

void run_energy_audit(const ExperimentConfig& c) {
    LinearSpec spec = build_linear_spec(c.linear, c.grid);
    CVec u0 = wave_packet(c.grid, c.linear.carrier);
    LinearTrajectory traj = evolve_linear(c.grid, spec, u0, c.linear.T, c.linear.dt);
    write_audit_csv(c.output_dir + "/audit_gauged.csv",
                    gauged_energy_audit(c.grid, spec, traj, true));
    write_audit_csv(c.output_dir + "/audit_ungauged.csv",
                    gauged_energy_audit(c.grid, spec, traj, false));
}

void run_epsilon_sweep(const ExperimentConfig& c) {
    Sphere s;
    DiscreteCurve u0 = make_initial(c.initial_data, c.grid);
    std::ofstream csv(c.output_dir + "/epsilon_sweep.csv");
    csv << "epsilon,C4_gauged,C_ungauged\n";
    for (double eps : {0.1, 0.05, 0.025}) {
        FlowParams p = c.flow_params;
        p.epsilon = eps;
        Trajectory traj = evolve(s, u0, c.T, c.stepper, p);
        RVec times, gauged, plain;
        for (const auto& snap : traj.snapshots) {
            GaugeReport rep = gauge_energy(s, snap, c.gauge_params, p);
            times.push_back(snap.time_stamp);
            gauged.push_back(std::sqrt(rep.energy_sq));
            double tot = 0.0;
            for (double lv : rep.ladder.levels) tot += lv;
            plain.push_back(std::sqrt(tot));
        }
        csv << fmt_double(eps) << ',' << fmt_double(growth_fit(times, gauged)) << ','
            << fmt_double(growth_fit(times, plain)) << '\n';
    }
}

void run_delta_sweep(const ExperimentConfig& c) {
    Sphere s;
    DiscreteCurve u0 = make_initial(c.initial_data, c.grid);
    StepperConfig cfg = c.stepper;
    cfg.projection_mode = ProjectionMode::never;
    cfg.method = StepMethod::picard;
    std::ofstream csv(c.output_dir + "/delta_sweep.csv");
    csv << "delta,eta,slope\n";
    double d0 = c.flow_params.delta > 0.0 ? c.flow_params.delta : 0.1;
    for (double mult : {1.0, 0.5, 0.25}) {
        FlowParams p = c.flow_params;
        p.delta = d0 * mult;
        Trajectory traj = evolve(s, u0, c.T, cfg, p);
        RVec times;
        for (const auto& snap : traj.snapshots) times.push_back(snap.time_stamp);
        for (double eta : {1.0, 0.25, 0.0625}) {
            RVec series = weighted_defect(s, traj, eta);
            // least-squares slope of the series against time
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            size_t n = times.size();
            for (size_t i = 0; i < n; ++i) {
                sx += times[i];
                sy += series[i];
                sxx += times[i] * times[i];
                sxy += times[i] * series[i];
            }
            double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            csv << fmt_double(p.delta) << ',' << fmt_double(eta) << ',' << fmt_double(slope)
                << '\n';
        }
    }
}

void run_twin(const ExperimentConfig& c) {
    Sphere s;
    InitialDataSpec base = c.initial_data;
    base.amplitude = 0.0;
    InitialDataSpec pert_h = c.initial_data;
    InitialDataSpec pert_h2 = c.initial_data;
    pert_h2.amplitude = 0.5 * pert_h.amplitude;
    DiscreteCurve u_base = make_initial(base, c.grid);
    Trajectory tb = evolve(s, u_base, c.T, c.stepper, c.flow_params);
    Trajectory th = evolve(s, make_initial(pert_h, c.grid), c.T, c.stepper, c.flow_params);
    Trajectory th2 = evolve(s, make_initial(pert_h2, c.grid), c.T, c.stepper, c.flow_params);
    RVec dh = twin_difference(s, th, tb, c.gauge_params, c.flow_params);
    RVec dh2 = twin_difference(s, th2, tb, c.gauge_params, c.flow_params);
    std::ofstream csv(c.output_dir + "/twin.csv");
    csv << "t,D_sq_h,D_sq_h2,ratio\n";
    for (size_t i = 0; i < dh.size(); ++i) {
        double r = dh2[i] > 0.0 ? dh[i] / dh2[i] : 0.0;
        csv << fmt_double(tb.snapshots[i].time_stamp) << ',' << fmt_double(dh[i]) << ','
            << fmt_double(dh2[i]) << ',' << fmt_double(r) << '\n';
    }
}

void run_smoothing(const ExperimentConfig& c) {
    json out;
    out["carriers"] = json::array();
    for (double carrier : {8.0, 16.0, 32.0, 64.0}) {
        SmoothingProbe probe;
        probe.grid = c.grid;
        probe.a = c.linear.a;
        probe.delta_w = 2.0;
        probe.carrier = carrier;
        probe.bandwidth = c.linear.bandwidth;
        probe.window = c.linear.T;
        probe.samples = 8;
        probe.seed = c.seed;
        SmoothingResult r = smoothing_ratio(probe);
        out["carriers"].push_back({{"carrier", carrier},
                                   {"weighted_ratio", r.weighted_ratio},
                                   {"unweighted_ratio", r.unweighted_ratio}});
    }
    std::ofstream(c.output_dir + "/smoothing.json") << out.dump(2) << '\n';
}

void run_commutator(const ExperimentConfig& c) {
    LinearSpec spec = build_linear_spec(c.linear, c.grid);
    json out;
    out["sweeps"] = json::array();
    GaugeOperator G = make_gauge(c.grid, spec);
    for (double rmult : {1.0, 2.0}) {
        LinearSpec s2 = spec;
        s2.cutoff_radius = G.cutoff_radius * rmult;
        GaugeOperator Gr = make_gauge(c.grid, s2);
        for (double carrier : {32.0, 64.0, 128.0}) {
            CVec v = wave_packet(c.grid, carrier);
            CommutatorProbe probe = commutator_residual(Gr, v);
            out["sweeps"].push_back({{"cutoff_radius", Gr.cutoff_radius},
                                     {"carrier", carrier},
                                     {"residual_l2", probe.residual_l2},
                                     {"residual_over_h1", probe.residual_over_h1},
                                     {"matched_term_l2", probe.matched_term_l2},
                                     {"norm_bound", Gr.norm_bound}});
        }
    }
    std::ofstream(c.output_dir + "/commutator.json") << out.dump(2) << '\n';
}

} // namespace

void run_experiment(const ExperimentConfig& c) {
    fs::create_directories(c.output_dir);
    try {
        switch (c.experiment) {
            case ExperimentKind::flow: run_flow(c); break;
            case ExperimentKind::linear: run_linear(c); break;
            case ExperimentKind::energy_audit: run_energy_audit(c); break;
            case ExperimentKind::epsilon_sweep: run_epsilon_sweep(c); break;
            case ExperimentKind::delta_sweep: run_delta_sweep(c); break;
            case ExperimentKind::twin: run_twin(c); break;
            case ExperimentKind::smoothing: run_smoothing(c); break;
            case ExperimentKind::commutator: run_commutator(c); break;
        }
    } catch (const std::exception& e) {
        write_manifest(c, std::string("error: ") + e.what());
        throw;
    }
    write_manifest(c, "ok");
}

} // namespace dflow

#include "dflow/stepper.hpp"

#include <cmath>
#include <cstdio>

namespace dflow {

void StepperConfig::validate() const {
    if (!(dt > 0.0)) throw Error("StepperConfig: dt must be positive");
    if (!(picard_tol > 0.0)) throw Error("StepperConfig: picard_tol must be positive");
    if (picard_max_iters < 1) throw Error("StepperConfig: picard_max_iters must be >= 1");
    if (snapshot_stride < 1) throw Error("StepperConfig: snapshot_stride must be >= 1");
}

RVec semigroup_apply(const GridSpec& g, const RVec& f, double t, const FlowParams& p,
                     LinearSplitting split) {
    if (t < 0.0) throw Error("semigroup_apply: t must be >= 0 (semigroup, not group)");
    bool fold_eps = (split == LinearSplitting::delta_and_epsilon);
    return apply_multiplier(g, f, [&](double xi) {
        double x2 = xi * xi;
        double e = -t * p.delta * x2 * x2 * x2;
        if (fold_eps) e -= t * p.epsilon * x2 * x2;
        return std::exp(e);
    });
}

std::vector<Vec3> semigroup_apply(const GridSpec& g, const std::vector<Vec3>& f, double t,
                                  const FlowParams& p, LinearSplitting split) {
    size_t n = f.size();
    RVec comp(n);
    std::vector<Vec3> out(n);
    for (int c = 0; c < 3; ++c) {
        for (size_t i = 0; i < n; ++i)
            comp[i] = (c == 0) ? f[i].x : (c == 1) ? f[i].y : f[i].z;
        RVec r = semigroup_apply(g, comp, t, p, split);
        for (size_t i = 0; i < n; ++i) {
            if (c == 0) out[i].x = r[i];
            else if (c == 1) out[i].y = r[i];
            else out[i].z = r[i];
        }
    }
    return out;
}

namespace {

DiscreteCurve project_points(const Sphere& s, const DiscreteCurve& u) {
    DiscreteCurve out = u;
    for (auto& q : out.points) q = s.tube_project(q);
    return out;
}

/// Forcing of the mild map: full regularized RHS at the projected point minus
/// the flat part the semigroup already integrates (evaluated at the projected
/// point too, so the defect is driven by the flat operator alone).
std::vector<Vec3> mild_forcing(const Sphere& s, const DiscreteCurve& raw, const FlowParams& p,
                               LinearSplitting split) {
    DiscreteCurve proj = project_points(s, raw);
    TangentField g = rhs_full(s, proj, p);
    std::vector<Vec3> d6 = vec_derivative(proj.grid, proj.points, 6);
    size_t n = g.vecs.size();
    std::vector<Vec3> out(n);
    bool fold_eps = (split == LinearSplitting::delta_and_epsilon);
    std::vector<Vec3> d4;
    if (fold_eps && p.epsilon > 0.0) d4 = vec_derivative(proj.grid, proj.points, 4);
    for (size_t i = 0; i < n; ++i) {
        out[i] = g.vecs[i] - p.delta * d6[i];
        if (fold_eps && p.epsilon > 0.0) out[i] += p.epsilon * d4[i];
    }
    return out;
}

void check_tube(const Sphere& s, const std::vector<Vec3>& pts, const char* who) {
    double rmin = 1.0 - s.descriptor().tube_radius;
    for (const auto& q : pts)
        if (norm(q) < rmin)
            throw Error(std::string(who) + ": state left tubular neighborhood, step rejected");
}

double sup_diff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, norm(a[i] - b[i]));
    return m;
}

} // namespace

DiscreteCurve picard_step(const Sphere& s, const DiscreteCurve& u, const StepperConfig& cfg,
                          const FlowParams& p) {
    bool eps_covered = (cfg.linear_splitting == LinearSplitting::delta_and_epsilon) &&
                       p.epsilon > 0.0;
    if (p.delta <= 0.0 && !eps_covered)
        throw Error("picard_step: needs delta > 0 (or epsilon folded into the semigroup); "
                    "use rk_step for the unregularized flow");

    double dt = cfg.dt;
    std::vector<Vec3> base =
        semigroup_apply(u.grid, u.points, dt, p, cfg.linear_splitting);
    std::vector<Vec3> f0 = mild_forcing(s, u, p, cfg.linear_splitting);
    std::vector<Vec3> sf0 = semigroup_apply(u.grid, f0, dt, p, cfg.linear_splitting);

    DiscreteCurve v = u;
    v.points = base;
    v.time_stamp = u.time_stamp + dt;
    std::vector<Vec3> prev;
    bool converged = false;
    for (int it = 0; it < cfg.picard_max_iters; ++it) {
        check_tube(s, v.points, "picard_step");
        std::vector<Vec3> fv = mild_forcing(s, v, p, cfg.linear_splitting);
        prev = v.points;
        for (size_t i = 0; i < v.points.size(); ++i)
            v.points[i] = base[i] + 0.5 * dt * (sf0[i] + fv[i]);
        if (sup_diff(v.points, prev) < cfg.picard_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw Error("picard_step: contraction failure, reduce dt");
    check_tube(s, v.points, "picard_step");
    return v;
}

DiscreteCurve rk_step(const Sphere& s, const DiscreteCurve& u, const StepperConfig& cfg,
                      const FlowParams& p) {
    double dx = u.grid.dx();
    double scale4 = std::max(std::abs(p.a), p.epsilon);
    // with a = epsilon = 0 the leading term is second order
    double dt_cfl = scale4 > 0.0 ? cfg.c_cfl * dx * dx * dx * dx / scale4
                                 : cfg.c_cfl * dx * dx / (1.0 + std::abs(p.b));
    double dt = cfg.dt;
    if (std::abs(dt) > dt_cfl) {
        if (cfg.cfl_policy == CflPolicy::reject)
            throw Error("rk_step: dt exceeds the stability heuristic, step rejected");
        std::fprintf(stderr, "rk_step: warning, dt=%g exceeds heuristic %g\n", dt, dt_cfl);
    }

    auto stage = [&](const std::vector<Vec3>& pts) {
        DiscreteCurve c = u;
        c.points = pts;
        for (auto& q : c.points) q = s.tube_project(q);
        return rhs_full(s, c, p).vecs;
    };

    size_t n = u.points.size();
    std::vector<Vec3> k1 = stage(u.points);
    std::vector<Vec3> tmp(n);
    for (size_t i = 0; i < n; ++i) tmp[i] = u.points[i] + 0.5 * dt * k1[i];
    std::vector<Vec3> k2 = stage(tmp);
    for (size_t i = 0; i < n; ++i) tmp[i] = u.points[i] + 0.5 * dt * k2[i];
    std::vector<Vec3> k3 = stage(tmp);
    for (size_t i = 0; i < n; ++i) tmp[i] = u.points[i] + dt * k3[i];
    std::vector<Vec3> k4 = stage(tmp);

    DiscreteCurve out = u;
    out.time_stamp = u.time_stamp + dt;
    for (size_t i = 0; i < n; ++i)
        out.points[i] =
            u.points[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check_tube(s, out.points, "rk_step");
    return out;
}

Trajectory evolve(const Sphere& s, const DiscreteCurve& u0, double T, const StepperConfig& cfg,
                  const FlowParams& p) {
    cfg.validate();
    p.validate(true);
    Trajectory traj;
    traj.params = p;
    traj.stepper = cfg;
    traj.snapshots.push_back(u0);
    traj.defect_series.push_back({u0.time_stamp, 0.0});
    if (T == 0.0) return traj;

    bool backward = T < 0.0;
    if (backward && (p.epsilon > 0.0 || p.delta > 0.0))
        throw Error("evolve: negative time requires epsilon = delta = 0 "
                    "(dissipative semigroup is not invertible)");
    if (backward && cfg.method == StepMethod::picard)
        throw Error("evolve: negative time supported by the explicit stepper only");

    double total = std::abs(T);
    long nsteps = static_cast<long>(std::ceil(total / cfg.dt - 1e-12));
    DiscreteCurve u = u0;
    double done = 0.0;
    for (long step = 0; step < nsteps; ++step) {
        double h = std::min(cfg.dt, total - done);
        StepperConfig scfg = cfg;
        scfg.dt = backward ? -h : h;
        DiscreteCurve next;
        try {
            next = (cfg.method == StepMethod::picard) ? picard_step(s, u, scfg, p)
                                                      : rk_step(s, u, scfg, p);
        } catch (const Error& e) {
            throw Error("evolve: step " + std::to_string(step) + " failed: " + e.what());
        }
        done += h;

        double dmax = 0.0;
        for (const auto& q : next.points)
            dmax = std::max(dmax, std::abs(norm(q) - 1.0));
        traj.defect_series.push_back({next.time_stamp, dmax});

        bool project = cfg.projection_mode == ProjectionMode::every_step ||
                       (cfg.projection_mode == ProjectionMode::threshold &&
                        dmax > cfg.threshold_tau);
        if (project) next = project_points(s, next);
        u = next;
        if ((step + 1) % cfg.snapshot_stride == 0 || step + 1 == nsteps)
            traj.snapshots.push_back(u);
    }
    return traj;
}

RVec weighted_defect(const Sphere& s, const Trajectory& traj, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw Error("weighted_defect: eta must lie in (0, 1]");
    RVec out;
    out.reserve(traj.snapshots.size());
    for (const auto& snap : traj.snapshots) {
        const GridSpec& g = snap.grid;
        RVec xs = g.nodes();
        double mid = 0.5 * g.domain_length;
        double acc = 0.0;
        for (size_t i = 0; i < snap.points.size(); ++i) {
            Vec3 rho = s.constraint_defect(snap.points[i]);
            double d = xs[i] - mid;
            acc += std::exp(-eta * d * d) * dot(rho, rho);
        }
        out.push_back(acc * g.dx());
    }
    return out;
}

} // namespace dflow

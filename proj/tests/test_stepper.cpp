#include "dflow/stepper.hpp"

#include "dflow/initial.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace dflow;

namespace {

DiscreteCurve great_circle(int n = 32) {
    GridSpec g;
    g.num_points = n;
    InitialDataSpec spec;
    return make_initial(spec, g);
}

DiscreteCurve constant_curve(int n = 32) {
    GridSpec g;
    g.num_points = n;
    DiscreteCurve u;
    u.grid = g;
    u.points.assign(static_cast<size_t>(n), Vec3(1, 0, 0));
    return u;
}

} // namespace

TEST_CASE("semigroup: identity at t=0, exact single-mode decay, rejects t<0") {
    GridSpec g;
    g.num_points = 64;
    FlowParams p;
    p.delta = 1.0;
    p.epsilon = 0.3;
    RVec xs = g.nodes();
    RVec f(xs.size());
    int xi0 = 3;
    for (size_t i = 0; i < xs.size(); ++i) f[i] = std::cos(xi0 * xs[i]);

    RVec id = semigroup_apply(g, f, 0.0, p);
    for (size_t i = 0; i < f.size(); ++i) CHECK(std::abs(id[i] - f[i]) <= 1e-14);

    double t = 0.1;
    RVec d = semigroup_apply(g, f, t, p);
    double factor = std::exp(-t * std::pow(double(xi0), 6.0));
    for (size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(d[i] - factor * f[i]) <= 1e-12);

    RVec de = semigroup_apply(g, f, t, p, LinearSplitting::delta_and_epsilon);
    double factor2 = factor * std::exp(-t * p.epsilon * std::pow(double(xi0), 4.0));
    for (size_t i = 0; i < f.size(); ++i)
        CHECK(std::abs(de[i] - factor2 * f[i]) <= 1e-12);

    CHECK_THROWS_AS(semigroup_apply(g, f, -0.1, p), Error);
}

TEST_CASE("semigroup is norm-nonincreasing on random data") {
    GridSpec g;
    g.num_points = 64;
    FlowParams p;
    p.delta = 0.5;
    Rng rng(5);
    RVec f(64);
    for (auto& v : f) v = rng.normal();
    double n0 = l2_norm(g, f);
    double prev = n0;
    for (double t : {0.001, 0.01, 0.1}) {
        double nt = l2_norm(g, semigroup_apply(g, f, t, p));
        CHECK(nt <= prev * (1.0 + 1e-14));
        prev = nt;
    }
}

TEST_CASE("picard: constant curve is an exact fixed point") {
    Sphere s;
    FlowParams p;
    p.a = 1.0;
    p.delta = 0.1;
    StepperConfig cfg;
    cfg.dt = 1e-3;
    DiscreteCurve u = constant_curve();
    DiscreteCurve v = picard_step(s, u, cfg, p);
    CHECK(sup_distance(u, v) <= 1e-14);
}

TEST_CASE("picard: great circle is stationary") {
    Sphere s;
    FlowParams p = {1.0, 0.5, -5.0};
    p.delta = 0.01;
    StepperConfig cfg;
    cfg.dt = 1e-5;
    DiscreteCurve u0 = great_circle();
    DiscreteCurve u = u0;
    for (int i = 0; i < 100; ++i) {
        u = picard_step(s, u, cfg, p);
        for (auto& q : u.points) q = s.tube_project(q);
    }
    CHECK(sup_distance(u, u0) <= 1e-9);
}

TEST_CASE("picard refuses the unregularized flow") {
    Sphere s;
    FlowParams p;
    p.a = 1.0;
    StepperConfig cfg;
    CHECK_THROWS_AS(picard_step(s, great_circle(), cfg, p), Error);
    // but epsilon folded into the semigroup is acceptable
    p.epsilon = 0.1;
    cfg.linear_splitting = LinearSplitting::delta_and_epsilon;
    cfg.dt = 1e-6;
    CHECK_NOTHROW(picard_step(s, great_circle(), cfg, p));
}

TEST_CASE("picard one-step self-convergence at order >= 2") {
    Sphere s;
    FlowParams p;
    p.a = 1.0;
    p.delta = 0.1;
    Rng rng(13);
    GridSpec g;
    g.num_points = 16; // contraction of the endpoint term needs dt * a * xi_max^4 small
    DiscreteCurve u = testutil::random_smooth_curve(rng, g, 0.05, 2);

    auto advance = [&](double dt, int steps) {
        StepperConfig cfg;
        cfg.dt = dt;
        cfg.picard_max_iters = 40;
        DiscreteCurve v = u;
        for (int i = 0; i < steps; ++i) v = picard_step(s, v, cfg, p);
        return v;
    };
    double dt = 4e-5;
    DiscreteCurve ref = advance(dt / 8.0, 8);
    double e1 = sup_distance(advance(dt, 1), ref);
    double e2 = sup_distance(advance(dt / 2.0, 2), ref);
    CHECK(e2 < e1);
    CHECK(e1 / e2 >= 3.0); // one step of a 2nd-order quadrature: factor ~4
}

TEST_CASE("rk: stationarity over 100 steps and CFL policy") {
    Sphere s;
    FlowParams p = {1.0, 0.5, -5.0};
    StepperConfig cfg;
    cfg.dt = 1e-6;
    DiscreteCurve u0 = great_circle();
    DiscreteCurve u = u0;
    for (int i = 0; i < 100; ++i) {
        u = rk_step(s, u, cfg, p);
        for (auto& q : u.points) q = s.tube_project(q);
    }
    CHECK(sup_distance(u, u0) <= 1e-10);

    StepperConfig bad = cfg;
    bad.dt = 1.0;
    bad.cfl_policy = CflPolicy::reject;
    CHECK_THROWS_AS(rk_step(s, u0, bad, p), Error);
}

TEST_CASE("picard and rk agree to quadrature order on one step") {
    Sphere s;
    FlowParams p;
    p.a = 1.0;
    p.delta = 0.01;
    Rng rng(29);
    GridSpec g;
    g.num_points = 16;
    DiscreteCurve u = testutil::random_smooth_curve(rng, g, 0.05, 2);
    auto diff_at = [&](double dt) {
        StepperConfig cfg;
        cfg.dt = dt;
        return sup_distance(picard_step(s, u, cfg, p), rk_step(s, u, cfg, p));
    };
    double d1 = diff_at(1e-4);
    double d2 = diff_at(5e-5);
    CHECK(d2 < d1);
    CHECK(d1 / d2 >= 3.0);
}

TEST_CASE("evolve: T=0 edge, projection bookkeeping") {
    Sphere s;
    FlowParams p = flow_preset(PresetName::integrable_PDL);
    StepperConfig cfg;
    cfg.dt = 1e-6;
    DiscreteCurve u0 = great_circle();
    Trajectory t0 = evolve(s, u0, 0.0, cfg, p);
    CHECK(t0.snapshots.size() == 1);

    cfg.snapshot_stride = 10;
    Trajectory traj = evolve(s, u0, 1e-4, cfg, p);
    CHECK(traj.snapshots.size() == 11);
    for (const auto& snap : traj.snapshots) {
        double dmax = 0.0;
        for (const auto& q : snap.points) dmax = std::max(dmax, std::abs(norm(q) - 1.0));
        CHECK(dmax <= 1e-12);
    }
    // time stamps strictly increase
    for (size_t i = 1; i < traj.snapshots.size(); ++i)
        CHECK(traj.snapshots[i].time_stamp > traj.snapshots[i - 1].time_stamp);
}

TEST_CASE("evolve: negative time only without regularization") {
    Sphere s;
    FlowParams p = flow_preset(PresetName::integrable_PDL);
    StepperConfig cfg;
    cfg.dt = 1e-6;
    DiscreteCurve u0 = great_circle();
    FlowParams preg = p;
    preg.delta = 0.1;
    CHECK_THROWS_AS(evolve(s, u0, -1e-4, cfg, preg), Error);
    CHECK_NOTHROW(evolve(s, u0, -1e-5, cfg, p));
}

TEST_CASE("evolve: time reversibility of the unregularized flow") {
    Sphere s;
    FlowParams p;
    p.a = 1.0;
    StepperConfig cfg;
    cfg.dt = 1e-6;
    Rng rng(41);
    GridSpec g;
    g.num_points = 32;
    DiscreteCurve u0 = testutil::random_smooth_curve(rng, g, 0.05, 3);
    double T = 2e-5;
    Trajectory fwd = evolve(s, u0, T, cfg, p);
    DiscreteCurve mid = fwd.snapshots.back();
    mid.time_stamp = 0.0;
    Trajectory bwd = evolve(s, mid, -T, cfg, p);
    CHECK(sup_distance(bwd.snapshots.back(), u0) <= 1e-10);
}

TEST_CASE("weighted_defect: projected runs are defect-free; continuity in eta") {
    Sphere s;
    FlowParams p;
    p.a = 1.0;
    p.delta = 0.1;
    StepperConfig cfg;
    cfg.dt = 2e-5;
    cfg.method = StepMethod::picard;
    Rng rng(47);
    GridSpec g;
    g.num_points = 16;
    DiscreteCurve u0 = testutil::random_smooth_curve(rng, g, 0.05, 2);

    Trajectory proj = evolve(s, u0, 1e-3, cfg, p);
    for (double v : weighted_defect(s, proj, 1.0)) CHECK(v <= 1e-20);

    cfg.projection_mode = ProjectionMode::never;
    Trajectory raw = evolve(s, u0, 1e-3, cfg, p);
    RVec w1 = weighted_defect(s, raw, 1.0);
    RVec w2 = weighted_defect(s, raw, 0.999);
    CHECK(w1.back() > 0.0);
    for (size_t i = 1; i < w1.size(); ++i) {
        CHECK(std::abs(w1[i] - w2[i]) <= 0.01 * std::max(w1[i], w2[i]));
    }
    CHECK_THROWS_AS(weighted_defect(s, raw, 0.0), Error);
    CHECK_THROWS_AS(weighted_defect(s, raw, 1.5), Error);
}

TEST_CASE("conservation at c=0 for the Schroedinger map preset") {
    Sphere s;
    FlowParams p = flow_preset(PresetName::schrodinger_map);
    StepperConfig cfg;
    cfg.dt = 1e-3;
    GridSpec g;
    g.num_points = 64;
    InitialDataSpec spec;
    spec.kind = InitialKind::perturbed_great_circle;
    spec.amplitude = 1e-2;
    spec.mode = 3;
    DiscreteCurve u0 = make_initial(spec, g);
    Trajectory traj = evolve(s, u0, 0.05, cfg, p);
    double e0 = sobolev_energies(s, traj.snapshots.front(), 0).levels[0];
    double e1 = sobolev_energies(s, traj.snapshots.back(), 0).levels[0];
    CHECK(std::abs(e1 - e0) <= 1e-6);
}

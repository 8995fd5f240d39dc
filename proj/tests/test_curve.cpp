#include "dflow/curve.hpp"

#include "dflow/initial.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace dflow;

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

DiscreteCurve great_circle(int n, double L) {
    GridSpec g;
    g.num_points = n;
    g.domain_length = L;
    InitialDataSpec spec;
    return make_initial(spec, g);
}

} // namespace

TEST_CASE("spectral derivative: single mode and constants") {
    GridSpec g;
    g.num_points = 64;
    RVec xs = g.nodes();
    RVec f(xs.size()), expect(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        f[i] = std::sin(kTwoPi * xs[i] / g.domain_length);
        expect[i] = (kTwoPi / g.domain_length) * std::cos(kTwoPi * xs[i] / g.domain_length);
    }
    RVec d = derivative(g, f);
    for (size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(d[i] - expect[i]) <= 1e-12);

    RVec c(xs.size(), 3.7);
    RVec dc = derivative(g, c);
    CHECK(sup_norm(dc) <= 1e-13);
}

TEST_CASE("spectral vs order-8 central differences cross-check") {
    GridSpec gs;
    gs.num_points = 256;
    GridSpec gf = gs;
    gf.scheme = DerivScheme::central_fd;
    gf.fd_order = 8;
    RVec xs = gs.nodes();
    RVec f(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        f[i] = std::exp(std::sin(kTwoPi * xs[i] / gs.domain_length));
    RVec a = derivative(gs, f);
    RVec b = derivative(gf, f);
    double m = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    CHECK(m <= 1e-9);
}

TEST_CASE("derivative rejects non-finite input") {
    GridSpec g;
    g.num_points = 16;
    RVec f(16, 0.0);
    f[3] = std::nan("");
    CHECK_THROWS_AS(derivative(g, f), Error);
}

TEST_CASE("grid validation") {
    GridSpec g;
    g.num_points = 48; // not a power of two
    CHECK_THROWS_AS(g.validate(), Error);
    g.num_points = 8;
    CHECK_THROWS_AS(g.validate(), Error);
    g.num_points = 64;
    g.domain_length = -1.0;
    CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("antiderivative inverts derivative and anchors at the left node") {
    GridSpec g;
    g.num_points = 128;
    RVec xs = g.nodes();
    RVec f(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        f[i] = 1.0 + std::cos(kTwoPi * 3.0 * xs[i] / g.domain_length);
    RVec F = antiderivative(g, f);
    CHECK(F[0] == 0.0);
    // strip the (non-periodic) mean ramp before differentiating spectrally
    double mean = integrate(g, f) / g.domain_length;
    RVec periodic(F.size());
    for (size_t i = 0; i < F.size(); ++i) periodic[i] = F[i] - mean * xs[i];
    RVec back = derivative(g, periodic);
    double m = 0.0;
    for (size_t i = 0; i < xs.size(); ++i)
        m = std::max(m, std::abs(back[i] + mean - f[i]));
    CHECK(m <= 1e-10);
    // trapezoid cross-check of the primitive itself at the midpoint
    double half = 0.0;
    for (size_t i = 0; i < xs.size() / 2; ++i) half += 0.5 * (f[i] + f[i + 1]) * g.dx();
    CHECK(std::abs(F[xs.size() / 2] - half) <= 1e-6);
}

TEST_CASE("covariant derivative of u_x vanishes on a great circle") {
    Sphere s;
    DiscreteCurve u = great_circle(64, kTwoPi);
    TangentField f = iterated_covariant(s, u, 1);
    CHECK(sup_norm(f.vecs) <= 1e-10);
    for (int l = 2; l <= 3; ++l)
        CHECK(sup_norm(iterated_covariant(s, u, l).vecs) <= 1e-9);
    // higher levels amplify the rounding floor by xi_max per derivative
    for (int l = 4; l <= 6; ++l)
        CHECK(sup_norm(iterated_covariant(s, u, l).vecs) <= 1e-4);
}

TEST_CASE("iterated_covariant level 0 is u_x; tangency preserved") {
    Sphere s;
    Rng rng(5);
    GridSpec g;
    g.num_points = 128;
    DiscreteCurve u = testutil::random_smooth_curve(rng, g);
    TangentField ux = iterated_covariant(s, u, 0);
    std::vector<Vec3> raw = vec_derivative(g, u.points, 1);
    for (size_t i = 0; i < raw.size(); ++i) {
        // level 0 equals u_x up to the single tangency projection
        CHECK(norm(ux.vecs[i] - s.tangent_project(u.points[i], raw[i])) <= 1e-14);
    }
    for (int l = 1; l <= 3; ++l) {
        TangentField f = iterated_covariant(s, u, l);
        for (size_t i = 0; i < f.vecs.size(); ++i)
            CHECK(std::abs(dot(f.vecs[i], u.points[i])) <= 1e-12);
    }
}

TEST_CASE("metric compatibility and J-parallelism to scheme order") {
    Sphere s;
    Rng rng(17);
    GridSpec g;
    g.num_points = 256;
    DiscreteCurve u = testutil::random_smooth_curve(rng, g);
    TangentField v = iterated_covariant(s, u, 1);
    TangentField w = iterated_covariant(s, u, 0);

    // d/dx g(v,w) = g(Dv, w) + g(v, Dw)
    RVec prod(v.vecs.size());
    for (size_t i = 0; i < prod.size(); ++i) prod[i] = dot(v.vecs[i], w.vecs[i]);
    RVec lhs = derivative(g, prod);
    TangentField dv = covariant_derivative(s, u, v);
    TangentField dw = covariant_derivative(s, u, w);
    for (size_t i = 0; i < prod.size(); ++i) {
        double rhs = dot(dv.vecs[i], w.vecs[i]) + dot(v.vecs[i], dw.vecs[i]);
        CHECK(std::abs(lhs[i] - rhs) <= 1e-7);
    }

    // D(Jv) = J(Dv)
    TangentField jv;
    jv.base = &u;
    jv.vecs.resize(v.vecs.size());
    for (size_t i = 0; i < v.vecs.size(); ++i)
        jv.vecs[i] = s.complex_structure(u.points[i], v.vecs[i]);
    TangentField djv = covariant_derivative(s, u, jv);
    for (size_t i = 0; i < v.vecs.size(); ++i) {
        Vec3 jdv = s.complex_structure(u.points[i], dv.vecs[i]);
        CHECK(norm(djv.vecs[i] - jdv) <= 1e-7);
    }
}

TEST_CASE("sobolev energies: pinned values") {
    Sphere s;
    DiscreteCurve u = great_circle(64, kTwoPi);
    EnergyLadder lad = sobolev_energies(s, u, 3);
    CHECK(lad.levels[0] == doctest::Approx(kTwoPi).epsilon(1e-10));
    for (size_t l = 1; l < lad.levels.size(); ++l) CHECK(lad.levels[l] <= 1e-16);

    // constant curve
    DiscreteCurve cst = u;
    for (auto& p : cst.points) p = Vec3(0, 0, 1);
    EnergyLadder lc = sobolev_energies(s, cst, 3);
    for (double lv : lc.levels) CHECK(lv <= 1e-20);

    // reparametrized circle (cos mx, sin mx, 0): level 0 becomes 2 pi m^2
    int m = 3;
    GridSpec g;
    g.num_points = 64;
    RVec xs = g.nodes();
    DiscreteCurve um;
    um.grid = g;
    um.points.resize(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        um.points[i] = Vec3(std::cos(m * xs[i]), std::sin(m * xs[i]), 0.0);
    EnergyLadder lm = sobolev_energies(s, um, 0);
    CHECK(lm.levels[0] == doctest::Approx(kTwoPi * m * m).epsilon(1e-10));
}

TEST_CASE("energy ladder self-converges under grid doubling") {
    Sphere s;
    auto build = [&](int n) {
        Rng rng(23); // same modes on both grids
        GridSpec g;
        g.num_points = n;
        return testutil::random_smooth_curve(rng, g);
    };
    EnergyLadder a = sobolev_energies(s, build(128), 4);
    EnergyLadder b = sobolev_energies(s, build(256), 4);
    EnergyLadder c = sobolev_energies(s, build(512), 4);
    // band-limited data is represented exactly: all grids agree to the
    // (derivative-amplified) rounding floor
    for (size_t l = 0; l < a.levels.size(); ++l) {
        double scale = std::max({a.levels[l], c.levels[l], 1e-30});
        CHECK(std::abs(a.levels[l] - b.levels[l]) / scale <= 1e-8);
        CHECK(std::abs(b.levels[l] - c.levels[l]) / scale <= 1e-8);
    }
}

TEST_CASE("iterated covariant Richardson self-convergence on a modulated circle") {
    Sphere s;
    auto build = [&](int n) {
        GridSpec g;
        g.num_points = n;
        InitialDataSpec spec;
        spec.kind = InitialKind::perturbed_great_circle;
        spec.amplitude = 0.1;
        spec.mode = 2;
        return make_initial(spec, g);
    };
    DiscreteCurve u1 = build(128), u2 = build(256);
    TangentField f1 = iterated_covariant(s, u1, 3);
    TangentField f2 = iterated_covariant(s, u2, 3);
    // compare on the shared nodes
    double m = 0.0;
    for (size_t i = 0; i < f1.vecs.size(); ++i)
        m = std::max(m, norm(f1.vecs[i] - f2.vecs[2 * i]));
    CHECK(m <= 1e-6);
}

TEST_CASE("boundary window fraction distinguishes localized from global data") {
    GridSpec g;
    g.num_points = 512;
    g.domain_length = 64.0;
    InitialDataSpec spec;
    spec.kind = InitialKind::gaussian_twist;
    spec.amplitude = 0.3;
    spec.width = 1.5;
    DiscreteCurve u = make_initial(spec, g);
    CHECK(boundary_window_fraction(u) < boundary_window_warn);

    spec.center = 0.5; // bump at the seam
    DiscreteCurve v = make_initial(spec, g);
    CHECK(boundary_window_fraction(v) > 0.1);
}

TEST_CASE("curve validation catches off-sphere points") {
    Sphere s;
    DiscreteCurve u = great_circle(64, kTwoPi);
    u.validate(s);
    u.points[10] *= 1.001;
    CHECK_THROWS_AS(u.validate(s), Error);
}

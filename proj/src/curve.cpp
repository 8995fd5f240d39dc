#include "dflow/curve.hpp"

#include <cmath>

namespace dflow {

void DiscreteCurve::validate(const Sphere& s) const {
    grid.validate();
    if (static_cast<int>(points.size()) != grid.num_points)
        throw Error("DiscreteCurve: point count does not match grid");
    for (const auto& p : points) {
        if (!finite(p)) throw Error("DiscreteCurve: non-finite point");
        if (!s.on_sphere(p)) throw Error("DiscreteCurve: point off sphere beyond tolerance");
    }
}

std::vector<Vec3> vec_derivative(const GridSpec& g, const std::vector<Vec3>& f, int order) {
    size_t n = f.size();
    RVec comp(n);
    std::vector<Vec3> out(n);
    for (int c = 0; c < 3; ++c) {
        for (size_t i = 0; i < n; ++i)
            comp[i] = (c == 0) ? f[i].x : (c == 1) ? f[i].y : f[i].z;
        RVec d = derivative(g, comp, order);
        for (size_t i = 0; i < n; ++i) {
            if (c == 0) out[i].x = d[i];
            else if (c == 1) out[i].y = d[i];
            else out[i].z = d[i];
        }
    }
    return out;
}

TangentField curve_tangent(const DiscreteCurve& u) {
    TangentField t;
    t.base = &u;
    t.vecs = vec_derivative(u.grid, u.points, 1);
    return t;
}

TangentField covariant_derivative(const Sphere& s, const DiscreteCurve& u, const TangentField& v) {
    if (v.vecs.size() != u.points.size())
        throw Error("covariant_derivative: field/curve size mismatch");
    for (size_t i = 0; i < v.vecs.size(); ++i)
        if (std::abs(dot(v.vecs[i], u.points[i])) > 10.0 * s.descriptor().tol_tangency)
            throw Error("covariant_derivative: input field not tangent along curve");
    TangentField out;
    out.base = &u;
    out.vecs = vec_derivative(u.grid, v.vecs, 1);
    for (size_t i = 0; i < out.vecs.size(); ++i)
        out.vecs[i] = s.tangent_project(u.points[i], out.vecs[i]);
    return out;
}

TangentField iterated_covariant(const Sphere& s, const DiscreteCurve& u, int l) {
    if (l < 0 || l > k_max_default)
        throw Error("iterated_covariant: level out of range [0, 6]");
    TangentField f = curve_tangent(u);
    // u_x of an on-sphere curve is tangent up to discretization error; project
    // once so the tangency precondition of the recursion holds exactly.
    for (size_t i = 0; i < f.vecs.size(); ++i)
        f.vecs[i] = s.tangent_project(u.points[i], f.vecs[i]);
    for (int j = 0; j < l; ++j) f = covariant_derivative(s, u, f);
    return f;
}

EnergyLadder sobolev_energies(const Sphere& s, const DiscreteCurve& u, int k) {
    if (k < 0 || k > k_max_default) throw Error("sobolev_energies: k out of range [0, 6]");
    EnergyLadder lad;
    lad.levels.resize(static_cast<size_t>(k) + 1);
    TangentField f = iterated_covariant(s, u, 0);
    for (int l = 0; l <= k; ++l) {
        double e = 0.0;
        for (const auto& v : f.vecs) e += dot(v, v);
        e *= u.grid.dx();
        if (!std::isfinite(e)) throw Error("sobolev_energies: non-finite level");
        lad.levels[static_cast<size_t>(l)] = e;
        if (l < k) f = covariant_derivative(s, u, f);
    }
    return lad;
}

double boundary_window_fraction(const DiscreteCurve& u) {
    // Curvature density: the base great-circle state carries |u_x|^2 around
    // the whole period, so localization is judged on the next level up.
    std::vector<Vec3> uxx = vec_derivative(u.grid, u.points, 2);
    int n = u.grid.num_points;
    int w = n / 10;
    double total = 0.0, window = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec3 t = uxx[i] - dot(uxx[i], u.points[i]) * u.points[i];
        double d = dot(t, t);
        total += d;
        if (i < w || i >= n - w) window += d;
    }
    return total > 0.0 ? window / total : 0.0;
}

double sup_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
    if (!(a.grid == b.grid)) throw Error("sup_distance: grid mismatch");
    double m = 0.0;
    for (size_t i = 0; i < a.points.size(); ++i)
        m = std::max(m, norm(a.points[i] - b.points[i]));
    return m;
}

double sup_norm(const std::vector<Vec3>& f) {
    double m = 0.0;
    for (const auto& v : f) m = std::max(m, norm(v));
    return m;
}

} // namespace dflow

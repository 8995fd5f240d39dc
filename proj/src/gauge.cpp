#include "dflow/gauge.hpp"

#include <cmath>

namespace dflow {

void GaugeParams::validate() const {
    if (M < 0.0) throw Error("GaugeParams: M must be positive (or 0 for the default)");
    if (k < 4 || k > k_max_default) throw Error("GaugeParams: k must lie in [4, 6]");
}

namespace {

RVec cumulative_trapezoid(const GridSpec& g, const RVec& f) {
    RVec out(f.size());
    out[0] = 0.0;
    double h = g.dx();
    for (size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

} // namespace

RVec phi_primitive(const Sphere& s, const DiscreteCurve& u) {
    TangentField ux = iterated_covariant(s, u, 0);
    RVec density(ux.vecs.size());
    for (size_t i = 0; i < ux.vecs.size(); ++i) density[i] = dot(ux.vecs[i], ux.vecs[i]);
    return cumulative_trapezoid(u.grid, density);
}

TangentField gauge_section(const Sphere& s, const DiscreteCurve& u, const GaugeParams& gp,
                           const FlowParams& p) {
    gp.validate();
    if (p.a == 0.0) throw Error("gauge_section: requires a != 0");
    RVec phi = phi_primitive(s, u);
    TangentField top = iterated_covariant(s, u, gp.k);
    TangentField below = iterated_covariant(s, u, gp.k - 1);
    double coef = gp.effective_M(p) / (4.0 * p.a);
    TangentField out;
    out.base = top.base;
    out.vecs.resize(top.vecs.size());
    for (size_t i = 0; i < out.vecs.size(); ++i)
        out.vecs[i] =
            top.vecs[i] + coef * phi[i] * s.complex_structure(u.points[i], below.vecs[i]);
    return out;
}

GaugeReport gauge_energy(const Sphere& s, const DiscreteCurve& u, const GaugeParams& gp,
                         const FlowParams& p) {
    GaugeReport rep;
    rep.phi_profile = phi_primitive(s, u);
    rep.v_k = gauge_section(s, u, gp, p);
    rep.ladder = sobolev_energies(s, u, gp.k);
    double e = 0.0;
    for (const auto& v : rep.v_k.vecs) e += dot(v, v);
    e *= u.grid.dx();
    for (int l = 0; l < gp.k; ++l) e += rep.ladder.levels[static_cast<size_t>(l)];
    if (!std::isfinite(e)) throw Error("gauge_energy: non-finite energy");
    rep.energy_sq = e;
    return rep;
}

double growth_fit(const RVec& times, const RVec& values) {
    if (times.size() != values.size() || times.size() < 3)
        throw Error("growth_fit: need at least 3 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = times.size();
    for (size_t i = 0; i < n; ++i) {
        if (!(values[i] > 0.0)) throw Error("growth_fit: values must be positive");
        double y = std::log(values[i]);
        sx += times[i];
        sy += y;
        sxx += times[i] * times[i];
        sxy += times[i] * y;
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw Error("growth_fit: degenerate time samples");
    return (n * sxy - sx * sy) / denom;
}

RVec twin_difference(const Sphere& s, const Trajectory& ta, const Trajectory& tb,
                     const GaugeParams& gp, const FlowParams& p) {
    if (ta.snapshots.size() != tb.snapshots.size())
        throw Error("twin_difference: snapshot count mismatch");
    if (p.a == 0.0) throw Error("twin_difference: requires a != 0");
    double coef = gp.effective_M(p) / (4.0 * p.a);
    RVec out;
    out.reserve(ta.snapshots.size());
    for (size_t si = 0; si < ta.snapshots.size(); ++si) {
        const DiscreteCurve& ua = ta.snapshots[si];
        const DiscreteCurve& ub = tb.snapshots[si];
        if (!(ua.grid == ub.grid)) throw Error("twin_difference: grid mismatch");
        if (std::abs(ua.time_stamp - ub.time_stamp) > 1e-12)
            throw Error("twin_difference: snapshot times mismatch");
        size_t n = ua.points.size();

        // Joint weight: levels 0..2 of both runs feed one primitive.
        RVec density(n, 0.0);
        for (const DiscreteCurve* u : {&ua, &ub}) {
            TangentField f = iterated_covariant(s, *u, 0);
            for (int l = 0; l <= 2; ++l) {
                for (size_t i = 0; i < n; ++i) density[i] += dot(f.vecs[i], f.vecs[i]);
                if (l < 2) f = covariant_derivative(s, *u, f);
            }
        }
        RVec phi = cumulative_trapezoid(ua.grid, density);

        auto level1_gauged = [&](const DiscreteCurve& u) {
            TangentField ux = iterated_covariant(s, u, 0);
            TangentField d1 = covariant_derivative(s, u, ux);
            std::vector<Vec3> v(n);
            for (size_t i = 0; i < n; ++i)
                v[i] = d1.vecs[i] +
                       coef * phi[i] * s.complex_structure(u.points[i], ux.vecs[i]);
            return v;
        };
        std::vector<Vec3> ga = level1_gauged(ua);
        std::vector<Vec3> gb = level1_gauged(ub);

        std::vector<Vec3> z(n);
        for (size_t i = 0; i < n; ++i) z[i] = ua.points[i] - ub.points[i];
        std::vector<Vec3> zx = vec_derivative(ua.grid, z, 1);

        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
            Vec3 zt = ga[i] - gb[i];
            acc += dot(z[i], z[i]) + dot(zx[i], zx[i]) + dot(zt, zt);
        }
        out.push_back(0.5 * acc * ua.grid.dx());
    }
    return out;
}

} // namespace dflow

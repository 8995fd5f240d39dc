#include "dflow/rhs.hpp"

#include <cmath>

namespace dflow {

void FlowParams::validate(bool allow_zero_a) const {
    if (!allow_zero_a && a == 0.0)
        throw Error("FlowParams: a must be nonzero");
    if (epsilon < 0.0) throw Error("FlowParams: epsilon must be >= 0");
    if (delta < 0.0) throw Error("FlowParams: delta must be >= 0");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw Error("FlowParams: non-finite coefficient");
}

PresetName preset_from_string(const std::string& s) {
    if (s == "integrable_PDL") return PresetName::integrable_PDL;
    if (s == "fukumoto_filament") return PresetName::fukumoto_filament;
    if (s == "schrodinger_map") return PresetName::schrodinger_map;
    if (s == "custom") return PresetName::custom;
    throw Error("unknown preset: " + s);
}

std::string preset_to_string(PresetName p) {
    switch (p) {
        case PresetName::integrable_PDL: return "integrable_PDL";
        case PresetName::fukumoto_filament: return "fukumoto_filament";
        case PresetName::schrodinger_map: return "schrodinger_map";
        case PresetName::custom: return "custom";
    }
    throw Error("unknown preset");
}

FlowParams flow_preset(PresetName name) {
    FlowParams p;
    switch (name) {
        case PresetName::integrable_PDL:
            // model coefficients (a, b', c') = (1, 3/2, 0): the integrable point
            coefficient_map_inverse(1.0, 1.5, 0.0, p.a, p.b, p.c);
            break;
        case PresetName::fukumoto_filament:
            // filament constraint 3a + c' = 2b' with c' != 0: take (1, 2, 1)
            coefficient_map_inverse(1.0, 2.0, 1.0, p.a, p.b, p.c);
            break;
        case PresetName::schrodinger_map:
            p.a = p.b = p.c = 0.0;
            break;
        case PresetName::custom:
            break;
    }
    return p;
}

void coefficient_map(double a, double b, double c, double& a_out, double& b_out, double& c_out) {
    if (a == 0.0) throw Error("coefficient_map: a must be nonzero");
    a_out = a;
    b_out = b + a;
    c_out = c + 5.0 * a;
}

void coefficient_map_inverse(double a, double bp, double cp, double& a_out, double& b_out,
                             double& c_out) {
    if (a == 0.0) throw Error("coefficient_map_inverse: a must be nonzero");
    a_out = a;
    b_out = bp - a;
    c_out = cp - 5.0 * a;
}

namespace {

void check_output(const std::vector<Vec3>& f, const char* what) {
    for (const auto& v : f)
        if (!finite(v)) throw Error(std::string("non-finite intermediate in ") + what);
}

std::vector<Vec3> regularizers(const Sphere& s, const DiscreteCurve& u, const FlowParams& p) {
    size_t n = u.points.size();
    std::vector<Vec3> out(n);
    if (p.epsilon > 0.0) {
        TangentField d3 = iterated_covariant(s, u, 3);
        check_output(d3.vecs, "epsilon regularizer (level 3)");
        for (size_t i = 0; i < n; ++i) out[i] -= p.epsilon * d3.vecs[i];
    }
    if (p.delta > 0.0) {
        TangentField d5 = iterated_covariant(s, u, 5);
        check_output(d5.vecs, "delta regularizer (level 5)");
        for (size_t i = 0; i < n; ++i) out[i] += p.delta * d5.vecs[i];
    }
    return out;
}

} // namespace

TangentField rhs_intrinsic(const Sphere& s, const DiscreteCurve& u, const FlowParams& p) {
    TangentField ux = iterated_covariant(s, u, 0);
    TangentField d1 = covariant_derivative(s, u, ux);
    TangentField d2 = covariant_derivative(s, u, d1);
    TangentField d3 = covariant_derivative(s, u, d2);
    check_output(d3.vecs, "rhs_intrinsic (level 3)");
    size_t n = u.points.size();
    TangentField out;
    out.base = &u;
    out.vecs.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const Vec3& P = u.points[i];
        Vec3 v = p.a * s.complex_structure(P, d3.vecs[i]);
        v += (1.0 + p.b * dot(ux.vecs[i], ux.vecs[i])) * s.complex_structure(P, d1.vecs[i]);
        v += p.c * dot(d1.vecs[i], ux.vecs[i]) * s.complex_structure(P, ux.vecs[i]);
        out.vecs[i] = v;
    }
    if (p.epsilon > 0.0 || p.delta > 0.0) {
        std::vector<Vec3> reg = regularizers(s, u, p);
        for (size_t i = 0; i < n; ++i) out.vecs[i] += reg[i];
    }
    check_output(out.vecs, "rhs_intrinsic");
    return out;
}

TangentField rhs_extrinsic_model(const Sphere& s, const DiscreteCurve& u, const FlowParams& p) {
    size_t n = u.points.size();
    std::vector<Vec3> ux = vec_derivative(u.grid, u.points, 1);
    std::vector<Vec3> uxx = vec_derivative(u.grid, u.points, 2);
    std::vector<Vec3> uxxxx = vec_derivative(u.grid, u.points, 4);
    check_output(uxxxx, "rhs_extrinsic_model (level 4)");
    TangentField out;
    out.base = &u;
    out.vecs.resize(n);
    for (size_t i = 0; i < n; ++i) {
        Vec3 arg = p.a * uxxxx[i] + uxx[i];
        arg += p.b * dot(ux[i], ux[i]) * uxx[i];
        arg += p.c * dot(uxx[i], ux[i]) * ux[i];
        out.vecs[i] = cross(u.points[i], arg);
    }
    if (p.epsilon > 0.0 || p.delta > 0.0) {
        std::vector<Vec3> reg = regularizers(s, u, p);
        for (size_t i = 0; i < n; ++i) out.vecs[i] += reg[i];
    }
    check_output(out.vecs, "rhs_extrinsic_model");
    return out;
}

TangentField rhs_embedded(const Sphere& s, const DiscreteCurve& u, const FlowParams& p) {
    size_t n = u.points.size();
    std::vector<Vec3> ux = vec_derivative(u.grid, u.points, 1);
    std::vector<Vec3> uxx = vec_derivative(u.grid, u.points, 2);
    check_output(uxx, "rhs_embedded (level 2)");

    std::vector<Vec3> W(n); // P(U) U_xx
    for (size_t i = 0; i < n; ++i) W[i] = s.tangent_project(u.points[i], uxx[i]);
    std::vector<Vec3> Wx = vec_derivative(u.grid, W, 1);
    std::vector<Vec3> B(n); // J(U) P(U) W_x
    for (size_t i = 0; i < n; ++i)
        B[i] = cross(u.points[i], s.tangent_project(u.points[i], Wx[i]));
    std::vector<Vec3> Bx = vec_derivative(u.grid, B, 1);

    TangentField out;
    out.base = &u;
    out.vecs.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const Vec3& P = u.points[i];
        Vec3 v = p.a * s.tangent_project(P, Bx[i]);
        v += (1.0 + p.b * dot(ux[i], ux[i])) * cross(P, W[i]);
        v += p.c * dot(W[i], ux[i]) * cross(P, ux[i]);
        out.vecs[i] = v;
    }
    if (p.epsilon > 0.0 || p.delta > 0.0) {
        std::vector<Vec3> reg = regularizers(s, u, p);
        for (size_t i = 0; i < n; ++i) out.vecs[i] += reg[i];
    }
    check_output(out.vecs, "rhs_embedded");
    return out;
}

TangentField rhs_full(const Sphere& s, const DiscreteCurve& u, const FlowParams& p) {
    switch (p.form) {
        case RhsForm::intrinsic: return rhs_intrinsic(s, u, p);
        case RhsForm::extrinsic_model: return rhs_extrinsic_model(s, u, p);
        case RhsForm::embedded: return rhs_embedded(s, u, p);
    }
    throw Error("rhs_full: unknown form");
}

double rhs_equivalence_residual(const Sphere& s, const DiscreteCurve& u, const FlowParams& p) {
    if (p.epsilon != 0.0 || p.delta != 0.0)
        throw Error("rhs_equivalence_residual: requires epsilon = delta = 0");
    TangentField lhs = rhs_intrinsic(s, u, p);
    FlowParams mapped = p;
    coefficient_map(p.a, p.b, p.c, mapped.a, mapped.b, mapped.c);
    TangentField rhs = rhs_extrinsic_model(s, u, mapped);
    double m = 0.0;
    for (size_t i = 0; i < lhs.vecs.size(); ++i)
        m = std::max(m, norm(lhs.vecs[i] - rhs.vecs[i]));
    return m;
}

} // namespace dflow

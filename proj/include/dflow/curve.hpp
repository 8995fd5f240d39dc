#pragma once

#include "dflow/grid.hpp"
#include "dflow/vec3.hpp"

#include <vector>

namespace dflow {

inline constexpr int k_max_default = 6;

/// Grid sample of a map into the unit sphere. Points may sit slightly off the
/// sphere when the evolver runs with projection disabled; validate() checks
/// the constraint when a caller requires it.
struct DiscreteCurve {
    GridSpec grid;
    std::vector<Vec3> points;
    double time_stamp = 0.0;

    void validate(const Sphere& s) const;
};

/// Section of the pullback tangent bundle along a curve, sampled on its grid.
struct TangentField {
    const DiscreteCurve* base = nullptr;
    std::vector<Vec3> vecs;
};

/// levels[l] = integral of g(D^l u_x, D^l u_x) dx for l = 0..k, D the
/// covariant derivative along the curve.
struct EnergyLadder {
    std::vector<double> levels;
};

/// Componentwise spatial derivative of a vector grid function.
std::vector<Vec3> vec_derivative(const GridSpec& g, const std::vector<Vec3>& f, int order = 1);

TangentField curve_tangent(const DiscreteCurve& u); // u_x as a tangent field

/// Covariant derivative via ambient projection: (Dv)_i = P(u_i) (dv/dx)_i.
TangentField covariant_derivative(const Sphere& s, const DiscreteCurve& u, const TangentField& v);

/// D^l u_x by l-fold covariant differentiation of u_x.
TangentField iterated_covariant(const Sphere& s, const DiscreteCurve& u, int l);

EnergyLadder sobolev_energies(const Sphere& s, const DiscreteCurve& u, int k);

/// Fraction of the level-0 energy density carried by the outer 10% of the
/// domain on each side; the decay surrogate for line-posed data. Above
/// warn_threshold the periodic surrogate is suspect.
double boundary_window_fraction(const DiscreteCurve& u);
inline constexpr double boundary_window_warn = 1e-10;

double sup_distance(const DiscreteCurve& a, const DiscreteCurve& b);
double sup_norm(const std::vector<Vec3>& f);

} // namespace dflow

#pragma once

#include "dflow/vec3.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Target geometry: the unit sphere in R^3 with complex structure J(p)v = p x v.
/// The interface (projections, normal frame, curvature) is what any embedded
/// target would expose; only the closed forms below are sphere-specific.
struct ManifoldDescriptor {
    std::string name = "unit_sphere";
    int ambient_dim = 3;
    double tube_radius = 0.5;       // nearest-point projection valid for ||q|-1| < this
    double tol_constraint = 1e-12;  // "on sphere" tolerance
    double tol_tangency = 1e-10;    // "tangent at p" tolerance
};

class Sphere {
public:
    Sphere() = default;
    explicit Sphere(ManifoldDescriptor d) : desc_(d) {
        if (!(d.tube_radius > 0.0 && d.tube_radius < 1.0))
            throw Error("ManifoldDescriptor: tube_radius must lie in (0,1)");
    }

    const ManifoldDescriptor& descriptor() const { return desc_; }

    bool on_sphere(const Vec3& p) const {
        return std::abs(norm(p) - 1.0) <= desc_.tol_constraint;
    }

    bool tangent_at(const Vec3& p, const Vec3& v) const {
        return std::abs(dot(v, p)) <= desc_.tol_tangency;
    }

    /// Orthogonal projection onto the tangent plane: P(p)v = v - <v,p>p.
    Vec3 tangent_project(const Vec3& p, const Vec3& v) const {
        if (std::abs(norm(p) - 1.0) > 10.0 * desc_.tol_constraint)
            throw Error("tangent_project: base point off sphere (corrupted state)");
        return v - dot(v, p) * p;
    }

    /// J(p)v = p x v. Rotates each tangent plane by a quarter turn; J^2 = -Id
    /// on tangent vectors and <Jv,Jw> = <v,w>.
    Vec3 complex_structure(const Vec3& p, const Vec3& v) const {
        return cross(p, v);
    }

    /// Nearest-point (tubular neighborhood) projection, q -> q/|q|.
    Vec3 tube_project(const Vec3& q) const {
        double r = norm(q);
        if (r < 1.0 - desc_.tube_radius)
            throw Error("tube_project: left tubular neighborhood (|q| = " +
                        std::to_string(r) + ")");
        return q * (1.0 / r);
    }

    /// Constraint defect rho(q) = q - tube_project(q); zero iff q on sphere.
    Vec3 constraint_defect(const Vec3& q) const { return q - tube_project(q); }

    /// Orthonormal basis of the normal space at p. Codimension 1: just {p}.
    std::vector<Vec3> normal_frame(const Vec3& p) const { return {p}; }

    /// Constant-curvature closed form R(X,Y)Z = <Y,Z>X - <X,Z>Y.
    Vec3 curvature(const Vec3& /*p*/, const Vec3& x, const Vec3& y, const Vec3& z) const {
        return dot(y, z) * x - dot(x, z) * y;
    }

private:
    ManifoldDescriptor desc_;
};

} // namespace dflow

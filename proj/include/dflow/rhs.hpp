#pragma once

#include "dflow/curve.hpp"

#include <string>

namespace dflow {

enum class RhsForm { intrinsic, extrinsic_model, embedded };

/// Coefficients of the flow u_t = a J D^3 u_x + (1 + b g(u_x,u_x)) J D u_x
///                              + c g(D u_x, u_x) J u_x
/// plus regularization strengths: epsilon turns the leading factor into
/// (-epsilon + a J) D^3 u_x, delta adds delta D^5 u_x.
struct FlowParams {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    RhsForm form = RhsForm::intrinsic;

    /// a == 0 degenerates the dispersive principal part. The Schroedinger-map
    /// preset legitimately runs there; everything gauge-related refuses it.
    void validate(bool allow_zero_a = false) const;
};

enum class PresetName { integrable_PDL, fukumoto_filament, schrodinger_map, custom };

PresetName preset_from_string(const std::string& s);
std::string preset_to_string(PresetName p);

/// Presets are stated in extrinsic model coefficients and converted.
FlowParams flow_preset(PresetName name);

/// Intrinsic (a,b,c) -> extrinsic (a, b+a, c+5a). Tangential part of D^3 u_x
/// on the sphere is u_xxxx + |u_x|^2 u_xx + 5 <u_xx,u_x> u_x, whence the shift.
void coefficient_map(double a, double b, double c, double& a_out, double& b_out, double& c_out);
void coefficient_map_inverse(double a, double bp, double cp, double& a_out, double& b_out,
                             double& c_out);

/// The three codings of the same right-hand side, kept independent as mutual
/// oracles: covariant-calculus form, cross-product model form, and the
/// projection-chain form on the embedded image.
TangentField rhs_intrinsic(const Sphere& s, const DiscreteCurve& u, const FlowParams& p);
TangentField rhs_extrinsic_model(const Sphere& s, const DiscreteCurve& u, const FlowParams& p);
TangentField rhs_embedded(const Sphere& s, const DiscreteCurve& u, const FlowParams& p);

/// Dispatch on p.form; regularization terms are added in covariant form for
/// every coding.
TangentField rhs_full(const Sphere& s, const DiscreteCurve& u, const FlowParams& p);

/// Sup-norm of rhs_intrinsic(u, (a,b,c)) minus rhs_extrinsic_model(u, mapped).
/// Vanishes to discretization error; this is the oracle for coefficient_map.
double rhs_equivalence_residual(const Sphere& s, const DiscreteCurve& u, const FlowParams& p);

} // namespace dflow

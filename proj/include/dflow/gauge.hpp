#pragma once

#include "dflow/stepper.hpp"

#include <optional>

namespace dflow {

struct GaugeParams {
    double M = 0.0; // gauge strength; 0 means "pick default 10|a|"
    int k = 4;      // top derivative level

    void validate() const;
    double effective_M(const FlowParams& p) const { return M > 0.0 ? M : 10.0 * std::abs(p.a); }
};

struct GaugeReport {
    RVec phi_profile;
    TangentField v_k;
    double energy_sq = 0.0;
    EnergyLadder ladder;
    std::optional<double> growth_fit;
};

/// Phi(x) = integral from the left endpoint of g(u_y, u_y) dy, cumulative
/// trapezoid. Nondecreasing; Phi(x_0) = 0.
RVec phi_primitive(const Sphere& s, const DiscreteCurve& u);

/// V_k = D^k u_x + (M / 4a) Phi J(u) D^{k-1} u_x.
TangentField gauge_section(const Sphere& s, const DiscreteCurve& u, const GaugeParams& gp,
                           const FlowParams& p);

/// energy_sq = integral of g(V_k, V_k) + sum_{l<k} g(D^l u_x, D^l u_x).
GaugeReport gauge_energy(const Sphere& s, const DiscreteCurve& u, const GaugeParams& gp,
                         const FlowParams& p);

/// Least-squares slope of log(values) against times.
double growth_fit(const RVec& times, const RVec& values);

/// Per-snapshot D(t)^2 = 1/2 integral of |Z|^2 + |Z_x|^2 + |Ztilde|^2, where
/// Z is the pointwise difference of states and Ztilde the difference of the
/// level-1 gauged sections, gauged with the joint weight built from both runs.
RVec twin_difference(const Sphere& s, const Trajectory& a, const Trajectory& b,
                     const GaugeParams& gp, const FlowParams& p);

} // namespace dflow

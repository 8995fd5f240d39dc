#pragma once

#include "dflow/rhs.hpp"

namespace dflow {

enum class ProjectionMode { every_step, never, threshold };
enum class LinearSplitting { delta_only, delta_and_epsilon };
enum class StepMethod { rk4, picard };
enum class CflPolicy { warn, reject };

struct StepperConfig {
    double dt = 1e-4;
    StepMethod method = StepMethod::rk4;
    int picard_max_iters = 25;
    double picard_tol = 1e-12; // sup-norm between successive iterates
    ProjectionMode projection_mode = ProjectionMode::every_step;
    double threshold_tau = 1e-8; // project when sup defect exceeds this
    LinearSplitting linear_splitting = LinearSplitting::delta_only;
    double c_cfl = 0.2; // explicit-step heuristic dt <= c_cfl * dx^4 / |a|
    CflPolicy cfl_policy = CflPolicy::warn;
    int snapshot_stride = 1;

    void validate() const;
};

struct StepRecord {
    double t = 0.0;
    double defect_sup = 0.0; // sup |rho| recorded before any projection
};

struct Trajectory {
    std::vector<DiscreteCurve> snapshots;
    FlowParams params;
    StepperConfig stepper;
    std::vector<StepRecord> defect_series;
};

/// Flat dissipative semigroup exp(t(delta d^6/dx^6 [- epsilon d^4/dx^4])),
/// the epsilon part folded in only under delta_and_epsilon splitting.
/// Norm-nonincreasing Fourier multiplier; defined for t >= 0 only.
RVec semigroup_apply(const GridSpec& g, const RVec& f, double t, const FlowParams& p,
                     LinearSplitting split = LinearSplitting::delta_only);
std::vector<Vec3> semigroup_apply(const GridSpec& g, const std::vector<Vec3>& f, double t,
                                  const FlowParams& p,
                                  LinearSplitting split = LinearSplitting::delta_only);

/// One step of the mild integral map: fixed point of
///   v = S(dt) u + integral over the step of S(dt-s) F(project(v(s))) ds
/// with exponential-trapezoid quadrature, iteration started from S(dt) u.
/// The nonlinearity is always evaluated at the projected point; the flat part
/// covered by the semigroup is subtracted there, so the raw state carries its
/// constraint defect explicitly. Returns the unprojected state.
DiscreteCurve picard_step(const Sphere& s, const DiscreteCurve& u, const StepperConfig& cfg,
                          const FlowParams& p);

/// Classical explicit 4-stage step with every stage point renormalized to the
/// sphere. Returns the unprojected combination.
DiscreteCurve rk_step(const Sphere& s, const DiscreteCurve& u, const StepperConfig& cfg,
                      const FlowParams& p);

Trajectory evolve(const Sphere& s, const DiscreteCurve& u0, double T, const StepperConfig& cfg,
                  const FlowParams& p);

/// Gaussian-weighted defect integral per snapshot, weight exp(-eta (x - L/2)^2).
RVec weighted_defect(const Sphere& s, const Trajectory& traj, double eta);

} // namespace dflow

#pragma once

#include "dflow/grid.hpp"

namespace dflow {

/// The constant-dispersion model problem
///   u_t = i a u_xxxx + i {beta u_x}_x + gamma u_x
/// with a damping majorant phi >= 0 bounding |Im gamma| pointwise. Profiles
/// are sampled on the grid (time-independent).
struct LinearSpec {
    double a = 1.0;
    RVec beta;
    CVec gamma;
    RVec phi;
    double cutoff_radius = 0.0; // 0 means "pick the default"
    bool allow_hypothesis_violation = false; // the deliberate ill-posedness probe

    void validate(const GridSpec& g) const;
};

/// Order-zero gauge L = I + Ltilde with Ltilde v = Phi(x) * (K v), K the
/// Fourier multiplier psi(xi) / (4 a xi), psi a C^2 ramp vanishing for
/// |xi| <= r and equal to 1 for |xi| >= r + 1.
struct GaugeOperator {
    GridSpec grid;
    double a = 1.0;
    double cutoff_radius = 1.0;
    RVec Phi;       // primitive of phi, exact on resolved modes, Phi(x_0) = 0
    RVec symbol;    // K's multiplier per grid wavenumber
    RVec phi;       // damping profile (kept for the audits)
    double norm_bound = 0.0; // sup|Phi| / (4|a| r), asserted < 1/2
};

/// Smallest cutoff radius keeping the recorded norm bound at 1/4.
double default_cutoff_radius(const GridSpec& g, const LinearSpec& spec);

GaugeOperator make_gauge(const GridSpec& g, const LinearSpec& spec);

/// exp(i a t d^4/dx^4): unimodular multiplier exp(i a t xi^4). Any sign of t.
CVec free_propagator(const GridSpec& g, const CVec& u0, double t, double a);

CVec gauge_tilde(const GaugeOperator& G, const CVec& v);  // Ltilde v
CVec gauge_apply(const GaugeOperator& G, const CVec& v);  // v + Ltilde v
CVec gauge_invert(const GaugeOperator& G, const CVec& w); // Neumann series

struct CommutatorProbe {
    double residual_l2 = 0.0;      // || ia[Ltilde, D^4]v - phi v_xx - 3/2 phi' v_x ||
    double residual_over_h1 = 0.0; // residual_l2 / ||v||_{H^1}
    double matched_term_l2 = 0.0;  // || phi v_xx ||
};

CommutatorProbe commutator_residual(const GaugeOperator& G, const CVec& v);

struct LinearTrajectory {
    RVec times;
    std::vector<CVec> states;
};

/// Strang splitting: exact quarter-period free propagator halves around an
/// explicit midpoint step of the variable-coefficient part.
LinearTrajectory evolve_linear(const GridSpec& g, const LinearSpec& spec, const CVec& u0,
                               double T, double dt);

struct AuditRecord {
    double t = 0.0;
    double norm_v_sq = 0.0;
    double dissipation = 0.0; // integral of phi |v_x|^2
    double residual = 0.0;    // d/dt ||v||^2 + dissipation
};

struct AuditReport {
    std::vector<AuditRecord> records;
    double c_min = 0.0; // smallest C with residual <= C ||v||^2 at every step
};

/// use_gauge = false audits the raw states (the comparison run).
AuditReport gauged_energy_audit(const GridSpec& g, const LinearSpec& spec,
                                const LinearTrajectory& traj, bool use_gauge = true);

struct SmoothingProbe {
    GridSpec grid;
    double a = 1.0;
    double delta_w = 2.0; // weight exponent, must be > 1
    double carrier = 16.0;
    double bandwidth = 2.0;
    double window = 0.01; // time window [-T_w, T_w]
    int time_steps = 64;
    int samples = 8;
    uint64_t seed = 1;
};

struct SmoothingResult {
    double weighted_ratio = 0.0;   // max over samples of LHS / ||u0||
    double unweighted_ratio = 0.0; // max of ||D^{3/2} u0|| / ||u0|| (comparator)
};

/// Monte-Carlo check of the weighted space-time bound
///   || (1+x^2)^{-delta_w/4} (-d^2/dx^2)^{3/4} exp(iat d^4/dx^4) u0 ||_{L^2(dt dx)}
///   <= C ||u0||, window-truncated; random band-limited u0 around the carrier.
SmoothingResult smoothing_ratio(const SmoothingProbe& probe);

} // namespace dflow

#include "dflow/linear.hpp"

#include "dflow/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dflow {

namespace {

double ramp_c2(double s) {
    // C^2 monotone spline: 0 at s=0, 1 at s=1, two flat derivatives at both ends.
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double cutoff(double xi, double r) { return ramp_c2(std::abs(xi) - r); }

RVec profile_or_zero(const RVec& p, int n) {
    if (p.empty()) return RVec(static_cast<size_t>(n), 0.0);
    return p;
}

CVec profile_or_zero(const CVec& p, int n) {
    if (p.empty()) return CVec(static_cast<size_t>(n), 0.0);
    return p;
}

} // namespace

void LinearSpec::validate(const GridSpec& g) const {
    g.validate();
    if (a == 0.0) throw Error("LinearSpec: a must be nonzero");
    size_t n = static_cast<size_t>(g.num_points);
    for (const RVec* p : {&beta, &phi})
        if (!p->empty() && p->size() != n)
            throw Error("LinearSpec: profile length does not match grid");
    if (!gamma.empty() && gamma.size() != n)
        throw Error("LinearSpec: profile length does not match grid");
    for (double v : phi)
        if (v < 0.0) throw Error("LinearSpec: phi must be nonnegative");
    if (!allow_hypothesis_violation) {
        RVec ph = profile_or_zero(phi, g.num_points);
        CVec ga = profile_or_zero(gamma, g.num_points);
        for (size_t i = 0; i < n; ++i)
            if (std::abs(ga[i].imag()) > ph[i] + 1e-14)
                throw Error("LinearSpec: |Im gamma| <= phi violated "
                            "(set allow_hypothesis_violation for the probe)");
    }
}

double default_cutoff_radius(const GridSpec& g, const LinearSpec& spec) {
    RVec Phi = antiderivative(g, profile_or_zero(spec.phi, g.num_points));
    double sup = sup_norm(Phi);
    return std::max(sup / std::abs(spec.a), 0.5);
}

GaugeOperator make_gauge(const GridSpec& g, const LinearSpec& spec) {
    spec.validate(g);
    GaugeOperator G;
    G.grid = g;
    G.a = spec.a;
    G.phi = profile_or_zero(spec.phi, g.num_points);
    G.cutoff_radius =
        spec.cutoff_radius > 0.0 ? spec.cutoff_radius : default_cutoff_radius(g, spec);
    G.Phi = antiderivative(g, G.phi);
    RVec xi = g.wavenumbers();
    G.symbol.resize(xi.size());
    for (size_t k = 0; k < xi.size(); ++k)
        G.symbol[k] = xi[k] == 0.0 ? 0.0 : cutoff(xi[k], G.cutoff_radius) / (4.0 * G.a * xi[k]);
    G.norm_bound = sup_norm(G.Phi) / (4.0 * std::abs(G.a) * G.cutoff_radius);
    if (G.norm_bound >= 0.5)
        throw Error("make_gauge: recorded norm bound >= 1/2, cutoff radius too small");
    return G;
}

CVec free_propagator(const GridSpec& g, const CVec& u0, double t, double a) {
    return apply_multiplier(g, u0, [&](double xi) {
        double x2 = xi * xi;
        return std::exp(std::complex<double>(0.0, a * t * x2 * x2));
    });
}

CVec gauge_tilde(const GaugeOperator& G, const CVec& v) {
    CVec fh = fft(v);
    for (size_t k = 0; k < fh.size(); ++k) fh[k] *= G.symbol[k];
    CVec kv = ifft(fh);
    for (size_t i = 0; i < kv.size(); ++i) kv[i] *= G.Phi[i];
    return kv;
}

CVec gauge_apply(const GaugeOperator& G, const CVec& v) {
    CVec out = gauge_tilde(G, v);
    for (size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    return out;
}

CVec gauge_invert(const GaugeOperator& G, const CVec& w) {
    if (G.norm_bound >= 1.0) throw Error("gauge_invert: cutoff radius too small");
    CVec acc = w;
    CVec term = w;
    double wn = l2_norm(G.grid, w);
    for (int l = 0; l < 200; ++l) {
        term = gauge_tilde(G, term);
        for (auto& c : term) c = -c;
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
        if (l2_norm(G.grid, term) < 1e-15 * wn) break;
    }
    return acc;
}

CommutatorProbe commutator_residual(const GaugeOperator& G, const CVec& v) {
    const GridSpec& g = G.grid;
    CVec d4v = derivative(g, v, 4);
    CVec comm = gauge_tilde(G, d4v);
    CVec lt = gauge_tilde(G, v);
    CVec d4lt = derivative(g, lt, 4);
    for (size_t i = 0; i < comm.size(); ++i) comm[i] -= d4lt[i];

    RVec phid = derivative(g, G.phi, 1);
    CVec vx = derivative(g, v, 1);
    CVec vxx = derivative(g, v, 2);
    std::complex<double> ia(0.0, G.a);
    CVec res(v.size());
    CVec matched(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        matched[i] = G.phi[i] * vxx[i];
        res[i] = ia * comm[i] - matched[i] - 1.5 * phid[i] * vx[i];
    }
    CommutatorProbe probe;
    probe.residual_l2 = l2_norm(g, res);
    probe.matched_term_l2 = l2_norm(g, matched);
    probe.residual_over_h1 = probe.residual_l2 / h1_norm(g, v);
    return probe;
}

LinearTrajectory evolve_linear(const GridSpec& g, const LinearSpec& spec, const CVec& u0,
                               double T, double dt) {
    spec.validate(g);
    if (!(dt > 0.0)) throw Error("evolve_linear: dt must be positive");
    RVec beta = profile_or_zero(spec.beta, g.num_points);
    CVec gamma = profile_or_zero(spec.gamma, g.num_points);

    auto variable_part = [&](const CVec& u) {
        CVec ux = derivative(g, u, 1);
        CVec bux(u.size());
        for (size_t i = 0; i < u.size(); ++i) bux[i] = beta[i] * ux[i];
        CVec dbux = derivative(g, bux, 1);
        CVec out(u.size());
        std::complex<double> im(0.0, 1.0);
        for (size_t i = 0; i < u.size(); ++i) out[i] = im * dbux[i] + gamma[i] * ux[i];
        return out;
    };

    LinearTrajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    long nsteps = static_cast<long>(std::ceil(std::abs(T) / dt - 1e-12));
    double sign = T < 0.0 ? -1.0 : 1.0;
    CVec u = u0;
    double done = 0.0;
    for (long step = 0; step < nsteps; ++step) {
        double h = sign * std::min(dt, std::abs(T) - done);
        u = free_propagator(g, u, 0.5 * h, spec.a);
        CVec k1 = variable_part(u);
        CVec mid(u.size());
        for (size_t i = 0; i < u.size(); ++i) mid[i] = u[i] + 0.5 * h * k1[i];
        CVec k2 = variable_part(mid);
        for (size_t i = 0; i < u.size(); ++i) u[i] += h * k2[i];
        u = free_propagator(g, u, 0.5 * h, spec.a);
        require_finite(u, "evolve_linear");
        done += std::abs(h);
        traj.times.push_back(sign * done);
        traj.states.push_back(u);
    }
    return traj;
}

AuditReport gauged_energy_audit(const GridSpec& g, const LinearSpec& spec,
                                const LinearTrajectory& traj, bool use_gauge) {
    if (traj.states.size() < 3) throw Error("gauged_energy_audit: need >= 3 snapshots");
    LinearSpec s2 = spec;
    s2.allow_hypothesis_violation = true; // audit may be run on the probe too
    GaugeOperator G = make_gauge(g, s2);
    RVec phi = profile_or_zero(spec.phi, g.num_points);

    size_t n = traj.states.size();
    RVec nv(n), diss(n);
    for (size_t i = 0; i < n; ++i) {
        CVec v = use_gauge ? gauge_apply(G, traj.states[i]) : traj.states[i];
        double nrm = l2_norm(g, v);
        nv[i] = nrm * nrm;
        CVec vxf = derivative(g, v, 1);
        double d = 0.0;
        for (size_t j = 0; j < vxf.size(); ++j) d += phi[j] * std::norm(vxf[j]);
        diss[i] = d * g.dx();
    }

    AuditReport rep;
    rep.records.resize(n);
    double cmin = -1e300;
    for (size_t i = 0; i < n; ++i) {
        double ddt;
        if (i == 0)
            ddt = (nv[1] - nv[0]) / (traj.times[1] - traj.times[0]);
        else if (i == n - 1)
            ddt = (nv[i] - nv[i - 1]) / (traj.times[i] - traj.times[i - 1]);
        else
            ddt = (nv[i + 1] - nv[i - 1]) / (traj.times[i + 1] - traj.times[i - 1]);
        AuditRecord& r = rep.records[i];
        r.t = traj.times[i];
        r.norm_v_sq = nv[i];
        r.dissipation = diss[i];
        r.residual = ddt + diss[i];
        if (nv[i] > 0.0) cmin = std::max(cmin, r.residual / nv[i]);
    }
    rep.c_min = cmin;
    return rep;
}

SmoothingResult smoothing_ratio(const SmoothingProbe& probe) {
    if (!(probe.delta_w > 1.0)) throw Error("smoothing_ratio: delta_w must exceed 1");
    const GridSpec& g = probe.grid;
    g.validate();
    RVec xi = g.wavenumbers();
    RVec xs = g.nodes();
    double mid = 0.5 * g.domain_length;
    RVec weight(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        double d = xs[i] - mid;
        weight[i] = std::pow(1.0 + d * d, -probe.delta_w / 4.0);
    }

    double xi_max = 0.0;
    for (double x : xi) xi_max = std::max(xi_max, std::abs(x));
    if (std::abs(probe.carrier) + probe.bandwidth > xi_max)
        throw Error("smoothing_ratio: carrier band resolves no grid mode");

    // Band-limited wave packets at random positions and phases. The weighted
    // bound concerns localized data; a spatially homogeneous superposition of
    // band modes has time-invariant local energy and shows no gain at all.
    double sigma_x = 2.0 / probe.bandwidth;
    SmoothingResult result;
    for (int s = 0; s < probe.samples; ++s) {
        Rng rng(probe.seed, static_cast<uint64_t>(s));
        double xc = s == 0 ? mid : rng.uniform(0.0, g.domain_length);
        double phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        CVec u0(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) {
            double d = xs[i] - xc;
            d -= g.domain_length * std::round(d / g.domain_length);
            double env = std::exp(-0.25 * d * d / (sigma_x * sigma_x));
            u0[i] = env * std::exp(std::complex<double>(0.0, probe.carrier * d + phase));
        }
        double u0n = l2_norm(g, u0);
        if (u0n == 0.0) continue;

        CVec d32 = apply_multiplier(g, u0, [](double x) {
            return std::complex<double>(std::pow(std::abs(x), 1.5), 0.0);
        });
        result.unweighted_ratio = std::max(result.unweighted_ratio, l2_norm(g, d32) / u0n);

        int nt = probe.time_steps;
        double ht = 2.0 * probe.window / nt;
        double acc = 0.0;
        for (int j = 0; j <= nt; ++j) {
            double t = -probe.window + j * ht;
            CVec w = free_propagator(g, u0, t, probe.a);
            CVec y = apply_multiplier(g, w, [](double x) {
                return std::complex<double>(std::pow(std::abs(x), 1.5), 0.0);
            });
            double sq = 0.0;
            for (size_t i = 0; i < y.size(); ++i) {
                double v = weight[i] * std::abs(y[i]);
                sq += v * v;
            }
            sq *= g.dx();
            double wq = (j == 0 || j == nt) ? 0.5 : 1.0;
            acc += wq * sq * ht;
        }
        result.weighted_ratio = std::max(result.weighted_ratio, std::sqrt(acc) / u0n);
    }
    return result;
}

} // namespace dflow

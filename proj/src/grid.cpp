#include "dflow/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace dflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf = nullptr;
    int n = 0;
};

// FFTW planning is not reentrant; execution on caller-owned buffers is.
PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    PlanPair p;
    p.n = n;
    p.buf = fftw_alloc_complex(static_cast<size_t>(n));
    p.fwd = fftw_plan_dft_1d(n, p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(n, p.buf, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    return cache.emplace(n, p).first->second;
}

CVec run_plan(const CVec& in, bool forward) {
    int n = static_cast<int>(in.size());
    PlanPair& p = plans_for(n);
    CVec out(in.size());
    auto* io = reinterpret_cast<std::complex<double>*>(p.buf);
    std::copy(in.begin(), in.end(), io);
    fftw_execute(forward ? p.fwd : p.bwd);
    std::copy(io, io + n, out.begin());
    if (!forward) {
        double s = 1.0 / n;
        for (auto& c : out) c *= s;
    }
    return out;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Central first-derivative stencils, half coefficients c_1..c_p/2 (antisymmetric).
const std::map<int, std::vector<double>> kFdHalf = {
    {2, {1.0 / 2}},
    {4, {2.0 / 3, -1.0 / 12}},
    {6, {3.0 / 4, -3.0 / 20, 1.0 / 60}},
    {8, {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280}},
};

RVec fd_derivative_once(const GridSpec& g, const RVec& f) {
    auto it = kFdHalf.find(g.fd_order);
    if (it == kFdHalf.end())
        throw Error("GridSpec: central_fd order must be one of 2, 4, 6, 8");
    const auto& c = it->second;
    int n = g.num_points;
    double inv_dx = 1.0 / g.dx();
    RVec out(f.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (size_t s = 0; s < c.size(); ++s) {
            int k = static_cast<int>(s) + 1;
            acc += c[s] * (f[(i + k) % n] - f[(i - k + 8 * n) % n]);
        }
        out[i] = acc * inv_dx;
    }
    return out;
}

} // namespace

void GridSpec::validate() const {
    if (num_points < 16 || !is_power_of_two(num_points))
        throw Error("GridSpec: num_points must be a power of two >= 16");
    if (!(domain_length > 0.0)) throw Error("GridSpec: domain_length must be positive");
    if (scheme == DerivScheme::central_fd && kFdHalf.find(fd_order) == kFdHalf.end())
        throw Error("GridSpec: central_fd order must be one of 2, 4, 6, 8");
}

RVec GridSpec::nodes() const {
    RVec xs(static_cast<size_t>(num_points));
    double h = dx();
    for (int i = 0; i < num_points; ++i) xs[i] = i * h;
    return xs;
}

RVec GridSpec::wavenumbers() const {
    RVec xi(static_cast<size_t>(num_points));
    double base = 2.0 * kPi / domain_length;
    for (int k = 0; k < num_points; ++k) {
        int kk = (k <= num_points / 2) ? k : k - num_points;
        xi[k] = base * kk;
    }
    return xi;
}

CVec fft(const CVec& in) { return run_plan(in, true); }
CVec ifft(const CVec& in) { return run_plan(in, false); }

CVec derivative(const GridSpec& g, const CVec& f, int order) {
    require_finite(f, "derivative input");
    CVec fh = fft(f);
    RVec xi = g.wavenumbers();
    int n = g.num_points;
    for (int k = 0; k < n; ++k) {
        std::complex<double> m = std::pow(std::complex<double>(0.0, xi[k]), order);
        if (order % 2 == 1 && k == n / 2) m = 0.0; // Nyquist has no signed direction
        fh[k] *= m;
    }
    return ifft(fh);
}

RVec derivative(const GridSpec& g, const RVec& f, int order) {
    require_finite(f, "derivative input");
    if (g.scheme == DerivScheme::central_fd) {
        RVec out = f;
        for (int i = 0; i < order; ++i) out = fd_derivative_once(g, out);
        return out;
    }
    CVec cf(f.size());
    for (size_t i = 0; i < f.size(); ++i) cf[i] = f[i];
    CVec cd = derivative(g, cf, order);
    RVec out(f.size());
    for (size_t i = 0; i < f.size(); ++i) out[i] = cd[i].real();
    return out;
}

CVec apply_multiplier(const GridSpec& g, const CVec& f,
                      const std::function<std::complex<double>(double)>& m) {
    CVec fh = fft(f);
    RVec xi = g.wavenumbers();
    for (int k = 0; k < g.num_points; ++k) fh[k] *= m(xi[k]);
    return ifft(fh);
}

RVec apply_multiplier(const GridSpec& g, const RVec& f, const std::function<double(double)>& m) {
    CVec cf(f.size());
    for (size_t i = 0; i < f.size(); ++i) cf[i] = f[i];
    CVec out = apply_multiplier(g, cf, [&](double xi) { return std::complex<double>(m(xi), 0.0); });
    RVec r(f.size());
    for (size_t i = 0; i < f.size(); ++i) r[i] = out[i].real();
    return r;
}

RVec antiderivative(const GridSpec& g, const RVec& f) {
    require_finite(f, "antiderivative input");
    int n = g.num_points;
    CVec cf(f.size());
    for (size_t i = 0; i < f.size(); ++i) cf[i] = f[i];
    CVec fh = fft(cf);
    double mean = fh[0].real() / n;
    fh[0] = 0.0;
    RVec xi = g.wavenumbers();
    for (int k = 1; k < n; ++k) {
        if (k == n / 2) { fh[k] = 0.0; continue; }
        fh[k] /= std::complex<double>(0.0, xi[k]);
    }
    CVec periodic = ifft(fh);
    RVec xs = g.nodes();
    RVec out(f.size());
    for (int i = 0; i < n; ++i) out[i] = mean * xs[i] + periodic[i].real();
    double left = out[0];
    for (auto& v : out) v -= left;
    return out;
}

double integrate(const GridSpec& g, const RVec& f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * g.dx();
}

double l2_norm(const GridSpec& g, const RVec& f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return std::sqrt(s * g.dx());
}

double l2_norm(const GridSpec& g, const CVec& f) {
    double s = 0.0;
    for (const auto& v : f) s += std::norm(v);
    return std::sqrt(s * g.dx());
}

double h1_norm(const GridSpec& g, const CVec& f) {
    CVec fx = derivative(g, f, 1);
    double a = l2_norm(g, f), b = l2_norm(g, fx);
    return std::sqrt(a * a + b * b);
}

double sup_norm(const RVec& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

double sup_norm(const CVec& f) {
    double m = 0.0;
    for (const auto& v : f) m = std::max(m, std::abs(v));
    return m;
}

void require_finite(const RVec& f, const char* what) {
    for (double v : f)
        if (!std::isfinite(v)) throw Error(std::string("non-finite state in ") + what);
}

void require_finite(const CVec& f, const char* what) {
    for (const auto& v : f)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(std::string("non-finite state in ") + what);
}

} // namespace dflow

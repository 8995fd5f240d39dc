#pragma once

#include "dflow/sphere.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace dflow {

using CVec = std::vector<std::complex<double>>;
using RVec = std::vector<double>;

enum class DerivScheme { spectral, central_fd };

/// Uniform periodic grid of period L, a computational surrogate for the line.
/// L should be large relative to the support of curvature of the data; the
/// boundary-window energy check in curve.hpp monitors that.
struct GridSpec {
    int num_points = 256;
    double domain_length = 2.0 * 3.14159265358979323846;
    DerivScheme scheme = DerivScheme::spectral;
    int fd_order = 8; // used only when scheme == central_fd

    void validate() const;
    double dx() const { return domain_length / num_points; }
    /// Sample locations x_j = j * dx, j = 0..N-1.
    RVec nodes() const;
    /// Fourier wavenumbers in FFTW layout: 2*pi*k/L for k = 0..N/2, then negative.
    RVec wavenumbers() const;
    bool operator==(const GridSpec& o) const {
        return num_points == o.num_points && domain_length == o.domain_length &&
               scheme == o.scheme && fd_order == o.fd_order;
    }
};

// Forward/inverse DFT (inverse carries the 1/N factor). Plans are cached per size.
CVec fft(const CVec& in);
CVec ifft(const CVec& in);

/// d^order/dx^order via the configured scheme. Spectral: multiplier (i xi)^order
/// with the Nyquist mode zeroed for odd orders. FD: iterated central stencil of
/// the configured accuracy order (2, 4, 6 or 8).
RVec derivative(const GridSpec& g, const RVec& f, int order = 1);
CVec derivative(const GridSpec& g, const CVec& f, int order = 1);

/// Apply a scalar Fourier multiplier m(xi).
RVec apply_multiplier(const GridSpec& g, const RVec& f, const std::function<double(double)>& m);
CVec apply_multiplier(const GridSpec& g, const CVec& f,
                      const std::function<std::complex<double>(double)>& m);

/// Primitive F with F' = f exactly on resolved modes and F(x_0) = 0. The mean
/// of f contributes a linear ramp, the rest a periodic zero-mean primitive.
RVec antiderivative(const GridSpec& g, const RVec& f);

double integrate(const GridSpec& g, const RVec& f);
double l2_norm(const GridSpec& g, const RVec& f);
double l2_norm(const GridSpec& g, const CVec& f);
double h1_norm(const GridSpec& g, const CVec& f);
double sup_norm(const RVec& f);
double sup_norm(const CVec& f);

void require_finite(const RVec& f, const char* what);
void require_finite(const CVec& f, const char* what);

} // namespace dflow

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "rfsi/errors.hpp"
#include "rfsi/fft.hpp"
#include "rfsi/types.hpp"

namespace rfsi {

/// Vertical line s = s1 + i s2 sampled at the midpoints of n_s equal cells of
/// [-s2_max, s2_max]. The grid is symmetric, so sample k and n_s - 1 - k are
/// complex conjugates.
struct LaplaceLine {
    double s1 = 1.0;
    double s2_max = 1.0;
    int n_s = 64;

    void validate() const {
        if (!(s1 > 0.0) || !std::isfinite(s1)) throw ValidationError("line shift s1 must be positive");
        if (!(s2_max > 0.0) || !std::isfinite(s2_max)) throw ValidationError("line half-width s2_max must be positive");
        if (n_s < 2 || n_s % 2 != 0) throw ValidationError("line sample count n_s must be even and at least 2");
    }

    double ds() const { return 2.0 * s2_max / n_s; }
    double s2(int k) const { return -s2_max + (k + 0.5) * ds(); }
    cplx s(int k) const { return {s1, s2(k)}; }
    int mirror(int k) const { return n_s - 1 - k; }

    std::vector<cplx> samples() const {
        std::vector<cplx> out(static_cast<std::size_t>(n_s));
        for (int k = 0; k < n_s; ++k) out[k] = s(k);
        return out;
    }

    /// s1 = 6/T and spacing pi/T, the widest spacing free of aliasing on [0, T].
    static LaplaceLine for_horizon(double T, int n_s = 1024) {
        if (!(T > 0.0)) throw ValidationError("time horizon must be positive");
        LaplaceLine line;
        line.s1 = 6.0 / T;
        line.n_s = n_s;
        line.s2_max = 0.5 * n_s * kPi / T;
        line.validate();
        return line;
    }
};

/// n_t equispaced times on [0, T] including both ends.
inline std::vector<double> uniform_times(double T, int n_t) {
    if (n_t < 2) throw ValidationError("time grid needs at least two points");
    std::vector<double> t(static_cast<std::size_t>(n_t));
    for (int k = 0; k < n_t; ++k) t[k] = T * k / (n_t - 1);
    return t;
}

/// Kernel K(i, k) such that u(t_i) = Re sum_k K(i, k) F(s_k).
inline Eigen::MatrixXcd inversion_kernel(const LaplaceLine& line, std::span<const double> times) {
    line.validate();
    Eigen::MatrixXcd K(static_cast<Eigen::Index>(times.size()), line.n_s);
    const double scale = line.ds() / (2.0 * kPi);
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (int k = 0; k < line.n_s; ++k) K(static_cast<Eigen::Index>(i), k) = scale * std::exp(line.s(k) * times[i]);
    }
    return K;
}

/// u(t) = e^{s1 t} (ds / 2 pi) sum_k F(s_k) e^{i s2_k t}, real part.
inline std::vector<double> invert_laplace_line(std::span<const cplx> samples, const LaplaceLine& line,
                                               std::span<const double> times) {
    line.validate();
    if (samples.size() != static_cast<std::size_t>(line.n_s)) {
        throw ShapeError("sample count " + std::to_string(samples.size()) + " does not match n_s = " +
                         std::to_string(line.n_s));
    }
    std::vector<double> u(times.size(), 0.0);
    const double scale = line.ds() / (2.0 * kPi);
    for (std::size_t i = 0; i < times.size(); ++i) {
        cplx acc = 0.0;
        for (int k = 0; k < line.n_s; ++k) acc += samples[k] * std::exp(line.s(k) * times[i]);
        u[i] = scale * acc.real();
    }
    return u;
}

/// Composite Simpson on a uniform grid; the last panel falls back to the 3/8
/// rule when the number of intervals is odd.
inline double simpson(std::span<const double> f, double dt) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * dt * (f[0] + f[1]);
    if (n == 4) return 3.0 * dt / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
    const std::size_t intervals = n - 1;
    const std::size_t simpson_end = intervals % 2 == 0 ? n - 1 : n - 4;
    double acc = 0.0;
    for (std::size_t k = 0; k + 2 <= simpson_end; k += 2) acc += dt / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
    if (simpson_end != n - 1) {
        const std::size_t k = simpson_end;
        acc += 3.0 * dt / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
    }
    return acc;
}

/// Relative mismatch of (1/2 pi) sum |F(s_k)|^2 ds and int e^{-2 s1 t} |u|^2 dt.
inline double parseval_residual(std::span<const double> times, std::span<const double> u,
                                std::span<const cplx> samples, const LaplaceLine& line) {
    if (times.size() != u.size()) throw ShapeError("time grid and series lengths differ");
    if (samples.size() != static_cast<std::size_t>(line.n_s)) throw ShapeError("sample count does not match n_s");
    double lhs = 0.0;
    for (const auto& F : samples) lhs += std::norm(F);
    lhs *= line.ds() / (2.0 * kPi);
    std::vector<double> integrand(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) integrand[i] = std::exp(-2.0 * line.s1 * times[i]) * u[i] * u[i];
    const double dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    const double rhs = simpson(integrand, dt);
    const double scale = std::max(lhs, rhs);
    return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

// ---------------------------------------------------------------------------
// Lateral spectral traces

/// Fourier-series coefficients of a lateral trace, FFT order, layout [m2 * n + m1].
struct SpectralTrace {
    int n = 0;
    double period = 1.0;
    std::vector<cplx> coeffs;

    double xi2(int k) const {
        const int a = k % n, b = k / n;
        const double k0 = 2.0 * kPi / period;
        const double x = k0 * signed_mode(a, n);
        const double y = k0 * signed_mode(b, n);
        return x * x + y * y;
    }

    /// L2 measure of one mode on the period cell.
    double mode_measure() const { return period * period; }

    int index(int m1, int m2) const { return ((m2 % n + n) % n) * n + ((m1 % n + n) % n); }

    bool is_hermitian(double tol = 1e-12) const {
        double scale = 0.0;
        for (const auto& c : coeffs) scale = std::max(scale, std::abs(c));
        for (int b = 0; b < n; ++b) {
            for (int a = 0; a < n; ++a) {
                const cplx u = coeffs[b * n + a];
                const cplx v = coeffs[index(-signed_mode(a, n), -signed_mode(b, n))];
                if (std::abs(u - std::conj(v)) > tol * std::max(scale, 1e-300)) return false;
            }
        }
        return true;
    }
};

inline SpectralTrace to_spectral(std::span<const cplx> nodal, int n, double period) {
    return {n, period, fft2_forward(nodal, n)};
}

inline SpectralTrace to_spectral(std::span<const double> nodal, int n, double period) {
    return {n, period, fft2_forward(nodal, n)};
}

inline std::vector<cplx> to_nodal(const SpectralTrace& trace) { return fft2_inverse(trace.coeffs, trace.n); }

}  // namespace rfsi

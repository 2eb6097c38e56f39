#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "rfsi/errors.hpp"
#include "rfsi/fft.hpp"
#include "rfsi/spectral.hpp"
#include "rfsi/types.hpp"

namespace rfsi {

/// Root of beta^2 = s^2/c^2 + |xi|^2 with Re beta > 0.
inline cplx beta(double xi2, cplx s, double c) {
    if (!(s.real() > 0.0)) throw DomainError("beta requires Re s > 0");
    if (!(c > 0.0)) throw DomainError("beta requires c > 0");
    if (!(xi2 >= 0.0)) throw DomainError("beta requires |xi|^2 >= 0");
    cplx b = std::sqrt(s * s / (c * c) + xi2);
    if (b.real() < 0.0) b = -b;
    return b;
}

/// Neumann datum of the outgoing extension: every mode multiplied by -beta.
inline SpectralTrace apply_dtn(const SpectralTrace& trace, cplx s, double c) {
    SpectralTrace out = trace;
    for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] *= -beta(trace.xi2(static_cast<int>(k)), s, c);
    return out;
}

/// -Re <s^-1 B u, u> as a mode sum; nonnegative for Re s > 0.
inline double dtn_dissipation(const SpectralTrace& trace, cplx s, double c) {
    double acc = 0.0;
    const double s_abs2 = std::norm(s);
    for (std::size_t k = 0; k < trace.coeffs.size(); ++k) {
        const cplx b = beta(trace.xi2(static_cast<int>(k)), s, c);
        acc += (std::conj(s) * b).real() / s_abs2 * std::norm(trace.coeffs[k]);
    }
    return acc * trace.mode_measure();
}

/// max over the lateral modes of |beta| / (1 + |xi|^2)^{1/2}.
inline double dtn_continuity_constant(int n, double period, cplx s, double c) {
    SpectralTrace probe{n, period, std::vector<cplx>(static_cast<std::size_t>(n) * n)};
    double best = 0.0;
    for (int k = 0; k < n * n; ++k) {
        const double x2 = probe.xi2(k);
        best = std::max(best, std::abs(beta(x2, s, c)) / std::sqrt(1.0 + x2));
    }
    return best;
}

/// Nodal realization of the transparent boundary term on the top layer of
/// the fluid mesh: v -> s^-1 (L/N)^2 IFFT(beta FFT(v)).
class DtnOperator {
public:
    DtnOperator() = default;

    DtnOperator(int n, double period, cplx s, double c) : n_(n), period_(period), s_(s) {
        SpectralTrace probe{n, period, {}};
        betas_.resize(static_cast<std::size_t>(n) * n);
        cplx mean = 0.0;
        for (int k = 0; k < n * n; ++k) {
            betas_[k] = beta(probe.xi2(k), s, c);
            mean += betas_[k];
        }
        mean /= static_cast<double>(n) * n;
        const double h = period / n;
        scale_ = h * h / s;
        diagonal_ = scale_ * mean;
    }

    int n() const { return n_; }
    cplx s() const { return s_; }

    /// Diagonal entry of the (circulant) block.
    cplx diagonal() const { return diagonal_; }

    std::vector<cplx> apply(std::span<const cplx> top) const {
        auto coeffs = fft2_forward(top, n_);
        for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] *= betas_[k];
        auto out = fft2_inverse(coeffs, n_);
        for (auto& v : out) v *= scale_;
        return out;
    }

    std::span<const cplx> betas() const { return betas_; }

private:
    int n_ = 0;
    double period_ = 1.0;
    cplx s_ = 1.0;
    cplx scale_ = 0.0;
    cplx diagonal_ = 0.0;
    std::vector<cplx> betas_;
};

}  // namespace rfsi

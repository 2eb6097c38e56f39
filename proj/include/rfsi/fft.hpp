#pragma once

// Two-dimensional periodic DFT on an n x n lateral grid.
//
// Storage convention used throughout the library: a nodal field on the lateral
// grid is a flat array indexed [j * n + i] with i the x index. Spectral
// coefficients use the same layout in FFT order; index k maps to the signed
// mode signed_mode(k, n) in [-n/2, n/2).
//
// Normalization: forward produces Fourier-series coefficients
//     c_m = n^-2 * sum_{ij} u_ij exp(-2 pi i (m1 i + m2 j) / n)
// and inverse evaluates u_ij = sum_m c_m exp(+2 pi i (m1 i + m2 j) / n).

#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "rfsi/errors.hpp"
#include "rfsi/types.hpp"

namespace rfsi {

inline int signed_mode(int k, int n) { return k < (n + 1) / 2 ? k : k - n; }

namespace detail {

inline void fft_lines(std::vector<cplx>& data, int n, bool along_x, bool forward) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cplx> line(static_cast<std::size_t>(n));
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            line[b] = along_x ? data[a * n + b] : data[b * n + a];
        }
        if (forward) {
            fft.fwd(out, line);
        } else {
            fft.inv(out, line);
        }
        for (int b = 0; b < n; ++b) {
            (along_x ? data[a * n + b] : data[b * n + a]) = out[b];
        }
    }
}

inline void check_square(std::size_t size, int n) {
    if (n <= 0 || size != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw ShapeError("lateral field size does not match an n x n grid");
    }
}

}  // namespace detail

inline std::vector<cplx> fft2_forward(std::span<const cplx> nodal, int n) {
    detail::check_square(nodal.size(), n);
    std::vector<cplx> data(nodal.begin(), nodal.end());
    detail::fft_lines(data, n, true, true);
    detail::fft_lines(data, n, false, true);
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (auto& v : data) v *= scale;
    return data;
}

inline std::vector<cplx> fft2_inverse(std::span<const cplx> coeffs, int n) {
    detail::check_square(coeffs.size(), n);
    std::vector<cplx> data(coeffs.begin(), coeffs.end());
    detail::fft_lines(data, n, true, false);
    detail::fft_lines(data, n, false, false);
    return data;
}

inline std::vector<cplx> fft2_forward(std::span<const double> nodal, int n) {
    std::vector<cplx> tmp(nodal.begin(), nodal.end());
    return fft2_forward(std::span<const cplx>(tmp), n);
}

}  // namespace rfsi

#pragma once

// Laterally periodic two-slab geometry: fluid slab f <= z <= h above the rough
// interface, solid slab g <= z <= f below it. Both slabs share the lateral grid
// and are meshed with trilinear hexahedra, uniform in the mapped vertical
// coordinate.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rfsi/errors.hpp"
#include "rfsi/fft.hpp"
#include "rfsi/types.hpp"

namespace rfsi {

// ---------------------------------------------------------------------------
// Surfaces

struct SinusoidTerm {
    double amplitude = 0.0;
    int mode_x = 1;  ///< integer wavenumber along x (period / wavelength)
    int mode_y = 0;
    double phase = 0.0;
};

/// Closed-form periodic height field: offset + sum of sinusoids.
struct SurfaceSpec {
    double offset = 0.0;
    std::vector<SinusoidTerm> terms;

    static SurfaceSpec flat(double offset) { return {offset, {}}; }

    static SurfaceSpec sinusoid(double offset, double amplitude, int mode_x, int mode_y = 0) {
        return {offset, {{amplitude, mode_x, mode_y, 0.0}}};
    }

    double value(double x, double y, double period) const {
        double v = offset;
        for (const auto& t : terms) {
            v += t.amplitude * std::sin(2.0 * kPi * (t.mode_x * x + t.mode_y * y) / period + t.phase);
        }
        return v;
    }

    std::array<double, 2> gradient(double x, double y, double period) const {
        std::array<double, 2> grad{0.0, 0.0};
        for (const auto& t : terms) {
            const double k = 2.0 * kPi / period;
            const double c = t.amplitude * k * std::cos(k * (t.mode_x * x + t.mode_y * y) + t.phase);
            grad[0] += c * t.mode_x;
            grad[1] += c * t.mode_y;
        }
        return grad;
    }
};

/// Sampled interface f and bottom g on an n x n periodic grid, with the
/// truncation height h of the transparent boundary.
struct RoughSurfacePair {
    double period = 1.0;
    int n = 0;
    std::vector<double> f;  ///< [j * n + i]
    std::vector<double> g;
    double h = 1.0;

    double spacing() const { return period / n; }
    double x(int i) const { return i * spacing(); }
    double y(int j) const { return j * spacing(); }
    double f_at(int i, int j) const { return f[static_cast<std::size_t>(wrap(j) * n + wrap(i))]; }
    double g_at(int i, int j) const { return g[static_cast<std::size_t>(wrap(j) * n + wrap(i))]; }
    int wrap(int i) const { return ((i % n) + n) % n; }

    /// Throws ValidationError unless g < f < h pointwise with finite samples.
    void validate() const {
        if (n < 2) throw ValidationError("lateral resolution must be at least 2");
        if (!(period > 0.0) || !std::isfinite(period)) throw ValidationError("period must be positive");
        const auto count = static_cast<std::size_t>(n) * n;
        if (f.size() != count || g.size() != count) {
            throw ValidationError("surface sample arrays do not match the n x n grid");
        }
        for (std::size_t k = 0; k < count; ++k) {
            if (!std::isfinite(f[k]) || !std::isfinite(g[k])) {
                throw ValidationError("non-finite surface sample at index " + std::to_string(k));
            }
            if (!(g[k] < f[k])) {
                std::ostringstream os;
                os << "g(r) < f(r) violated at lateral node (" << k % n << ", " << k / n
                   << "): g = " << g[k] << ", f = " << f[k];
                throw ValidationError(os.str());
            }
            if (!(f[k] < h)) {
                std::ostringstream os;
                os << "f(r) < h violated at lateral node (" << k % n << ", " << k / n << "): f = " << f[k]
                   << ", h = " << h;
                throw ValidationError(os.str());
            }
        }
    }
};

inline RoughSurfacePair sample_surfaces(const SurfaceSpec& interface, const SurfaceSpec& bottom, double period,
                                        int n, double h) {
    RoughSurfacePair s;
    s.period = period;
    s.n = n;
    s.h = h;
    if (n < 2) throw ValidationError("lateral resolution must be at least 2");
    s.f.resize(static_cast<std::size_t>(n) * n);
    s.g.resize(s.f.size());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            s.f[j * n + i] = interface.value(s.x(i), s.y(j), period);
            s.g[j * n + i] = bottom.value(s.x(i), s.y(j), period);
        }
    }
    s.validate();
    return s;
}

/// Reads a height field with header `x,y,f,g`. Rows must cover the n x n grid
/// x = i L / n, y = j L / n exactly once (any order).
inline RoughSurfacePair load_surfaces_csv(const std::string& path, double period, double h) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open surface file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
    line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
               line.end());
    if (line != "x,y,f,g") throw ValidationError(path + ": header must be `x,y,f,g`");
    struct Row { double x, y, f, g; };
    std::vector<Row> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        Row r{};
        if (!(ls >> r.x >> r.y >> r.f >> r.g)) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected four numbers");
        }
        rows.push_back(r);
    }
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows.size()))));
    if (n < 2 || static_cast<std::size_t>(n) * n != rows.size()) {
        throw ValidationError(path + ": row count is not a square n x n grid");
    }
    RoughSurfacePair s;
    s.period = period;
    s.n = n;
    s.h = h;
    s.f.assign(rows.size(), std::nan(""));
    s.g.assign(rows.size(), std::nan(""));
    const double dx = period / n;
    for (const auto& r : rows) {
        const double fi = r.x / dx;
        const double fj = r.y / dx;
        const int i = static_cast<int>(std::lround(fi));
        const int j = static_cast<int>(std::lround(fj));
        if (std::abs(fi - i) > 1e-6 || std::abs(fj - j) > 1e-6 || i < 0 || j < 0 || i >= n || j >= n) {
            throw ValidationError(path + ": sample (" + std::to_string(r.x) + ", " + std::to_string(r.y) +
                                  ") is not on the uniform periodic grid");
        }
        if (!std::isnan(s.f[j * n + i])) throw ValidationError(path + ": duplicate grid sample");
        s.f[j * n + i] = r.f;
        s.g[j * n + i] = r.g;
    }
    s.validate();
    return s;
}

/// Spectral lateral gradient of a periodic sampled field. The Nyquist mode is
/// dropped so the derivative of a real field stays real.
inline std::array<std::vector<double>, 2> spectral_gradient(std::span<const double> samples, int n, double period) {
    const auto coeffs = fft2_forward(samples, n);
    std::vector<cplx> dx(coeffs.size()), dy(coeffs.size());
    const double k0 = 2.0 * kPi / period;
    for (int b = 0; b < n; ++b) {
        for (int a = 0; a < n; ++a) {
            const int mx = signed_mode(a, n);
            const int my = signed_mode(b, n);
            const bool nyq_x = (n % 2 == 0) && a == n / 2;
            const bool nyq_y = (n % 2 == 0) && b == n / 2;
            const cplx c = coeffs[b * n + a];
            dx[b * n + a] = nyq_x ? cplx{} : cplx(0.0, k0 * mx) * c;
            dy[b * n + a] = nyq_y ? cplx{} : cplx(0.0, k0 * my) * c;
        }
    }
    const auto gx = fft2_inverse(dx, n);
    const auto gy = fft2_inverse(dy, n);
    std::array<std::vector<double>, 2> out;
    out[0].resize(gx.size());
    out[1].resize(gy.size());
    for (std::size_t k = 0; k < gx.size(); ++k) {
        out[0][k] = gx[k].real();
        out[1][k] = gy[k].real();
    }
    return out;
}

/// Surface-measure weights sqrt(1 + |grad f|^2) at every lateral node.
inline std::vector<double> interface_weights(const RoughSurfacePair& s) {
    const auto grad = spectral_gradient(s.f, s.n, s.period);
    std::vector<double> w(s.f.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = std::sqrt(1.0 + grad[0][k] * grad[0][k] + grad[1][k] * grad[1][k]);
    }
    return w;
}

inline double interface_weight(const RoughSurfacePair& s, int i, int j) {
    if (i < 0 || j < 0 || i >= s.n || j >= s.n) throw ShapeError("lateral index out of range");
    return interface_weights(s)[static_cast<std::size_t>(j * s.n + i)];
}

// ---------------------------------------------------------------------------
// Trilinear reference element on [0,1]^3. Local node a = di + 2 dj + 4 dk.

namespace fem {

inline constexpr std::array<double, 2> kGauss2 = {0.5 - 0.5 / 1.7320508075688772, 0.5 + 0.5 / 1.7320508075688772};
inline constexpr double kGauss2Weight = 0.5;

struct RefPoint {
    double xi, eta, zeta, weight;
};

inline std::array<RefPoint, 8> gauss_points_3d() {
    std::array<RefPoint, 8> pts{};
    int q = 0;
    for (int c = 0; c < 2; ++c)
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a)
                pts[q++] = {kGauss2[a], kGauss2[b], kGauss2[c], 0.125};
    return pts;
}

inline std::array<double, 8> shape(double xi, double eta, double zeta) {
    std::array<double, 8> N{};
    for (int a = 0; a < 8; ++a) {
        const double fx = (a & 1) ? xi : 1.0 - xi;
        const double fy = (a & 2) ? eta : 1.0 - eta;
        const double fz = (a & 4) ? zeta : 1.0 - zeta;
        N[a] = fx * fy * fz;
    }
    return N;
}

/// Reference gradients dN_a/d(xi, eta, zeta).
inline std::array<Vec3, 8> shape_grad(double xi, double eta, double zeta) {
    std::array<Vec3, 8> G{};
    for (int a = 0; a < 8; ++a) {
        const double fx = (a & 1) ? xi : 1.0 - xi;
        const double fy = (a & 2) ? eta : 1.0 - eta;
        const double fz = (a & 4) ? zeta : 1.0 - zeta;
        const double dx = (a & 1) ? 1.0 : -1.0;
        const double dy = (a & 2) ? 1.0 : -1.0;
        const double dz = (a & 4) ? 1.0 : -1.0;
        G[a] = {dx * fy * fz, fx * dy * fz, fx * fy * dz};
    }
    return G;
}

inline std::array<double, 4> shape2(double xi, double eta) {
    return {(1 - xi) * (1 - eta), xi * (1 - eta), (1 - xi) * eta, xi * eta};
}

}  // namespace fem

// ---------------------------------------------------------------------------
// Mesh

/// Geometric data at one volume quadrature point.
struct QuadPoint {
    double det_j = 0.0;  ///< det d(x,y,z)/d(xi,eta,zeta)
    Mat3 inv_j{};        ///< inv_j[r][c] = d(ref_r)/d(phys_c)
    Vec3 x{};
    double weight = 0.0;  ///< reference weight times det_j
};

/// One slab meshed as nz layers of n x n periodic hexahedra.
struct SlabMesh {
    int n = 0;
    double period = 1.0;
    int nz = 0;
    std::vector<double> z;            ///< node heights, [(k * n + j) * n + i]
    std::vector<QuadPoint> qpoints;   ///< 8 per cell, cell-major

    double spacing() const { return period / n; }
    int num_nodes() const { return (nz + 1) * n * n; }
    int num_cells() const { return nz * n * n; }
    int node(int i, int j, int k) const { return (k * n + ((j % n) + n) % n) * n + ((i % n) + n) % n; }
    int cell(int i, int j, int k) const { return (k * n + j) * n + i; }
    std::array<int, 3> cell_ijk(int c) const { return {c % n, (c / n) % n, c / (n * n)}; }

    std::array<int, 8> cell_nodes(int c) const {
        const auto [i, j, k] = cell_ijk(c);
        std::array<int, 8> nodes{};
        for (int a = 0; a < 8; ++a) nodes[a] = node(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
        return nodes;
    }

    /// Unwrapped physical corner coordinates of a cell (x may exceed the period).
    std::array<Vec3, 8> cell_corners(int c) const {
        const auto [i, j, k] = cell_ijk(c);
        const auto nodes = cell_nodes(c);
        const double d = spacing();
        std::array<Vec3, 8> X{};
        for (int a = 0; a < 8; ++a) {
            X[a] = {(i + (a & 1)) * d, (j + ((a >> 1) & 1)) * d, z[static_cast<std::size_t>(nodes[a])]};
        }
        return X;
    }

    const QuadPoint& qp(int c, int q) const { return qpoints[static_cast<std::size_t>(c) * 8 + q]; }
};

/// Geometric data at one interface quadrature point (2 x 2 Gauss per lateral cell).
struct InterfacePoint {
    Vec3 normal_area{};  ///< (-df/dx, -df/dy, 1) * reference weight * dx * dy: n dgamma
    double weight = 0.0; ///< sqrt(1 + |grad f|^2) * reference weight * dx * dy: dgamma
    double xi = 0.0, eta = 0.0;
    Vec3 x{};            ///< physical position (x may exceed the period)
};

struct MappedMesh {
    RoughSurfacePair surfaces;
    SlabMesh fluid;  ///< k = 0 on the interface, k = nz on z = h
    SlabMesh solid;  ///< k = 0 on the bottom, k = nz on the interface
    std::vector<double> node_weights;          ///< sqrt(1+|grad f|^2) per lateral node
    std::array<std::vector<double>, 2> grad_f; ///< spectral gradient per lateral node
    std::vector<InterfacePoint> interface;     ///< 4 per lateral cell

    int n() const { return surfaces.n; }
    double period() const { return surfaces.period; }
    double h() const { return surfaces.h; }

    std::vector<int> top_nodes() const { return layer_nodes(fluid, fluid.nz); }
    std::vector<int> fluid_interface_nodes() const { return layer_nodes(fluid, 0); }
    std::vector<int> solid_interface_nodes() const { return layer_nodes(solid, solid.nz); }
    std::vector<int> bottom_nodes() const { return layer_nodes(solid, 0); }

    /// Determinant h / (h - f) of the map z -> h (z - f) / (h - f) that flattens the fluid slab.
    double fluid_map_determinant(int i, int j) const { return h() / (h() - surfaces.f_at(i, j)); }

    /// Determinant t / (f - g) of the map z -> t (z - g) / (f - g), t = mean(f - g).
    double solid_map_determinant(int i, int j) const {
        double mean = 0.0;
        for (std::size_t k = 0; k < surfaces.f.size(); ++k) mean += surfaces.f[k] - surfaces.g[k];
        mean /= static_cast<double>(surfaces.f.size());
        return mean / (surfaces.f_at(i, j) - surfaces.g_at(i, j));
    }

    static std::vector<int> layer_nodes(const SlabMesh& m, int k) {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(m.n) * m.n);
        for (int j = 0; j < m.n; ++j)
            for (int i = 0; i < m.n; ++i) out.push_back(m.node(i, j, k));
        return out;
    }
};

namespace detail {

inline Mat3 invert3(const Mat3& a, double det) {
    Mat3 inv{};
    inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    return inv;
}

}  // namespace detail

/// Recomputes quadrature data from node heights; throws GeometryError on the
/// first cell whose Jacobian determinant is not strictly positive.
inline void compute_quadrature(SlabMesh& m, const char* label) {
    const auto pts = fem::gauss_points_3d();
    m.qpoints.assign(static_cast<std::size_t>(m.num_cells()) * 8, QuadPoint{});
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto X = m.cell_corners(c);
        for (int q = 0; q < 8; ++q) {
            const auto& p = pts[q];
            const auto N = fem::shape(p.xi, p.eta, p.zeta);
            const auto G = fem::shape_grad(p.xi, p.eta, p.zeta);
            Mat3 J{};  // J[r][c] = d phys_r / d ref_c
            Vec3 x{};
            for (int a = 0; a < 8; ++a) {
                for (int r = 0; r < 3; ++r) {
                    x[r] += N[a] * X[a][r];
                    for (int cc = 0; cc < 3; ++cc) J[r][cc] += X[a][r] * G[a][cc];
                }
            }
            const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                               J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                               J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
            if (!(det > 0.0)) {
                const auto [i, j, k] = m.cell_ijk(c);
                std::ostringstream os;
                os << label << " cell (" << i << ", " << j << ", " << k
                   << ") has non-positive Jacobian determinant " << det;
                throw GeometryError(os.str());
            }
            auto& out = m.qpoints[static_cast<std::size_t>(c) * 8 + q];
            out.det_j = det;
            out.inv_j = detail::invert3(J, det);
            out.x = x;
            out.weight = p.weight * det;
        }
    }
}

/// Same as build_mesh but accepts single-layer slabs; used for element-level checks.
inline MappedMesh build_mesh_layers(const RoughSurfacePair& surfaces, int nz_fluid, int nz_solid) {
    surfaces.validate();
    if (nz_fluid < 1 || nz_solid < 1) throw ValidationError("vertical layer counts must be positive");
    MappedMesh mesh;
    mesh.surfaces = surfaces;
    const int n = surfaces.n;
    auto init = [&](SlabMesh& m, int nz) {
        m.n = n;
        m.period = surfaces.period;
        m.nz = nz;
        m.z.resize(static_cast<std::size_t>(m.num_nodes()));
    };
    init(mesh.fluid, nz_fluid);
    init(mesh.solid, nz_solid);
    const double h = surfaces.h;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double f = surfaces.f_at(i, j);
            const double g = surfaces.g_at(i, j);
            for (int k = 0; k <= nz_fluid; ++k) {
                // uniform in the flattened coordinate z~ = h (z - f) / (h - f)
                mesh.fluid.z[mesh.fluid.node(i, j, k)] =
                    k == nz_fluid ? h : f + (h - f) * static_cast<double>(k) / nz_fluid;
            }
            for (int k = 0; k <= nz_solid; ++k) {
                mesh.solid.z[mesh.solid.node(i, j, k)] =
                    k == nz_solid ? f : g + (f - g) * static_cast<double>(k) / nz_solid;
            }
        }
    }
    compute_quadrature(mesh.fluid, "fluid");
    compute_quadrature(mesh.solid, "solid");

    mesh.grad_f = spectral_gradient(surfaces.f, n, surfaces.period);
    mesh.node_weights = interface_weights(surfaces);

    const double d = surfaces.spacing();
    mesh.interface.resize(static_cast<std::size_t>(n) * n * 4);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::array<int, 4> lat = {j * n + i, j * n + (i + 1) % n, ((j + 1) % n) * n + i,
                                            ((j + 1) % n) * n + (i + 1) % n};
            int q = 0;
            for (int b = 0; b < 2; ++b) {
                for (int a = 0; a < 2; ++a) {
                    const double xi = fem::kGauss2[a];
                    const double eta = fem::kGauss2[b];
                    const auto S = fem::shape2(xi, eta);
                    double gx = 0.0, gy = 0.0, fz = 0.0;
                    for (int v = 0; v < 4; ++v) {
                        gx += S[v] * mesh.grad_f[0][lat[v]];
                        gy += S[v] * mesh.grad_f[1][lat[v]];
                        fz += S[v] * surfaces.f[lat[v]];
                    }
                    const double wref = fem::kGauss2Weight * fem::kGauss2Weight * d * d;
                    auto& ip = mesh.interface[static_cast<std::size_t>(j * n + i) * 4 + q++];
                    ip.normal_area = {-gx * wref, -gy * wref, wref};
                    ip.weight = std::sqrt(1.0 + gx * gx + gy * gy) * wref;
                    ip.xi = xi;
                    ip.eta = eta;
                    ip.x = {(i + xi) * d, (j + eta) * d, fz};
                }
            }
        }
    }
    return mesh;
}

inline MappedMesh build_mesh(const RoughSurfacePair& surfaces, int nz_fluid, int nz_solid) {
    if (nz_fluid < 2 || nz_solid < 2) throw ValidationError("vertical layer counts must be at least 2");
    return build_mesh_layers(surfaces, nz_fluid, nz_solid);
}

/// Flat reference slab with the same lateral grid: f = 0, g = -depth.
inline MappedMesh build_flat_mesh(double period, int n, double h, double depth, int nz_fluid, int nz_solid) {
    return build_mesh(sample_surfaces(SurfaceSpec::flat(0.0), SurfaceSpec::flat(-depth), period, n, h), nz_fluid,
                      nz_solid);
}

inline double slab_volume(const SlabMesh& m) {
    double v = 0.0;
    for (const auto& q : m.qpoints) v += q.weight;
    return v;
}

}  // namespace rfsi

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfsi/errors.hpp"
#include "rfsi/geometry.hpp"
#include "rfsi/spectral.hpp"
#include "rfsi/types.hpp"

namespace rfsi {

/// Outcome of a discrete norm inequality lhs <= rhs.
struct NormReport {
    std::string name;
    std::vector<std::pair<std::string, double>> values;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double tolerance = 0.0;
    bool pass = true;

    double value(const std::string& key) const {
        for (const auto& [k, v] : values)
            if (k == key) return v;
        throw ValidationError("norm report has no value named " + key);
    }
};

inline NormReport make_report(std::string name, double lhs, double rhs, double tolerance = 0.0) {
    NormReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tolerance;
    r.ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.pass = r.ratio <= 1.0 + tolerance;
    return r;
}

/// Discrete H^alpha norm of a periodic lateral trace:
/// [sum (1 + |xi|^2)^alpha |u_hat|^2 * measure]^(1/2).
inline double trace_half_norm(const SpectralTrace& trace, double alpha) {
    double acc = 0.0;
    for (std::size_t k = 0; k < trace.coeffs.size(); ++k)
        acc += std::pow(1.0 + trace.xi2(static_cast<int>(k)), alpha) * std::norm(trace.coeffs[k]);
    return std::sqrt(acc * trace.mode_measure());
}

/// Least-squares slope of log y against log x.
inline double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ShapeError("slope fit needs matching series of length >= 2");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw DomainError("slope fit needs positive values");
        mx += std::log(x[k]) / n;
        my += std::log(y[k]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = std::log(x[k]) - mx;
        sxy += dx * (std::log(y[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Flat slab fields

/// Scalar field on a flat periodic slab: trigonometric in x, y and piecewise
/// linear in z between the layer heights.
struct SlabField {
    int n = 0;
    double period = 1.0;
    std::vector<double> z;       ///< increasing layer heights, nz + 1 of them
    std::vector<double> values;  ///< [(k * n + j) * n + i]

    int layers() const { return static_cast<int>(z.size()); }
    double thickness() const { return z.back() - z.front(); }

    void validate() const {
        if (n < 1 || z.size() < 2) throw ShapeError("slab field needs n >= 1 and at least two layers");
        if (values.size() != z.size() * static_cast<std::size_t>(n) * n)
            throw ShapeError("slab field values do not match the grid");
        for (std::size_t k = 1; k < z.size(); ++k)
            if (!(z[k] > z[k - 1])) throw GeometryError("slab layer heights must increase");
    }

    std::span<const double> layer(int k) const {
        const std::size_t nn = static_cast<std::size_t>(n) * n;
        return {values.data() + nn * static_cast<std::size_t>(k), nn};
    }
};

enum class SlabFace { bottom, top };

/// H1 norm of a slab field, exact for its representation: mode-wise in the
/// lateral variables, exact piecewise-linear integrals in z.
inline double slab_h1_norm(const SlabField& u) {
    u.validate();
    std::vector<SpectralTrace> modes;
    modes.reserve(u.z.size());
    for (int k = 0; k < u.layers(); ++k) modes.push_back(to_spectral(u.layer(k), u.n, u.period));
    double acc = 0.0;
    for (std::size_t m = 0; m < modes[0].coeffs.size(); ++m) {
        const double w = 1.0 + modes[0].xi2(static_cast<int>(m));
        for (int k = 0; k + 1 < u.layers(); ++k) {
            const double dz = u.z[k + 1] - u.z[k];
            const cplx a = modes[k].coeffs[m], b = modes[k + 1].coeffs[m];
            const double mass = dz / 3.0 * (std::norm(a) + (a * std::conj(b)).real() + std::norm(b));
            acc += w * mass + std::norm(b - a) / dz;
        }
    }
    return std::sqrt(acc * u.period * u.period);
}

/// ||u||_{H^1/2(face)} <= gamma0 ||u||_{H^1(slab)}, gamma0 = (1 + 1/thickness)^(1/2).
inline NormReport trace_inequality_check(const SlabField& u, SlabFace face, double tolerance = 1e-12) {
    u.validate();
    const int k = face == SlabFace::bottom ? 0 : u.layers() - 1;
    const double lhs = trace_half_norm(to_spectral(u.layer(k), u.n, u.period), 0.5);
    const double gamma0 = std::sqrt(1.0 + 1.0 / u.thickness());
    const double h1 = slab_h1_norm(u);
    auto r = make_report("trace_inequality", lhs, gamma0 * h1, tolerance);
    r.values = {{"trace_h_half", lhs}, {"h1", h1}, {"gamma0", gamma0}};
    return r;
}

// ---------------------------------------------------------------------------
// Volume norms on mapped meshes

struct VolumeNorms {
    double l2 = 0.0;      ///< ||u||^2
    double grad = 0.0;    ///< ||grad u||^2 (Frobenius for vector fields)
    double div = 0.0;     ///< ||div u||^2, vector fields only

    double h1() const { return l2 + grad; }
};

namespace detail {

struct RefTables {
    std::array<std::array<double, 8>, 8> phi;
    std::array<std::array<Vec3, 8>, 8> dphi;
};

inline const RefTables& ref_tables() {
    static const RefTables t = [] {
        RefTables r{};
        const auto pts = fem::gauss_points_3d();
        for (int q = 0; q < 8; ++q) {
            r.phi[q] = fem::shape(pts[q].xi, pts[q].eta, pts[q].zeta);
            r.dphi[q] = fem::shape_grad(pts[q].xi, pts[q].eta, pts[q].zeta);
        }
        return r;
    }();
    return t;
}

inline Vec3 physical_gradient(const QuadPoint& qp, const Vec3& ref) {
    Vec3 g{};
    for (int c = 0; c < 3; ++c) g[c] = ref[0] * qp.inv_j[0][c] + ref[1] * qp.inv_j[1][c] + ref[2] * qp.inv_j[2][c];
    return g;
}

}  // namespace detail

/// Squared norms of a scalar nodal field on a slab mesh, 2 x 2 x 2 Gauss.
inline VolumeNorms scalar_norms(const SlabMesh& mesh, std::span<const double> u) {
    if (u.size() != static_cast<std::size_t>(mesh.num_nodes())) throw ShapeError("scalar field does not match the mesh");
    const auto& t = detail::ref_tables();
    VolumeNorms out;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto nodes = mesh.cell_nodes(c);
        for (int q = 0; q < 8; ++q) {
            const auto& qp = mesh.qp(c, q);
            double v = 0.0;
            Vec3 ref{};
            for (int a = 0; a < 8; ++a) {
                const double ua = u[static_cast<std::size_t>(nodes[a])];
                v += t.phi[q][a] * ua;
                for (int r = 0; r < 3; ++r) ref[r] += t.dphi[q][a][r] * ua;
            }
            const Vec3 g = detail::physical_gradient(qp, ref);
            out.l2 += qp.weight * v * v;
            out.grad += qp.weight * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        }
    }
    return out;
}

/// Squared norms of a 3-component nodal field, layout 3 * node + component.
inline VolumeNorms vector_norms(const SlabMesh& mesh, std::span<const double> u) {
    if (u.size() != 3 * static_cast<std::size_t>(mesh.num_nodes()))
        throw ShapeError("vector field does not match the mesh");
    const auto& t = detail::ref_tables();
    VolumeNorms out;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto nodes = mesh.cell_nodes(c);
        for (int q = 0; q < 8; ++q) {
            const auto& qp = mesh.qp(c, q);
            Vec3 v{};
            Mat3 ref{};  // ref[comp][r]
            for (int a = 0; a < 8; ++a)
                for (int comp = 0; comp < 3; ++comp) {
                    const double ua = u[3 * static_cast<std::size_t>(nodes[a]) + comp];
                    v[comp] += t.phi[q][a] * ua;
                    for (int r = 0; r < 3; ++r) ref[comp][r] += t.dphi[q][a][r] * ua;
                }
            double frob = 0.0, div = 0.0;
            for (int comp = 0; comp < 3; ++comp) {
                const Vec3 g = detail::physical_gradient(qp, ref[comp]);
                frob += g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
                div += g[comp];
            }
            out.l2 += qp.weight * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            out.grad += qp.weight * frob;
            out.div += qp.weight * div * div;
        }
    }
    return out;
}

/// ||grad u||_F^2 + ||div u||^2 <= 4 ||u||_{H^1}^2 for u vanishing on the bottom layer.
inline NormReport frobenius_div_check(const SlabMesh& solid, std::span<const double> u, double tolerance = 1e-12) {
    if (u.size() != 3 * static_cast<std::size_t>(solid.num_nodes()))
        throw ShapeError("vector field does not match the mesh");
    for (int j = 0; j < solid.n; ++j)
        for (int i = 0; i < solid.n; ++i)
            for (int comp = 0; comp < 3; ++comp)
                if (u[3 * static_cast<std::size_t>(solid.node(i, j, 0)) + comp] != 0.0)
                    throw PreconditionError("field must vanish on the bottom surface");
    const auto n = vector_norms(solid, u);
    auto r = make_report("frobenius_div", n.grad + n.div, 4.0 * n.h1(), tolerance);
    r.values = {{"grad_frobenius_sq", n.grad}, {"div_sq", n.div}, {"h1_sq", n.h1()}};
    return r;
}

// ---------------------------------------------------------------------------
// Flattening maps

/// Flat slab with the lateral grid of `like` and layer heights z_k = z0 + (z1 - z0) k / nz.
inline SlabMesh flat_slab(const SlabMesh& like, double z0, double z1) {
    SlabMesh m;
    m.n = like.n;
    m.period = like.period;
    m.nz = like.nz;
    m.z.resize(static_cast<std::size_t>(m.num_nodes()));
    for (int k = 0; k <= m.nz; ++k)
        for (int j = 0; j < m.n; ++j)
            for (int i = 0; i < m.n; ++i) m.z[static_cast<std::size_t>(m.node(i, j, k))] = z0 + (z1 - z0) * k / m.nz;
    compute_quadrature(m, "flat slab");
    return m;
}

/// Compares the H1 norm of a fluid field on the physical domain with the
/// norm of the same nodal values on the flattened slab 0 < z < h. The ratio
/// physical / flat is reported as the measured equivalence constant.
inline NormReport mapped_norm_equivalence(const MappedMesh& mesh, std::span<const double> p) {
    const auto phys = scalar_norms(mesh.fluid, p);
    const auto flat = scalar_norms(flat_slab(mesh.fluid, 0.0, mesh.h()), p);
    const double a = std::sqrt(phys.h1()), b = std::sqrt(flat.h1());
    NormReport r;
    r.name = "mapped_norm_equivalence";
    r.lhs = a;
    r.rhs = b;
    r.ratio = b > 0.0 ? a / b : 0.0;
    r.values = {{"h1_physical", a}, {"h1_flat", b}};
    return r;
}

/// H^1/2 norm of a lateral trace in the Sobolev-Slobodeckij form, as a
/// Riemann sum over node pairs including `images` periodic copies in each
/// direction. Surface weights (1 for the flat image, sqrt(1 + |grad f|^2) on
/// the interface) multiply each point. Cost O(n^4 images^2): small grids only.
inline double slobodeckij_half_norm(std::span<const double> u, int n, double period, std::span<const double> weights,
                                    int images = 4) {
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    if (u.size() != nn || weights.size() != nn) throw ShapeError("trace does not match the grid");
    const double d = period / n;
    const double area = d * d;
    double l2 = 0.0, semi = 0.0;
    for (std::size_t a = 0; a < nn; ++a) {
        l2 += u[a] * u[a] * weights[a] * area;
        const int ia = static_cast<int>(a % n), ja = static_cast<int>(a / n);
        for (std::size_t b = 0; b < nn; ++b) {
            const int ib = static_cast<int>(b % n), jb = static_cast<int>(b / n);
            const double du = u[a] - u[b];
            for (int my = -images; my <= images; ++my)
                for (int mx = -images; mx <= images; ++mx) {
                    if (a == b && mx == 0 && my == 0) continue;
                    const double dx = (ia - ib) * d + mx * period;
                    const double dy = (ja - jb) * d + my * period;
                    const double r = std::sqrt(dx * dx + dy * dy);
                    semi += du * du / (r * r * r) * weights[a] * weights[b] * area * area;
                }
        }
    }
    return std::sqrt(l2 + semi);
}

// ---------------------------------------------------------------------------
// Zero extension below the bottom surface

struct ExtendedField {
    SlabMesh mesh;              ///< extension layers first, then the solid layers
    std::vector<double> values; ///< 3 components per node
};

/// Extends a solid field vanishing on the bottom surface by zero down to the
/// flat level z = min(g) - depth, using `layers` extra cell layers.
inline ExtendedField zero_extension(const SlabMesh& solid, std::span<const double> u, int layers, double depth) {
    if (layers < 1 || !(depth > 0.0)) throw ValidationError("zero extension needs layers >= 1 and depth > 0");
    if (u.size() != 3 * static_cast<std::size_t>(solid.num_nodes()))
        throw ShapeError("vector field does not match the mesh");
    const int n = solid.n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int comp = 0; comp < 3; ++comp)
                if (u[3 * static_cast<std::size_t>(solid.node(i, j, 0)) + comp] != 0.0)
                    throw PreconditionError("field must vanish on the bottom surface");
    double zmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) zmin = std::min(zmin, solid.z[static_cast<std::size_t>(solid.node(i, j, 0))]);
    zmin -= depth;

    ExtendedField out;
    auto& m = out.mesh;
    m.n = n;
    m.period = solid.period;
    m.nz = solid.nz + layers;
    m.z.resize(static_cast<std::size_t>(m.num_nodes()));
    out.values.assign(3 * static_cast<std::size_t>(m.num_nodes()), 0.0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double g = solid.z[static_cast<std::size_t>(solid.node(i, j, 0))];
            for (int k = 0; k <= layers; ++k) m.z[static_cast<std::size_t>(m.node(i, j, k))] = zmin + (g - zmin) * k / layers;
            for (int k = 1; k <= solid.nz; ++k) {
                const auto src = static_cast<std::size_t>(solid.node(i, j, k));
                const auto dst = static_cast<std::size_t>(m.node(i, j, k + layers));
                m.z[dst] = solid.z[src];
                for (int comp = 0; comp < 3; ++comp) out.values[3 * dst + comp] = u[3 * src + comp];
            }
        }
    compute_quadrature(m, "extension");
    return out;
}

/// Component-wise H^1/2 norm of the top-layer trace of a vector field, on the flattened interface.
inline double top_trace_half_norm(const SlabMesh& mesh, std::span<const double> u) {
    const int n = mesh.n;
    double acc = 0.0;
    for (int comp = 0; comp < 3; ++comp) {
        std::vector<double> tr(static_cast<std::size_t>(n) * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                tr[static_cast<std::size_t>(j) * n + i] = u[3 * static_cast<std::size_t>(mesh.node(i, j, mesh.nz)) + comp];
        const double v = trace_half_norm(to_spectral(std::span<const double>(tr), n, mesh.period), 0.5);
        acc += v * v;
    }
    return std::sqrt(acc);
}

}  // namespace rfsi

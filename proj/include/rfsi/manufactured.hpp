#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "rfsi/assembly.hpp"
#include "rfsi/dtn.hpp"
#include "rfsi/norms.hpp"
#include "rfsi/solve.hpp"

namespace rfsi {

/// Closed-form fields for convergence testing at a fixed s:
///   p* = C E exp(-beta (z - h)),  u*_a = (a_a zeta + b_a zeta^2) E,
/// with E = exp(i (k1 x + k2 y)), zeta = z - g0 and beta = beta(|k|^2, s, c).
/// p* solves the fluid equation and the transparent condition exactly; u*
/// vanishes on the flat bottom z = g0. Body force and interface residuals
/// make the pair an exact solution of the forced discrete problem's limit.
struct ManufacturedSolution {
    MaterialParams mat;
    cplx s{2.0, 2.0};
    double period = 2.0;
    double h = 1.0;
    double g0 = -1.0;
    SurfaceSpec interface = SurfaceSpec::sinusoid(0.0, 0.1, 1, 0);
    int m1 = 1, m2 = 0;
    cplx C{0.05, 0.0};
    std::array<cplx, 3> a{cplx(0.3, 0.1), cplx(-0.2, 0.0), cplx(0.5, -0.2)};
    std::array<cplx, 3> b{cplx(0.1, 0.0), cplx(0.2, 0.1), cplx(-0.3, 0.0)};

    double k1() const { return 2.0 * kPi * m1 / period; }
    double k2() const { return 2.0 * kPi * m2 / period; }
    cplx beta_k() const { return beta(k1() * k1() + k2() * k2(), s, mat.c); }
    cplx E(const Vec3& x) const { return std::exp(cplx(0.0, k1() * x[0] + k2() * x[1])); }

    cplx p(const Vec3& x) const { return C * E(x) * std::exp(-beta_k() * (x[2] - h)); }

    std::array<cplx, 3> grad_p(const Vec3& x) const {
        const cplx v = p(x);
        return {cplx(0.0, k1()) * v, cplx(0.0, k2()) * v, -beta_k() * v};
    }

    std::array<cplx, 3> u(const Vec3& x) const {
        const double z = x[2] - g0;
        const cplx e = E(x);
        return {(a[0] * z + b[0] * z * z) * e, (a[1] * z + b[1] * z * z) * e, (a[2] * z + b[2] * z * z) * e};
    }

    /// G[alpha][beta] = d u_alpha / d x_beta.
    std::array<std::array<cplx, 3>, 3> grad_u(const Vec3& x) const {
        const double z = x[2] - g0;
        const cplx e = E(x);
        const auto v = u(x);
        std::array<std::array<cplx, 3>, 3> G{};
        for (int al = 0; al < 3; ++al) {
            G[al][0] = cplx(0.0, k1()) * v[al];
            G[al][1] = cplx(0.0, k2()) * v[al];
            G[al][2] = (a[al] + 2.0 * b[al] * z) * e;
        }
        return G;
    }

    cplx div_u(const Vec3& x) const {
        const auto G = grad_u(x);
        return G[0][0] + G[1][1] + G[2][2];
    }

    /// mu Laplace u + (lambda + mu) grad div u - rho2 s^2 u.
    std::array<cplx, 3> body_force(const Vec3& x) const {
        const double z = x[2] - g0;
        const cplx e = E(x);
        const double kk = k1() * k1() + k2() * k2();
        const auto v = u(x);
        const cplx ik1(0.0, k1()), ik2(0.0, k2());
        const cplx div = div_u(x);
        const cplx dz_div = (ik1 * (a[0] + 2.0 * b[0] * z) + ik2 * (a[1] + 2.0 * b[1] * z) + 2.0 * b[2]) * e;
        const std::array<cplx, 3> grad_div{ik1 * div, ik2 * div, dz_div};
        std::array<cplx, 3> out{};
        for (int al = 0; al < 3; ++al) {
            const cplx lap = -kk * v[al] + 2.0 * b[al] * e;
            out[al] = mat.mu * lap + (mat.lambda + mat.mu) * grad_div[al] - mat.rho2 * s * s * v[al];
        }
        return out;
    }

    /// Unit normal of the analytic interface, pointing into the fluid.
    Vec3 normal(const Vec3& x) const {
        const auto g = interface.gradient(x[0], x[1], period);
        const double w = std::sqrt(1.0 + g[0] * g[0] + g[1] * g[1]);
        return {-g[0] / w, -g[1] / w, 1.0 / w};
    }

    /// d_n p* + rho1 s^2 n . u*, the kinematic interface residual.
    cplx kinematic_residual(const Vec3& x) const {
        const auto n = normal(x);
        const auto gp = grad_p(x);
        const auto v = u(x);
        cplx r = 0.0;
        for (int c = 0; c < 3; ++c) r += gp[c] * n[c] + mat.rho1 * s * s * n[c] * v[c];
        return r;
    }

    /// mu d_n u* + (lambda + mu) (div u*) n + p* n, the dynamic interface residual.
    std::array<cplx, 3> traction_residual(const Vec3& x) const {
        const auto n = normal(x);
        const auto G = grad_u(x);
        const cplx div = G[0][0] + G[1][1] + G[2][2];
        const cplx pv = p(x);
        std::array<cplx, 3> t{};
        for (int al = 0; al < 3; ++al) {
            const cplx dn = G[al][0] * n[0] + G[al][1] * n[1] + G[al][2] * n[2];
            t[al] = mat.mu * dn + (mat.lambda + mat.mu) * div * n[al] + pv * n[al];
        }
        return t;
    }

    RoughSurfacePair surfaces(int n) const {
        return sample_surfaces(interface, SurfaceSpec::flat(g0), period, n, h);
    }
};

/// Load vector of the forced problem whose continuous solution is the
/// manufactured pair.
inline CVector manufactured_rhs(const MappedMesh& mesh, const ManufacturedSolution& ms) {
    const DofLayout L(mesh);
    const cplx s = ms.s, sb = std::conj(s);
    const double r1 = ms.mat.rho1;
    CVector rhs(L.size());
    rhs.head(L.num_p()) = fluid_interface_load(mesh, [&](const Vec3& x) { return ms.kinematic_residual(x); }) * (-1.0 / s);
    rhs.tail(L.num_u()) = solid_volume_load(mesh, [&](const Vec3& x) { return ms.body_force(x); }) * (-r1 * sb) +
                          solid_interface_load(mesh, [&](const Vec3& x) { return ms.traction_residual(x); }) * (r1 * sb);
    return rhs;
}

struct ManufacturedErrors {
    int n = 0;
    double p_error = 0.0, u_error = 0.0;  ///< L2 errors
    double p_norm = 0.0, u_norm = 0.0;    ///< L2 norms of the exact fields
    double residual = 0.0;
};

namespace detail {

/// Sum over cells and 3 x 3 x 3 Gauss points of w |f_h - f*|^2 and w |f*|^2
/// for a field with `comps` components per node.
template <class Exact, class Nodal>
std::array<double, 2> l2_error(const SlabMesh& m, int comps, Exact&& exact, Nodal&& nodal) {
    const double g[3] = {0.5 - std::sqrt(0.15), 0.5, 0.5 + std::sqrt(0.15)};
    const double w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    double err = 0.0, ref = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto X = m.cell_corners(c);
        const auto nodes = m.cell_nodes(c);
        for (int qz = 0; qz < 3; ++qz)
            for (int qy = 0; qy < 3; ++qy)
                for (int qx = 0; qx < 3; ++qx) {
                    const auto N = fem::shape(g[qx], g[qy], g[qz]);
                    const auto G = fem::shape_grad(g[qx], g[qy], g[qz]);
                    Vec3 x{};
                    Mat3 J{};
                    for (int a = 0; a < 8; ++a)
                        for (int r = 0; r < 3; ++r) {
                            x[r] += N[a] * X[a][r];
                            for (int cc = 0; cc < 3; ++cc) J[r][cc] += X[a][r] * G[a][cc];
                        }
                    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
                    const double wq = w[qx] * w[qy] * w[qz] * det;
                    const auto e = exact(x);
                    for (int comp = 0; comp < comps; ++comp) {
                        cplx vh = 0.0;
                        for (int a = 0; a < 8; ++a) vh += N[a] * nodal(nodes[a], comp);
                        err += wq * std::norm(vh - e[comp]);
                        ref += wq * std::norm(e[comp]);
                    }
                }
    }
    return {err, ref};
}

}  // namespace detail

/// Solves the forced problem on `mesh` and measures the L2 errors against the exact pair.
inline ManufacturedErrors manufactured_errors(const MappedMesh& mesh, const ManufacturedSolution& ms,
                                              const SolverOptions& opt = {}) {
    const SystemMatrix A = assemble_system(mesh, ms.mat, ms.s);
    const auto sol = solve_at_s(A, manufactured_rhs(mesh, ms), opt.tol, opt);
    const DofLayout L(mesh);
    ManufacturedErrors out;
    out.n = mesh.n();
    out.residual = sol.residual;
    const auto ep = detail::l2_error(
        mesh.fluid, 1, [&](const Vec3& x) { return std::array<cplx, 1>{ms.p(x)}; },
        [&](int node, int) { return sol.p[node]; });
    const auto eu = detail::l2_error(
        mesh.solid, 3, [&](const Vec3& x) { return ms.u(x); },
        [&](int node, int comp) {
            const int k = L.u_local(node, comp);
            return k < 0 ? cplx(0.0) : sol.u[k];
        });
    out.p_error = std::sqrt(ep[0]);
    out.p_norm = std::sqrt(ep[1]);
    out.u_error = std::sqrt(eu[0]);
    out.u_norm = std::sqrt(eu[1]);
    return out;
}

struct ConvergenceReport {
    std::vector<ManufacturedErrors> levels;
    double p_order = 0.0, u_order = 0.0;  ///< fitted orders in the lateral spacing
    double required = 1.8;
    bool pass = false;
};

/// Errors on n x n x (n/2 + n/2) meshes for each n in `sizes`, with fitted orders.
inline ConvergenceReport manufactured_convergence(const ManufacturedSolution& ms, const std::vector<int>& sizes,
                                                  double required = 1.8, const SolverOptions& opt = {}) {
    if (sizes.size() < 2) throw ValidationError("convergence study needs at least two mesh sizes");
    ConvergenceReport rep;
    rep.required = required;
    std::vector<double> hs, ep, eu;
    for (int n : sizes) {
        if (n < 4 || n % 2 != 0) throw ValidationError("convergence mesh sizes must be even and at least 4");
        const auto mesh = build_mesh(ms.surfaces(n), n / 2, n / 2);
        rep.levels.push_back(manufactured_errors(mesh, ms, opt));
        hs.push_back(ms.period / n);
        ep.push_back(rep.levels.back().p_error);
        eu.push_back(rep.levels.back().u_error);
    }
    rep.p_order = fit_log_slope(hs, ep);
    rep.u_order = fit_log_slope(hs, eu);
    rep.pass = rep.p_order >= required && rep.u_order >= required;
    return rep;
}

}  // namespace rfsi

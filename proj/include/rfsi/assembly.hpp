#pragma once

// Galerkin discretization of the coupled pressure/displacement problem at one
// Laplace parameter s. Unknowns are ordered [p; u]: one pressure per fluid
// node, then three displacement components per solid node above the bottom
// layer (the clamped bottom is eliminated).

#include <fstream>
#include <functional>
#include <iomanip>
#include <string>
#include <vector>

#include "rfsi/dtn.hpp"
#include "rfsi/errors.hpp"
#include "rfsi/geometry.hpp"
#include "rfsi/physics.hpp"
#include "rfsi/types.hpp"

namespace rfsi {

struct DofLayout {
    int n = 0;
    int nz_fluid = 0;
    int nz_solid = 0;

    explicit DofLayout(const MappedMesh& mesh)
        : n(mesh.n()), nz_fluid(mesh.fluid.nz), nz_solid(mesh.solid.nz) {}
    DofLayout() = default;

    int layer() const { return n * n; }
    int num_p() const { return (nz_fluid + 1) * layer(); }
    int num_u() const { return 3 * nz_solid * layer(); }
    int size() const { return num_p() + num_u(); }
    int top_offset() const { return nz_fluid * layer(); }

    /// Index within the u block, or -1 for a clamped bottom node.
    int u_local(int solid_node, int comp) const {
        return solid_node < layer() ? -1 : 3 * (solid_node - layer()) + comp;
    }
    int u_global(int solid_node, int comp) const {
        const int k = u_local(solid_node, comp);
        return k < 0 ? -1 : num_p() + k;
    }
};

/// Real, s-independent matrices from which every system is combined.
struct FormPieces {
    DofLayout layout;
    double period = 1.0;
    RSparse Kf;  ///< int grad phi_a . grad phi_b over the fluid
    RSparse Mf;  ///< int phi_a phi_b over the fluid
    RSparse Kv;  ///< delta_{alpha beta} int grad phi_a . grad phi_b over the solid
    RSparse Dv;  ///< int d_alpha phi_a d_beta phi_b over the solid
    RSparse Mv;  ///< delta_{alpha beta} int phi_a phi_b over the solid
    RSparse C;   ///< int_{interface} n_alpha phi_a psi_b dgamma (u rows, p columns)
};

namespace detail {

using Triplets = std::vector<Eigen::Triplet<double>>;

inline std::array<Vec3, 8> physical_gradients(const QuadPoint& q, const std::array<Vec3, 8>& ref) {
    std::array<Vec3, 8> g{};
    for (int a = 0; a < 8; ++a)
        for (int c = 0; c < 3; ++c)
            g[a][c] = ref[a][0] * q.inv_j[0][c] + ref[a][1] * q.inv_j[1][c] + ref[a][2] * q.inv_j[2][c];
    return g;
}

inline RSparse from_triplets(int rows, int cols, const Triplets& t) {
    RSparse m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

}  // namespace detail

inline FormPieces assemble_pieces(const MappedMesh& mesh) {
    FormPieces out;
    out.layout = DofLayout(mesh);
    out.period = mesh.period();
    const auto& L = out.layout;
    const auto pts = fem::gauss_points_3d();
    std::array<std::array<double, 8>, 8> shp{};
    std::array<std::array<Vec3, 8>, 8> ref{};
    for (int q = 0; q < 8; ++q) {
        shp[q] = fem::shape(pts[q].xi, pts[q].eta, pts[q].zeta);
        ref[q] = fem::shape_grad(pts[q].xi, pts[q].eta, pts[q].zeta);
    }

    detail::Triplets kf, mf;
    for (int c = 0; c < mesh.fluid.num_cells(); ++c) {
        const auto nodes = mesh.fluid.cell_nodes(c);
        double ke[8][8] = {}, me[8][8] = {};
        for (int q = 0; q < 8; ++q) {
            const auto& qp = mesh.fluid.qp(c, q);
            const auto g = detail::physical_gradients(qp, ref[q]);
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b) {
                    ke[a][b] += qp.weight * (g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2]);
                    me[a][b] += qp.weight * shp[q][a] * shp[q][b];
                }
        }
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                kf.emplace_back(nodes[a], nodes[b], ke[a][b]);
                mf.emplace_back(nodes[a], nodes[b], me[a][b]);
            }
    }
    out.Kf = detail::from_triplets(L.num_p(), L.num_p(), kf);
    out.Mf = detail::from_triplets(L.num_p(), L.num_p(), mf);

    detail::Triplets kv, dv, mv;
    for (int c = 0; c < mesh.solid.num_cells(); ++c) {
        const auto nodes = mesh.solid.cell_nodes(c);
        double ke[8][8] = {}, me[8][8] = {};
        double de[8][3][8][3] = {};
        for (int q = 0; q < 8; ++q) {
            const auto& qp = mesh.solid.qp(c, q);
            const auto g = detail::physical_gradients(qp, ref[q]);
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b) {
                    ke[a][b] += qp.weight * (g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2]);
                    me[a][b] += qp.weight * shp[q][a] * shp[q][b];
                    for (int al = 0; al < 3; ++al)
                        for (int be = 0; be < 3; ++be) de[a][al][b][be] += qp.weight * g[a][al] * g[b][be];
                }
        }
        for (int a = 0; a < 8; ++a) {
            if (L.u_local(nodes[a], 0) < 0) continue;
            for (int b = 0; b < 8; ++b) {
                if (L.u_local(nodes[b], 0) < 0) continue;
                for (int al = 0; al < 3; ++al) {
                    const int r = L.u_local(nodes[a], al);
                    kv.emplace_back(r, L.u_local(nodes[b], al), ke[a][b]);
                    mv.emplace_back(r, L.u_local(nodes[b], al), me[a][b]);
                    for (int be = 0; be < 3; ++be) dv.emplace_back(r, L.u_local(nodes[b], be), de[a][al][b][be]);
                }
            }
        }
    }
    out.Kv = detail::from_triplets(L.num_u(), L.num_u(), kv);
    out.Dv = detail::from_triplets(L.num_u(), L.num_u(), dv);
    out.Mv = detail::from_triplets(L.num_u(), L.num_u(), mv);

    detail::Triplets ct;
    const int n = mesh.n();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::array<int, 4> p_nodes{}, s_nodes{};
            for (int v = 0; v < 4; ++v) {
                p_nodes[v] = mesh.fluid.node(i + (v & 1), j + (v >> 1), 0);
                s_nodes[v] = mesh.solid.node(i + (v & 1), j + (v >> 1), mesh.solid.nz);
            }
            for (int q = 0; q < 4; ++q) {
                const auto& ip = mesh.interface[static_cast<std::size_t>(j * n + i) * 4 + q];
                const auto S = fem::shape2(ip.xi, ip.eta);
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        for (int al = 0; al < 3; ++al)
                            ct.emplace_back(L.u_local(s_nodes[a], al), p_nodes[b], ip.normal_area[al] * S[a] * S[b]);
            }
        }
    }
    out.C = detail::from_triplets(L.num_u(), L.num_p(), ct);
    return out;
}

/// Assembled operator at one s: a sparse part and the matrix-free transparent
/// boundary block acting on the top layer of pressure nodes.
class SystemMatrix {
public:
    SystemMatrix() = default;

    SystemMatrix(const FormPieces& pieces, const MaterialParams& mat, cplx s) : layout_(pieces.layout), s_(s) {
        if (!(s.real() > 0.0)) throw DomainError("system assembly requires Re s > 0");
        mat.validate();
        const cplx sb = std::conj(s);
        const double r1 = mat.rho1;
        acoustic_ = (pieces.Kf.cast<cplx>() * (1.0 / s) + pieces.Mf.cast<cplx>() * (s / (mat.c * mat.c))).eval();
        elastic_ = (pieces.Kv.cast<cplx>() * (r1 * sb * mat.mu) + pieces.Dv.cast<cplx>() * (r1 * sb * (mat.lambda + mat.mu)) +
                    pieces.Mv.cast<cplx>() * (r1 * mat.rho2 * s * std::norm(s)))
                       .eval();
        coupling_up_ = (pieces.C.cast<cplx>() * (r1 * sb)).eval();
        coupling_pu_ = (RSparse(pieces.C.transpose()).cast<cplx>() * (-r1 * s)).eval();
        dtn_ = DtnOperator(layout_.n, pieces.period, s, mat.c);
        build_sparse();
    }

    const DofLayout& layout() const { return layout_; }
    cplx s() const { return s_; }
    int size() const { return layout_.size(); }

    /// Fluid rows, fluid columns (without the transparent boundary block).
    const CSparse& acoustic() const { return acoustic_; }
    /// Solid rows, solid columns.
    const CSparse& elastic() const { return elastic_; }
    /// Solid rows, fluid columns.
    const CSparse& coupling_up() const { return coupling_up_; }
    /// Fluid rows, solid columns.
    const CSparse& coupling_pu() const { return coupling_pu_; }
    const DtnOperator& dtn() const { return dtn_; }

    /// Everything except the transparent boundary block.
    const CSparse& sparse_part() const { return sparse_; }

    /// Sparse part plus the diagonal of the transparent boundary block.
    CSparse preconditioner_matrix() const {
        CSparse m = sparse_;
        const int off = layout_.top_offset();
        for (int k = 0; k < layout_.layer(); ++k) m.coeffRef(off + k, off + k) += dtn_.diagonal();
        m.makeCompressed();
        return m;
    }

    CVector apply(const CVector& x) const {
        if (x.size() != size()) throw ShapeError("vector size does not match the system");
        CVector y = sparse_ * x;
        add_dtn(x, y);
        return y;
    }

    void add_dtn(const CVector& x, CVector& y) const {
        const int off = layout_.top_offset();
        const int m = layout_.layer();
        std::span<const cplx> top(x.data() + off, static_cast<std::size_t>(m));
        const auto d = dtn_.apply(top);
        for (int k = 0; k < m; ++k) y[off + k] += d[k];
    }

    /// Dense copy including the transparent boundary block; small meshes only.
    Eigen::MatrixXcd to_dense() const {
        Eigen::MatrixXcd A = Eigen::MatrixXcd(sparse_);
        const int off = layout_.top_offset();
        const int m = layout_.layer();
        std::vector<cplx> e(static_cast<std::size_t>(m), 0.0);
        for (int k = 0; k < m; ++k) {
            e.assign(static_cast<std::size_t>(m), 0.0);
            e[k] = 1.0;
            const auto col = dtn_.apply(e);
            for (int r = 0; r < m; ++r) A(off + r, off + k) += col[r];
        }
        return A;
    }

private:
    void build_sparse() {
        const int np = layout_.num_p();
        std::vector<Eigen::Triplet<cplx>> t;
        t.reserve(static_cast<std::size_t>(acoustic_.nonZeros() + elastic_.nonZeros() + 2 * coupling_up_.nonZeros()));
        auto put = [&](const CSparse& block, int r0, int c0) {
            for (int k = 0; k < block.outerSize(); ++k)
                for (CSparse::InnerIterator it(block, k); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), it.value());
        };
        put(acoustic_, 0, 0);
        put(coupling_pu_, 0, np);
        put(coupling_up_, np, 0);
        put(elastic_, np, np);
        sparse_.resize(size(), size());
        sparse_.setFromTriplets(t.begin(), t.end());
        sparse_.makeCompressed();
    }

    DofLayout layout_;
    cplx s_ = 1.0;
    CSparse acoustic_, elastic_, coupling_up_, coupling_pu_, sparse_;
    DtnOperator dtn_;
};

inline SystemMatrix assemble_system(const FormPieces& pieces, const MaterialParams& mat, cplx s) {
    return SystemMatrix(pieces, mat, s);
}

inline SystemMatrix assemble_system(const MappedMesh& mesh, const MaterialParams& mat, cplx s) {
    if (!(s.real() > 0.0)) throw DomainError("system assembly requires Re s > 0");
    return SystemMatrix(assemble_pieces(mesh), mat, s);
}

// ---------------------------------------------------------------------------
// Loads

/// Entries int f . phi_a e_alpha over the solid for a complex vector field f,
/// in the u block ordering.
inline CVector solid_volume_load(const MappedMesh& mesh,
                                 const std::function<std::array<cplx, 3>(const Vec3&)>& f) {
    const DofLayout L(mesh);
    CVector b = CVector::Zero(L.num_u());
    const auto pts = fem::gauss_points_3d();
    for (int c = 0; c < mesh.solid.num_cells(); ++c) {
        const auto nodes = mesh.solid.cell_nodes(c);
        for (int q = 0; q < 8; ++q) {
            const auto& qp = mesh.solid.qp(c, q);
            const auto N = fem::shape(pts[q].xi, pts[q].eta, pts[q].zeta);
            const auto v = f(qp.x);
            for (int a = 0; a < 8; ++a) {
                if (L.u_local(nodes[a], 0) < 0) continue;
                for (int al = 0; al < 3; ++al) b[L.u_local(nodes[a], al)] += qp.weight * N[a] * v[al];
            }
        }
    }
    return b;
}

/// Same for a real spatial source profile.
inline RVector source_basis_vector(const MappedMesh& mesh, const SpatialBump& bump) {
    const auto b = solid_volume_load(mesh, [&](const Vec3& x) {
        const auto v = bump.value(x);
        return std::array<cplx, 3>{v[0], v[1], v[2]};
    });
    return b.real();
}

/// Entries int_{interface} g psi_b dgamma in the p block ordering.
inline CVector fluid_interface_load(const MappedMesh& mesh, const std::function<cplx(const Vec3&)>& g) {
    const DofLayout L(mesh);
    CVector b = CVector::Zero(L.num_p());
    const int n = mesh.n();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < 4; ++q) {
                const auto& ip = mesh.interface[static_cast<std::size_t>(j * n + i) * 4 + q];
                const auto S = fem::shape2(ip.xi, ip.eta);
                const cplx v = g(ip.x);
                for (int a = 0; a < 4; ++a) b[mesh.fluid.node(i + (a & 1), j + (a >> 1), 0)] += ip.weight * S[a] * v;
            }
    return b;
}

/// Entries int_{interface} t . phi_a e_alpha dgamma in the u block ordering.
inline CVector solid_interface_load(const MappedMesh& mesh,
                                    const std::function<std::array<cplx, 3>(const Vec3&)>& t) {
    const DofLayout L(mesh);
    CVector b = CVector::Zero(L.num_u());
    const int n = mesh.n();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int q = 0; q < 4; ++q) {
                const auto& ip = mesh.interface[static_cast<std::size_t>(j * n + i) * 4 + q];
                const auto S = fem::shape2(ip.xi, ip.eta);
                const auto v = t(ip.x);
                for (int a = 0; a < 4; ++a) {
                    const int node = mesh.solid.node(i + (a & 1), j + (a >> 1), mesh.solid.nz);
                    for (int al = 0; al < 3; ++al) b[L.u_local(node, al)] += ip.weight * S[a] * v[al];
                }
            }
    return b;
}

/// Load vector -rho1 conj(s) int j(s) . conj(v) given the precomputed source
/// basis vector of the spatial profile.
inline CVector assemble_rhs(const DofLayout& layout, const RVector& source_basis, const MaterialParams& mat,
                            const TransformedSource& js, cplx s) {
    if (!(s.real() > 0.0)) throw DomainError("load assembly requires Re s > 0");
    CVector rhs = CVector::Zero(layout.size());
    if (js.factor == cplx(0.0)) return rhs;
    rhs.tail(layout.num_u()) = source_basis.cast<cplx>() * (-mat.rho1 * std::conj(s) * js.factor);
    return rhs;
}

inline CVector assemble_rhs(const MappedMesh& mesh, const MaterialParams& mat, cplx s, const SourceTerm& j) {
    const auto js = transform_source(j, s);
    const DofLayout layout(mesh);
    if (js.factor == cplx(0.0)) return CVector::Zero(layout.size());
    return assemble_rhs(layout, source_basis_vector(mesh, j.spatial), mat, js, s);
}

// ---------------------------------------------------------------------------
// Split formulation: the pressure equation and the displacement equation
// before they are combined with the weight rho1 |s|^2.

struct SplitSystem {
    Eigen::MatrixXcd pressure_rows;      ///< num_p x size, including the transparent boundary block
    Eigen::MatrixXcd displacement_rows;  ///< num_u x size
};

inline SplitSystem assemble_split(const FormPieces& pieces, const MaterialParams& mat, cplx s) {
    if (!(s.real() > 0.0)) throw DomainError("system assembly requires Re s > 0");
    const auto& L = pieces.layout;
    const int np = L.num_p(), nu = L.num_u();
    SplitSystem out;
    out.pressure_rows = Eigen::MatrixXcd::Zero(np, L.size());
    out.displacement_rows = Eigen::MatrixXcd::Zero(nu, L.size());
    out.pressure_rows.leftCols(np) =
        Eigen::MatrixXd(pieces.Kf).cast<cplx>() / s + Eigen::MatrixXd(pieces.Mf).cast<cplx>() * (s / (mat.c * mat.c));
    DtnOperator dtn(L.n, pieces.period, s, mat.c);
    const int off = L.top_offset(), m = L.layer();
    for (int k = 0; k < m; ++k) {
        std::vector<cplx> e(static_cast<std::size_t>(m), 0.0);
        e[k] = 1.0;
        const auto col = dtn.apply(e);
        for (int r = 0; r < m; ++r) out.pressure_rows(off + r, off + k) += col[r];
    }
    out.pressure_rows.rightCols(nu) = Eigen::MatrixXd(pieces.C.transpose()).cast<cplx>() * (-mat.rho1 * s);
    out.displacement_rows.leftCols(np) = Eigen::MatrixXd(pieces.C).cast<cplx>() / s;
    out.displacement_rows.rightCols(nu) =
        (Eigen::MatrixXd(pieces.Kv) * mat.mu + Eigen::MatrixXd(pieces.Dv) * (mat.lambda + mat.mu)).cast<cplx>() / s +
        Eigen::MatrixXd(pieces.Mv).cast<cplx>() * (mat.rho2 * s);
    return out;
}

// ---------------------------------------------------------------------------
// Coercivity

/// Quadratic-form norms of a coefficient vector.
struct FieldNorms {
    double grad_p2 = 0.0;   ///< ||grad p||^2
    double p2 = 0.0;        ///< ||p||^2
    double grad_u2 = 0.0;   ///< ||grad u||_F^2
    double div_u2 = 0.0;    ///< ||div u||^2
    double u2 = 0.0;        ///< ||u||^2
};

inline FieldNorms field_norms(const FormPieces& pieces, const CVector& p, const CVector& u) {
    auto quad = [](const RSparse& A, const CVector& x) { return std::max(0.0, x.dot(A.cast<cplx>() * x).real()); };
    FieldNorms n;
    if (p.size() > 0) {
        n.grad_p2 = quad(pieces.Kf, p);
        n.p2 = quad(pieces.Mf, p);
    }
    if (u.size() > 0) {
        n.grad_u2 = quad(pieces.Kv, u);
        n.div_u2 = quad(pieces.Dv, u);
        n.u2 = quad(pieces.Mv, u);
    }
    return n;
}

/// Re(v* A v) minus the coercivity lower bound; nonnegative up to rounding.
inline double coercivity_gap(const CVector& v, const SystemMatrix& A, const FormPieces& pieces,
                             const MaterialParams& mat) {
    const auto& L = A.layout();
    if (v.size() != L.size()) throw ShapeError("vector size does not match the system");
    const cplx s = A.s();
    const double s1 = s.real();
    const double s_abs2 = std::norm(s);
    const double re_a = v.dot(A.apply(v)).real();
    const auto n = field_norms(pieces, v.head(L.num_p()), v.tail(L.num_u()));
    const double kappa = std::min(1.0, 1.0 / (mat.c * mat.c));
    const double m = std::min({mat.rho1 * mat.mu, mat.rho1 * (mat.lambda + mat.mu), mat.rho1 * mat.rho2});
    const double bound = s1 / s_abs2 * (n.grad_p2 + s_abs2 * n.p2) + s1 * m * (n.grad_u2 + n.div_u2 + s_abs2 * n.u2);
    return re_a - kappa * bound;
}

// ---------------------------------------------------------------------------
// Output

/// Writes `row col re im` lines, one per stored entry, including the
/// transparent boundary block.
inline void write_coo(const SystemMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write matrix dump: " + path);
    out << std::setprecision(17);
    const auto& S = A.sparse_part();
    const int off = A.layout().top_offset(), m = A.layout().layer();
    std::vector<cplx> e(static_cast<std::size_t>(m), 0.0);
    Eigen::MatrixXcd dtn(m, m);
    for (int k = 0; k < m; ++k) {
        e.assign(static_cast<std::size_t>(m), 0.0);
        e[k] = 1.0;
        const auto col = A.dtn().apply(e);
        for (int r = 0; r < m; ++r) dtn(r, k) = col[r];
    }
    for (int k = 0; k < S.outerSize(); ++k) {
        for (CSparse::InnerIterator it(S, k); it; ++it) {
            cplx v = it.value();
            const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            if (r >= off && r < off + m && c >= off && c < off + m) {
                v += dtn(r - off, c - off);
                dtn(r - off, c - off) = 0.0;
            }
            out << r << ' ' << c << ' ' << v.real() << ' ' << v.imag() << '\n';
        }
    }
    for (int c = 0; c < m; ++c)
        for (int r = 0; r < m; ++r)
            if (dtn(r, c) != cplx(0.0))
                out << off + r << ' ' << off + c << ' ' << dtn(r, c).real() << ' ' << dtn(r, c).imag() << '\n';
}

}  // namespace rfsi

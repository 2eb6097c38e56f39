#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <Eigen/SparseLU>
#ifdef RFSI_USE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "rfsi/assembly.hpp"
#include "rfsi/errors.hpp"
#include "rfsi/spectral.hpp"

namespace rfsi {

struct SolverOptions {
    double tol = 1e-10;
    int restart = 60;
    int max_iterations = 2000;
};

/// Solution at one Laplace parameter.
struct ComplexFieldS {
    cplx s = 0.0;
    CVector p;          ///< fluid nodes
    CVector u;          ///< solid nodes above the bottom, 3 components each
    double residual = 0.0;
    int iterations = 0;
};

/// Sparse direct factorization backing the preconditioner: UMFPACK when the
/// build provides it, Eigen's SparseLU otherwise.
class SparseFactorization {
public:
    explicit SparseFactorization(CSparse matrix) : matrix_(std::move(matrix)) {
        matrix_.makeCompressed();
        lu_.compute(matrix_);
        if (lu_.info() != Eigen::Success) throw SolverError("preconditioner factorization failed", 1.0);
    }

    CVector solve(const CVector& b) const { return lu_.solve(b); }

private:
    CSparse matrix_;  // UMFPACK keeps a reference to the factored matrix
#ifdef RFSI_USE_UMFPACK
    Eigen::UmfPackLU<CSparse> lu_;
#else
    Eigen::SparseLU<CSparse, Eigen::COLAMDOrdering<int>> lu_;
#endif
};

/// Right-preconditioned restarted GMRES. Returns the final relative residual
/// ||b - A x|| / ||b||; x holds the iterate on return.
template <class ApplyA, class ApplyM>
double gmres(const ApplyA& A, const ApplyM& M_inv, const CVector& b, CVector& x, const SolverOptions& opt,
             int& iterations) {
    const double bnorm = b.norm();
    iterations = 0;
    if (bnorm == 0.0) {
        x.setZero(b.size());
        return 0.0;
    }
    if (x.size() != b.size()) x.setZero(b.size());
    const int m = opt.restart;
    Eigen::MatrixXcd V(b.size(), m + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    Eigen::VectorXcd cs(m), sn(m), g(m + 1);
    double rel = 0.0;
    while (true) {
        CVector r = b - A(x);
        double beta = r.norm();
        rel = beta / bnorm;
        if (rel <= opt.tol || iterations >= opt.max_iterations) return rel;
        V.col(0) = r / beta;
        g.setZero();
        g[0] = beta;
        H.setZero();
        int k = 0;
        for (; k < m && iterations < opt.max_iterations; ++k) {
            ++iterations;
            CVector w = A(M_inv(V.col(k)));
            for (int i = 0; i <= k; ++i) {
                H(i, k) = V.col(i).dot(w);
                w -= H(i, k) * V.col(i);
            }
            // reorthogonalize
            for (int i = 0; i <= k; ++i) {
                const cplx corr = V.col(i).dot(w);
                H(i, k) += corr;
                w -= corr * V.col(i);
            }
            const double hn = w.norm();
            H(k + 1, k) = hn;
            if (hn > 0.0) V.col(k + 1) = w / hn;
            for (int i = 0; i < k; ++i) {
                const cplx t = std::conj(cs[i]) * H(i, k) + std::conj(sn[i]) * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            const cplx a = H(k, k), bb = H(k + 1, k);
            const double den = std::sqrt(std::norm(a) + std::norm(bb));
            if (den == 0.0) {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = a / den;
                sn[k] = bb / den;
            }
            H(k, k) = std::conj(cs[k]) * a + std::conj(sn[k]) * bb;
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = std::conj(cs[k]) * g[k];
            if (std::abs(g[k + 1]) / bnorm <= 0.1 * opt.tol || hn == 0.0) {
                ++k;
                break;
            }
        }
        Eigen::VectorXcd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        CVector z = V.leftCols(k) * y;
        x += M_inv(z);
    }
}

/// Preconditioned Krylov solve of A x = b at the matrix's Laplace parameter.
inline ComplexFieldS solve_at_s(const SystemMatrix& A, const CVector& rhs, double tol,
                                const SolverOptions& base = {}) {
    if (!(tol > 0.0)) throw ValidationError("solver tolerance must be positive");
    if (rhs.size() != A.size()) throw ShapeError("load vector size does not match the system");
    const auto& L = A.layout();
    ComplexFieldS out;
    out.s = A.s();
    if (rhs.norm() == 0.0) {
        out.p = CVector::Zero(L.num_p());
        out.u = CVector::Zero(L.num_u());
        return out;
    }
    SolverOptions opt = base;
    opt.tol = tol;
    const SparseFactorization lu(A.preconditioner_matrix());
    CVector x = CVector::Zero(A.size());
    int its = 0;
    const double res = gmres([&](const CVector& v) { return A.apply(v); },
                             [&](const CVector& v) -> CVector { return lu.solve(v); }, rhs, x, opt, its);
    out.residual = res;
    out.iterations = its;
    if (!(res <= tol)) {
        std::ostringstream os;
        os << "GMRES did not converge at s = " << A.s() << ": residual " << res << " after " << its << " iterations";
        throw SolverError(os.str(), res);
    }
    out.p = x.head(L.num_p());
    out.u = x.tail(L.num_u());
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

/// Everything needed to solve at any s on a fixed mesh.
struct ProblemSetup {
    FormPieces pieces;
    MaterialParams materials;
    SourceTerm source;
    RVector source_basis;    ///< int spatial . phi over the solid
    double source_l2 = 0.0;  ///< L2 norm of the spatial profile
    SolverOptions solver;
    int workers = 1;

    static ProblemSetup create(const MappedMesh& mesh, const MaterialParams& mat, const SourceTerm& j,
                               const SolverOptions& solver = {}, int workers = 1) {
        mat.validate();
        ProblemSetup p;
        p.pieces = assemble_pieces(mesh);
        p.materials = mat;
        p.source = j;
        p.source_basis = source_basis_vector(mesh, j.spatial);
        p.source_l2 = spatial_l2_norm(j.spatial, mesh.solid);
        p.solver = solver;
        p.workers = workers;
        return p;
    }

    CVector rhs(cplx s) const {
        return assemble_rhs(pieces.layout, source_basis, materials, transform_source(source, s), s);
    }

    /// L2 norm of the transformed source at s.
    double source_norm(cplx s) const { return std::abs(transform_source(source, s).factor) * source_l2; }

    ComplexFieldS solve(cplx s) const {
        SystemMatrix A(pieces, materials, s);
        return solve_at_s(A, rhs(s), solver.tol, solver);
    }
};

/// Worker count: the RFSI_WORKERS environment variable wins over the
/// configured value.
inline int resolve_workers(int configured) {
    if (const char* env = std::getenv("RFSI_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return std::max(1, configured);
}

/// Runs task(k) for k in [0, count) on a pool of threads; rethrows the first
/// failure after all workers stop.
template <class Task>
void parallel_for(int count, int workers, Task&& task) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int k = 0; k < count; ++k) task(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const int k = next.fetch_add(1);
                if (k >= count) return;
                {
                    std::lock_guard<std::mutex> lock(guard);
                    if (failure) return;
                }
                try {
                    task(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(guard);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// One solve per line sample. Sources are real, so only the upper half of
/// the line is solved and the lower half is filled by conjugation.
inline std::vector<ComplexFieldS> sweep_line(const LaplaceLine& line, const ProblemSetup& setup) {
    line.validate();
    const int half = line.n_s / 2;
    std::vector<ComplexFieldS> out(static_cast<std::size_t>(line.n_s));
    parallel_for(half, resolve_workers(setup.workers), [&](int idx) {
        const int k = half + idx;
        const cplx s = line.s(k);
        try {
            out[k] = setup.solve(s);
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << "sweep failed at s = " << s << ": " << e.what();
            throw SolverError(os.str(), e.residual());
        }
        auto& mirror = out[line.mirror(k)];
        mirror.s = std::conj(out[k].s);
        mirror.p = out[k].p.conjugate();
        mirror.u = out[k].u.conjugate();
        mirror.residual = out[k].residual;
        mirror.iterations = out[k].iterations;
    });
    return out;
}

// ---------------------------------------------------------------------------
// s-domain estimate ratios

struct SDomainReport {
    cplx s = 0.0;
    double residual = 0.0;
    double R_p = 0.0;  ///< (||grad p|| + ||s p||) / ||j(s)||
    double R_u = 0.0;  ///< |s| (||grad u||_F + ||div u|| + ||s u||) / ||j(s)||
    bool zero_source = false;
};

inline SDomainReport s_domain_estimate_report(const ComplexFieldS& sol, const FormPieces& pieces, double j_norm) {
    SDomainReport r;
    r.s = sol.s;
    r.residual = sol.residual;
    if (j_norm == 0.0) {
        r.zero_source = true;
        return r;
    }
    const auto n = field_norms(pieces, sol.p, sol.u);
    const double sa = std::abs(sol.s);
    r.R_p = (std::sqrt(n.grad_p2) + sa * std::sqrt(n.p2)) / j_norm;
    r.R_u = sa * (std::sqrt(n.grad_u2) + std::sqrt(n.div_u2) + sa * std::sqrt(n.u2)) / j_norm;
    return r;
}

/// max/min over the nonzero entries.
inline double spread_factor(const std::vector<double>& v) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double x : v) {
        if (x <= 0.0) continue;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi == 0.0 ? 1.0 : hi / lo;
}

inline void write_sweep_log(const std::vector<SDomainReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write sweep log: " + path);
    out << "re_s,im_s,residual,R_p,R_u\n" << std::setprecision(10);
    for (const auto& r : reports)
        out << r.s.real() << ',' << r.s.imag() << ',' << r.residual << ',' << r.R_p << ',' << r.R_u << '\n';
}

}  // namespace rfsi

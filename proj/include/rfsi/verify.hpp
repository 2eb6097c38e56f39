#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rfsi/assembly.hpp"
#include "rfsi/dtn.hpp"
#include "rfsi/manufactured.hpp"
#include "rfsi/norms.hpp"
#include "rfsi/spectral.hpp"

namespace rfsi {

/// One asserted check. `lower` selects measured >= limit, otherwise measured <= limit.
struct CheckResult {
    std::string suite;
    std::string name;
    double measured = 0.0;
    double limit = 0.0;
    bool lower = false;
    bool pass = true;
};

inline CheckResult make_check(std::string suite, std::string name, double measured, double limit, bool lower) {
    CheckResult c{std::move(suite), std::move(name), measured, limit, lower, false};
    c.pass = std::isfinite(measured) && (lower ? measured >= limit : measured <= limit);
    return c;
}

struct VerifyOptions {
    std::uint64_t seed = 0;
    int dtn_samples = 10000;
    double dtn_max_re = 1e3;
    int trace_fields = 100;
    int trace_modes = 3;
    std::vector<double> trace_thicknesses{1.0, 0.5};
    int coercivity_vectors = 200;
    std::vector<cplx> coercivity_s{cplx(1.0, 0.0), cplx(1.0, 3.0), cplx(0.3, 10.0)};
    double parseval_T = 4.0;
    std::vector<int> mms_sizes{4, 8, 16};
    cplx mms_s{2.0, 2.0};
    double mms_order = 1.8;
};

inline const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names{"dtn", "trace", "coercivity", "parseval", "mms"};
    return names;
}

namespace detail {

inline std::vector<cplx> random_nodal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    std::vector<cplx> v(static_cast<std::size_t>(n) * n);
    for (auto& x : v) x = {nd(rng), nd(rng)};
    return v;
}

}  // namespace detail

/// Dissipation sign and branch identities over random traces and samples
/// with Re s in (0, max_re], |Im s| <= max_re.
inline std::vector<CheckResult> verify_dtn(int n, double period, double c, const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0), im(-opt.dtn_max_re, opt.dtn_max_re);
    double worst_diss = std::numeric_limits<double>::infinity();
    double min_re_beta = std::numeric_limits<double>::infinity();
    double worst_identity = 0.0;
    for (int k = 0; k < opt.dtn_samples; ++k) {
        const cplx s(opt.dtn_max_re * (1.0 - unit(rng)), im(rng));
        const auto tr = to_spectral(detail::random_nodal(rng, n), n, period);
        double norm2 = 0.0;
        for (const auto& v : tr.coeffs) norm2 += std::norm(v);
        norm2 *= tr.mode_measure();
        worst_diss = std::min(worst_diss, dtn_dissipation(tr, s, c) / norm2);
        for (int m = 0; m < n * n; ++m) {
            const double x2 = tr.xi2(m);
            const cplx b = beta(x2, s, c);
            const cplx target = s * s / (c * c) + x2;
            min_re_beta = std::min(min_re_beta, b.real());
            worst_identity = std::max(worst_identity, std::abs(b * b - target) / std::abs(target));
        }
    }
    return {make_check("dtn", "dissipation_over_trace_norm", worst_diss, -1e-12, true),
            make_check("dtn", "min_re_beta", min_re_beta, 0.0, true),
            make_check("dtn", "beta_square_identity", worst_identity, 1e-12, false)};
}

/// Largest trace-to-bulk ratio over random band-limited fields on flat slabs.
inline std::vector<CheckResult> verify_trace(int n, double period, const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed + 1);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const int nz = 8;
    const int modes = std::min(opt.trace_modes, n / 2 - 1);
    std::vector<CheckResult> out;
    for (double d : opt.trace_thicknesses) {
        double worst = 0.0;
        for (int trial = 0; trial < opt.trace_fields; ++trial) {
            SlabField u{n, period, {}, {}};
            for (int k = 0; k <= nz; ++k) u.z.push_back(d * k / nz);
            u.values.assign(u.z.size() * n * n, 0.0);
            for (std::size_t k = 0; k < u.z.size(); ++k)
                for (int b = -modes; b <= modes; ++b)
                    for (int a = -modes; a <= modes; ++a) {
                        const double amp = nd(rng), ph = phase(rng);
                        for (int j = 0; j < n; ++j)
                            for (int i = 0; i < n; ++i)
                                u.values[(k * n + j) * n + i] += amp * std::cos(2.0 * kPi * (a * i + b * j) / n + ph);
                    }
            const auto face = trial % 2 == 0 ? SlabFace::top : SlabFace::bottom;
            worst = std::max(worst, trace_inequality_check(u, face).ratio);
        }
        std::ostringstream name;
        name << "max_ratio_thickness=" << d;
        out.push_back(make_check("trace", name.str(), worst, 1.0, false));
    }
    return out;
}

/// Smallest coercivity gap over random coefficient vectors, per sample s.
inline std::vector<CheckResult> verify_coercivity(const MappedMesh& mesh, const MaterialParams& mat,
                                                  const VerifyOptions& opt) {
    const auto pieces = assemble_pieces(mesh);
    std::mt19937_64 rng(opt.seed + 2);
    std::normal_distribution<double> nd;
    std::vector<CheckResult> out;
    for (cplx s : opt.coercivity_s) {
        const SystemMatrix A(pieces, mat, s);
        double worst = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < opt.coercivity_vectors; ++trial) {
            CVector v(A.size());
            for (auto& x : v) x = {nd(rng), nd(rng)};
            worst = std::min(worst, coercivity_gap(v, A, pieces, mat) / v.squaredNorm());
        }
        std::ostringstream name;
        name << "min_gap_s=" << s.real() << (s.imag() < 0 ? "" : "+") << s.imag() << 'i';
        out.push_back(make_check("coercivity", name.str(), worst, -1e-10, true));
    }
    return out;
}

/// Parseval residual of the pair t e^{-t} <-> 1/(s+1)^2 on the default line
/// for T, with the time integral over one line period [0, 2T].
inline std::vector<CheckResult> verify_parseval(const VerifyOptions& opt) {
    const auto line = LaplaceLine::for_horizon(opt.parseval_T);
    std::vector<cplx> F;
    for (int k = 0; k < line.n_s; ++k) F.push_back(1.0 / ((line.s(k) + 1.0) * (line.s(k) + 1.0)));
    const auto times = uniform_times(2.0 * opt.parseval_T, 2 * line.n_s + 1);
    std::vector<double> u;
    for (double t : times) u.push_back(t * std::exp(-t));
    return {make_check("parseval", "residual_t_exp", parseval_residual(times, u, F, line), 1e-6, false)};
}

inline std::vector<CheckResult> verify_mms(const MaterialParams& mat, const SolverOptions& solver,
                                           const VerifyOptions& opt) {
    ManufacturedSolution ms;
    ms.mat = mat;
    ms.s = opt.mms_s;
    const auto rep = manufactured_convergence(ms, opt.mms_sizes, opt.mms_order, solver);
    return {make_check("mms", "pressure_order", rep.p_order, opt.mms_order, true),
            make_check("mms", "displacement_order", rep.u_order, opt.mms_order, true)};
}

}  // namespace rfsi

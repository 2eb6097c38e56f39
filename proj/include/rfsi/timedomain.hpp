#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rfsi/dtn.hpp"
#include "rfsi/errors.hpp"
#include "rfsi/norms.hpp"
#include "rfsi/solve.hpp"
#include "rfsi/spectral.hpp"

namespace rfsi {

/// Real nodal fields on a uniform time grid; column i belongs to times[i].
struct TimeSeriesField {
    std::vector<double> times;
    Eigen::MatrixXd p, dp;         ///< pressure and its time derivative
    Eigen::MatrixXd u, du, ddu;    ///< displacement and two time derivatives

    int num_times() const { return static_cast<int>(times.size()); }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Inverts p, s p, u, s u and s^2 u sample by sample along the line.
inline TimeSeriesField reconstruct_time_fields(const std::vector<ComplexFieldS>& sweep, const LaplaceLine& line,
                                               std::span<const double> times) {
    line.validate();
    if (sweep.size() != static_cast<std::size_t>(line.n_s))
        throw ShapeError("sweep has " + std::to_string(sweep.size()) + " samples, line expects " +
                         std::to_string(line.n_s));
    const auto np = sweep.front().p.size(), nu = sweep.front().u.size();
    Eigen::MatrixXcd P(np, line.n_s), U(nu, line.n_s);
    std::vector<cplx> s(static_cast<std::size_t>(line.n_s));
    for (int k = 0; k < line.n_s; ++k) {
        const auto& f = sweep[static_cast<std::size_t>(k)];
        if (f.p.size() != np || f.u.size() != nu) throw ShapeError("sweep samples have inconsistent sizes");
        if (std::abs(f.s - line.s(k)) > 1e-12 * std::abs(line.s(k)))
            throw ShapeError("sweep sample " + std::to_string(k) + " is not on the line");
        P.col(k) = f.p;
        U.col(k) = f.u;
        s[static_cast<std::size_t>(k)] = line.s(k);
    }
    const Eigen::MatrixXcd K = inversion_kernel(line, times);
    Eigen::MatrixXcd Ks = K, Ks2 = K;
    for (int k = 0; k < line.n_s; ++k) {
        Ks.col(k) *= s[static_cast<std::size_t>(k)];
        Ks2.col(k) *= s[static_cast<std::size_t>(k)] * s[static_cast<std::size_t>(k)];
    }
    TimeSeriesField out;
    out.times.assign(times.begin(), times.end());
    out.p = (P * K.transpose()).real();
    out.dp = (P * Ks.transpose()).real();
    out.u = (U * K.transpose()).real();
    out.du = (U * Ks.transpose()).real();
    out.ddu = (U * Ks2.transpose()).real();
    return out;
}

namespace detail {

inline double quad_form(const RSparse& A, const Eigen::VectorXd& x) { return std::max(0.0, x.dot(A * x)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Energy

struct EnergyTrace {
    std::vector<double> t, e1, e2, total;

    double max_total() const { return total.empty() ? 0.0 : *std::max_element(total.begin(), total.end()); }
};

/// e1 = ||c^-1 dp||^2 + ||grad p||^2,
/// e2 = rho1 rho2 ||ddu||^2 + rho1 (lambda + mu) ||div du||^2 + rho1 mu ||grad du||_F^2.
inline EnergyTrace energy_series(const TimeSeriesField& f, const FormPieces& pieces, const MaterialParams& mat) {
    EnergyTrace e;
    e.t = f.times;
    const int n = f.num_times();
    e.e1.resize(n);
    e.e2.resize(n);
    e.total.resize(n);
    for (int i = 0; i < n; ++i) {
        e.e1[i] = detail::quad_form(pieces.Mf, f.dp.col(i)) / (mat.c * mat.c) + detail::quad_form(pieces.Kf, f.p.col(i));
        e.e2[i] = mat.rho1 * mat.rho2 * detail::quad_form(pieces.Mv, f.ddu.col(i)) +
                  mat.rho1 * (mat.lambda + mat.mu) * detail::quad_form(pieces.Dv, f.du.col(i)) +
                  mat.rho1 * mat.mu * detail::quad_form(pieces.Kv, f.du.col(i));
        e.total[i] = e.e1[i] + e.e2[i];
    }
    return e;
}

/// L2 norms in space of each time column of a field.
inline std::vector<double> column_norms(const RSparse& mass, const Eigen::MatrixXd& f) {
    std::vector<double> out(static_cast<std::size_t>(f.cols()));
    for (Eigen::Index i = 0; i < f.cols(); ++i) out[static_cast<std::size_t>(i)] = std::sqrt(detail::quad_form(mass, f.col(i)));
    return out;
}

inline double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

/// max_t E(t) <= 2 rho1 max_t ||ddu|| ||dj||_{L1(0,T;L2)}; passes when the ratio is at most 1 + slack.
inline NormReport energy_bound_check(const EnergyTrace& e, const TimeSeriesField& f, const FormPieces& pieces,
                                     const MaterialParams& mat, double dj_l1_l2, double slack = 1e-2) {
    const double max_ddu = max_of(column_norms(pieces.Mv, f.ddu));
    auto r = make_report("energy_bound", e.max_total(), 2.0 * mat.rho1 * max_ddu * dj_l1_l2, slack);
    r.values = {{"max_energy", e.max_total()}, {"max_ddu", max_ddu}, {"dj_l1_l2", dj_l1_l2}};
    return r;
}

// ---------------------------------------------------------------------------
// Initial conditions

struct InitialConditionReport {
    double p0 = 0.0, dp0 = 0.0, u0 = 0.0, du0 = 0.0;  ///< ||f(., 0)|| / max_t ||f(., t)||
    double energy0 = 0.0;                              ///< E(0) / max_t E(t)
    double tolerance = 0.0;
    bool pass = true;
};

inline InitialConditionReport initial_condition_report(const TimeSeriesField& f, const FormPieces& pieces,
                                                       const EnergyTrace& e, double tolerance) {
    auto rel0 = [](const std::vector<double>& v) {
        const double m = max_of(v);
        return m > 0.0 ? v.front() / m : 0.0;
    };
    InitialConditionReport r;
    r.tolerance = tolerance;
    r.p0 = rel0(column_norms(pieces.Mf, f.p));
    r.dp0 = rel0(column_norms(pieces.Mf, f.dp));
    r.u0 = rel0(column_norms(pieces.Mv, f.u));
    r.du0 = rel0(column_norms(pieces.Mv, f.du));
    r.energy0 = rel0(e.total);
    r.pass = r.p0 <= tolerance && r.dp0 <= tolerance && r.u0 <= tolerance && r.du0 <= tolerance &&
             r.energy0 <= tolerance;
    return r;
}

// ---------------------------------------------------------------------------
// Consistency checks

/// Smallest mode-wise value of Re(conj(s) beta / |s|^2) over every lateral
/// mode of the top grid and every line sample; nonnegative by the branch choice.
inline double dtn_sign_margin(const LaplaceLine& line, int n, double period, double c) {
    double worst = std::numeric_limits<double>::infinity();
    SpectralTrace probe{n, period, {}};
    for (int k = 0; k < line.n_s; ++k) {
        const cplx s = line.s(k);
        for (int m = 0; m < n * n; ++m) {
            const double v = (std::conj(s) * beta(probe.xi2(m), s, c)).real() / std::norm(s);
            worst = std::min(worst, v);
        }
    }
    return worst;
}

/// Max over interior times of ||central difference of u - du|| relative to max ||du||.
inline double derivative_shift_error(const TimeSeriesField& f, const RSparse& mass) {
    const int n = f.num_times();
    if (n < 3) return 0.0;
    const double dt = f.dt();
    const double scale = max_of(column_norms(mass, f.du));
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const Eigen::VectorXd fd = (f.u.col(i + 1) - f.u.col(i - 1)) / (2.0 * dt);
        worst = std::max(worst, std::sqrt(detail::quad_form(mass, fd - f.du.col(i))));
    }
    return worst / scale;
}

/// Measured constants C in max_t ||g||^2 <= C T^2 max_t ||dg||^2 for
/// g = du, div u and grad u; the integral form of the bound gives C <= 1.
struct CompatibilityReport {
    double velocity = 0.0, divergence = 0.0, gradient = 0.0;
    bool pass = true;
};

inline CompatibilityReport compatibility_constants(const TimeSeriesField& f, const FormPieces& pieces, double T) {
    auto ratio = [T](const std::vector<double>& g, const std::vector<double>& dg) {
        const double den = T * T * max_of(dg) * max_of(dg);
        return den > 0.0 ? max_of(g) * max_of(g) / den : 0.0;
    };
    CompatibilityReport r;
    r.velocity = ratio(column_norms(pieces.Mv, f.du), column_norms(pieces.Mv, f.ddu));
    r.divergence = ratio(column_norms(pieces.Dv, f.u), column_norms(pieces.Dv, f.du));
    r.gradient = ratio(column_norms(pieces.Kv, f.u), column_norms(pieces.Kv, f.du));
    r.pass = r.velocity <= 2.0 && r.divergence <= 2.0 && r.gradient <= 2.0;
    return r;
}

// ---------------------------------------------------------------------------
// Horizon scaling

/// Norms of one horizon run.
struct HorizonNorms {
    double T = 0.0;
    int n_s = 0;
    double p_linf = 0.0, u_linf = 0.0, p_l2 = 0.0, u_l2 = 0.0;
    double pressure_stability = 0.0;      ///< max_t (||dp|| + ||grad p||)
    double displacement_stability = 0.0;  ///< max_t (||du|| + ||div u|| + ||grad u||_F)
    double dj_l1_l2 = 0.0;
    double max_residual = 0.0;
};

inline HorizonNorms horizon_norms(const TimeSeriesField& f, const FormPieces& pieces) {
    HorizonNorms h;
    const auto p = column_norms(pieces.Mf, f.p);
    const auto u = column_norms(pieces.Mv, f.u);
    const auto dp = column_norms(pieces.Mf, f.dp), gp = column_norms(pieces.Kf, f.p);
    const auto du = column_norms(pieces.Mv, f.du), divu = column_norms(pieces.Dv, f.u), gu = column_norms(pieces.Kv, f.u);
    std::vector<double> p2(p.size()), u2(u.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p2[i] = p[i] * p[i];
        u2[i] = u[i] * u[i];
        h.pressure_stability = std::max(h.pressure_stability, dp[i] + gp[i]);
        h.displacement_stability = std::max(h.displacement_stability, du[i] + divu[i] + gu[i]);
    }
    h.p_linf = max_of(p);
    h.u_linf = max_of(u);
    h.p_l2 = std::sqrt(simpson(p2, f.dt()));
    h.u_l2 = std::sqrt(simpson(u2, f.dt()));
    return h;
}

struct ExponentFit {
    std::string name;
    double slope = 0.0;
    double bound = 0.0;
    bool pass = true;
};

struct AprioriReport {
    std::vector<HorizonNorms> runs;
    std::vector<ExponentFit> fits;
    double pressure_spread = 1.0;      ///< max/min over T of the pressure stability quantity
    double displacement_spread = 1.0;
    double spread_limit = 3.0;
    bool zero_source = false;
    bool pass = true;
};

struct AprioriOptions {
    double s2_max = 100.0;     ///< target half-width; n_s is rounded up to keep it
    int min_samples = 16;
    double slope_slack = 0.25;
    double spread_limit = 3.0;
};

/// Sample count for horizon T: the smallest even n_s >= min_samples with
/// s2_max(T, n_s) = n_s pi / (2T) reaching the target half-width.
inline int samples_for_horizon(double T, const AprioriOptions& opt) {
    int n = static_cast<int>(std::ceil(opt.s2_max * 2.0 * T / kPi));
    n += n % 2;
    return std::max(n, opt.min_samples + opt.min_samples % 2);
}

/// Runs the sweep and reconstruction per horizon with the source unchanged,
/// then fits log-norm against log-T slopes.
inline AprioriReport apriori_exponents(const std::vector<double>& horizons, const ProblemSetup& setup,
                                       const AprioriOptions& opt = {}) {
    if (horizons.size() < 3) throw ConfigError("apriori exponents need at least 3 horizons");
    for (double T : horizons)
        if (!(T > 0.0)) throw ConfigError("horizons must be positive");
    AprioriReport rep;
    rep.spread_limit = opt.spread_limit;
    for (double T : horizons) {
        const int n_s = samples_for_horizon(T, opt);
        const auto line = LaplaceLine::for_horizon(T, n_s);
        HorizonNorms h;
        if (!setup.source.is_zero()) {
            const auto sweep = sweep_line(line, setup);
            const auto times = uniform_times(T, n_s);
            h = horizon_norms(reconstruct_time_fields(sweep, line, times), setup.pieces);
            for (const auto& f : sweep) h.max_residual = std::max(h.max_residual, f.residual);
        }
        h.T = T;
        h.n_s = n_s;
        h.dj_l1_l2 = setup.source_l2 * setup.source.temporal.derivative_l1(T);
        rep.runs.push_back(h);
    }
    rep.zero_source = std::all_of(rep.runs.begin(), rep.runs.end(), [](const HorizonNorms& h) {
        return h.p_linf == 0.0 && h.u_linf == 0.0;
    });
    if (rep.zero_source) return rep;

    std::vector<double> T, pl, ul, p2, u2, ps, us;
    for (const auto& h : rep.runs) {
        T.push_back(h.T);
        pl.push_back(h.p_linf);
        ul.push_back(h.u_linf);
        p2.push_back(h.p_l2);
        u2.push_back(h.u_l2);
        ps.push_back(h.pressure_stability);
        us.push_back(h.displacement_stability);
    }
    auto add = [&](const char* name, const std::vector<double>& y, double exponent) {
        ExponentFit f{name, fit_log_slope(T, y), exponent + opt.slope_slack, true};
        f.pass = f.slope <= f.bound;
        rep.pass = rep.pass && f.pass;
        rep.fits.push_back(f);
    };
    add("p_Linf_L2", pl, 1.0);
    add("u_Linf_L2", ul, 2.0);
    add("p_L2_L2", p2, 1.5);
    add("u_L2_L2", u2, 2.5);
    rep.pressure_spread = spread_factor(ps);
    rep.displacement_spread = spread_factor(us);
    rep.pass = rep.pass && rep.pressure_spread < opt.spread_limit && rep.displacement_spread < opt.spread_limit;
    return rep;
}

}  // namespace rfsi

#include <cmath>

#include <gtest/gtest.h>

#include "rfsi/manufactured.hpp"
#include "rfsi/timedomain.hpp"

using namespace rfsi;

namespace {

/// Synthetic sweep whose p and u samples are given closed-form transforms times fixed spatial vectors.
template <class F>
std::vector<ComplexFieldS> synthetic_sweep(const LaplaceLine& line, const CVector& p_shape, const CVector& u_shape, F&& F_s) {
    std::vector<ComplexFieldS> out(line.n_s);
    for (int k = 0; k < line.n_s; ++k) {
        out[k].s = line.s(k);
        out[k].p = p_shape * F_s(line.s(k));
        out[k].u = u_shape * F_s(line.s(k));
    }
    return out;
}

MappedMesh coarse() {
    return build_mesh(sample_surfaces(SurfaceSpec::sinusoid(0.0, 0.1, 1), SurfaceSpec::flat(-1.0), 2.0, 4, 1.0), 2, 2);
}

ProblemSetup default_setup(int n, const TemporalProfile& tp) {
    auto mesh = build_mesh(sample_surfaces(SurfaceSpec::sinusoid(0.0, 0.1, 1), SurfaceSpec::flat(-1.0), 2.0, n, 1.0),
                           n / 2, n / 2);
    SourceTerm j;
    j.spatial.center = {1.0, 1.0, -0.5};
    j.spatial.radius = {0.6, 0.6, 0.3};
    j.spatial.direction = {0.0, 0.0, 1.0};
    j.spatial.period = 2.0;
    j.temporal = tp;
    return ProblemSetup::create(mesh, MaterialParams{}, j);
}

}  // namespace

TEST(Reconstruct, ZeroSweepGivesZeroFields) {
    LaplaceLine line{1.0, 10.0, 16};
    auto sweep = synthetic_sweep(line, CVector::Zero(3), CVector::Zero(6), [](cplx) { return cplx(1.0); });
    auto f = reconstruct_time_fields(sweep, line, uniform_times(2.0, 16));
    EXPECT_EQ(f.p.cwiseAbs().maxCoeff() + f.u.cwiseAbs().maxCoeff() + f.ddu.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Reconstruct, AnalyticPairAndDerivatives) {
    // u_hat = 1/(s+1)^4: u = t^3 e^{-t} / 6, du = (t^2/2 - t^3/6) e^{-t}, ddu = (t - t^2 + t^3/6) e^{-t}
    const double T = 6.0;
    auto line = LaplaceLine::for_horizon(T, 4096);
    CVector shape(2);
    shape << 1.0, -0.5;
    auto sweep = synthetic_sweep(line, shape, shape, [](cplx s) { return 1.0 / std::pow(s + 1.0, 4); });
    auto times = uniform_times(T, 61);
    auto f = reconstruct_time_fields(sweep, line, times);
    for (int i = 0; i < 61; ++i) {
        const double t = times[i], e = std::exp(-t);
        EXPECT_NEAR(f.u(0, i), t * t * t / 6.0 * e, 1e-6);
        EXPECT_NEAR(f.u(1, i), -t * t * t / 12.0 * e, 1e-6);
        EXPECT_NEAR(f.p(0, i), t * t * t / 6.0 * e, 1e-6);
        EXPECT_NEAR(f.du(0, i), (0.5 * t * t - t * t * t / 6.0) * e, 1e-5);
        EXPECT_NEAR(f.ddu(0, i), (t - t * t + t * t * t / 6.0) * e, 1e-3);
    }
}

TEST(Reconstruct, MissingSamplesRejected) {
    LaplaceLine line{1.0, 10.0, 16};
    auto sweep = synthetic_sweep(line, CVector::Ones(2), CVector::Ones(3), [](cplx s) { return 1.0 / s; });
    sweep.pop_back();
    EXPECT_THROW(reconstruct_time_fields(sweep, line, uniform_times(1.0, 8)), ShapeError);
    auto wrong = synthetic_sweep(LaplaceLine{2.0, 10.0, 16}, CVector::Ones(2), CVector::Ones(3), [](cplx s) { return 1.0 / s; });
    EXPECT_THROW(reconstruct_time_fields(wrong, line, uniform_times(1.0, 8)), ShapeError);
}

TEST(Reconstruct, DerivativeShiftIsSecondOrder) {
    const double T = 6.0;
    auto line = LaplaceLine::for_horizon(T, 2048);
    CVector shape = CVector::Ones(3);
    auto sweep = synthetic_sweep(line, shape, shape, [](cplx s) { return 1.0 / std::pow(s + 1.0, 4); });
    RSparse mass(3, 3);
    mass.setIdentity();
    const double e1 = derivative_shift_error(reconstruct_time_fields(sweep, line, uniform_times(T, 161)), mass);
    const double e2 = derivative_shift_error(reconstruct_time_fields(sweep, line, uniform_times(T, 321)), mass);
    EXPECT_NEAR(e1 / e2, 4.0, 0.5);
}

TEST(Energy, ZeroFieldsGiveZeroEnergy) {
    auto pieces = assemble_pieces(coarse());
    TimeSeriesField f;
    f.times = {0.0, 0.5, 1.0};
    f.p = f.dp = Eigen::MatrixXd::Zero(pieces.layout.num_p(), 3);
    f.u = f.du = f.ddu = Eigen::MatrixXd::Zero(pieces.layout.num_u(), 3);
    auto e = energy_series(f, pieces, MaterialParams{});
    EXPECT_EQ(e.max_total(), 0.0);
}

TEST(Energy, SpatiallyConstantFieldsClosedForm) {
    // grad p = 0, grad du = 0 except the clamped bottom layer, so use p only,
    // plus a uniform ddu: e1 = (dp / c)^2 |fluid|, e2 = rho1 rho2 |ddu|^2 |solid| up to the bottom layer
    auto mesh = build_flat_mesh(2.0, 4, 1.0, 1.0, 2, 2);
    auto pieces = assemble_pieces(mesh);
    MaterialParams mat;
    mat.c = 2.0;
    mat.rho1 = 1.5;
    TimeSeriesField f;
    f.times = {0.0, 1.0};
    f.p = Eigen::MatrixXd::Zero(pieces.layout.num_p(), 2);
    f.dp = Eigen::MatrixXd::Constant(pieces.layout.num_p(), 2, 3.0);
    f.u = f.du = f.ddu = Eigen::MatrixXd::Zero(pieces.layout.num_u(), 2);
    auto e = energy_series(f, pieces, mat);
    EXPECT_NEAR(e.e1[1], 9.0 / 4.0 * 4.0, 1e-12);
    EXPECT_EQ(e.e2[1], 0.0);
}

TEST(DtnSign, NonnegativeOnEveryModeAndSample) {
    for (double T : {0.5, 3.0, 20.0}) {
        auto line = LaplaceLine::for_horizon(T, 128);
        EXPECT_GE(dtn_sign_margin(line, 16, 2.0, 1.0), 0.0);
        EXPECT_GE(dtn_sign_margin(line, 8, 0.3, 4.0), 0.0);
    }
}

TEST(Pipeline, CoarseRunSatisfiesEnergyAndInitialConditions) {
    auto setup = default_setup(4, TemporalProfile::damped_sine(1.0, 2.0));
    const double T = 3.0;
    auto line = LaplaceLine::for_horizon(T, 64);
    auto sweep = sweep_line(line, setup);
    auto f = reconstruct_time_fields(sweep, line, uniform_times(T, 64));
    auto e = energy_series(f, setup.pieces, setup.materials);
    auto ic = initial_condition_report(f, setup.pieces, e, 1e-4);
    EXPECT_TRUE(ic.pass) << ic.p0 << ' ' << ic.dp0 << ' ' << ic.u0 << ' ' << ic.du0 << ' ' << ic.energy0;
    auto eb = energy_bound_check(e, f, setup.pieces, setup.materials,
                                 setup.source_l2 * setup.source.temporal.derivative_l1(T));
    EXPECT_TRUE(eb.pass) << eb.ratio;
    auto comp = compatibility_constants(f, setup.pieces, T);
    EXPECT_TRUE(comp.pass);
    EXPECT_LE(comp.velocity, 1.0);
}

TEST(Apriori, RejectsTooFewHorizons) {
    auto setup = default_setup(4, TemporalProfile::pulse(0.5));
    EXPECT_THROW(apriori_exponents({1.0, 2.0}, setup), ConfigError);
    EXPECT_THROW(apriori_exponents({1.0, 2.0, -1.0}, setup), ConfigError);
}

TEST(Apriori, ZeroSourceSkipsFit) {
    auto setup = default_setup(4, TemporalProfile::zero());
    auto rep = apriori_exponents({0.5, 1.0, 2.0}, setup);
    EXPECT_TRUE(rep.zero_source);
    EXPECT_TRUE(rep.fits.empty());
    for (const auto& h : rep.runs) EXPECT_EQ(h.p_l2 + h.u_l2, 0.0);
}

TEST(Apriori, SampleCountKeepsHalfWidth) {
    AprioriOptions opt;
    opt.s2_max = 100.0;
    for (double T : {0.5, 1.0, 2.0, 4.0}) {
        const int n = samples_for_horizon(T, opt);
        EXPECT_EQ(n % 2, 0);
        EXPECT_GE(LaplaceLine::for_horizon(T, n).s2_max, 100.0);
    }
}

TEST(Apriori, CoarseSlopesWithinBounds) {
    auto setup = default_setup(4, TemporalProfile::pulse(0.5));
    AprioriOptions opt;
    opt.s2_max = 60.0;
    auto rep = apriori_exponents({0.5, 1.0, 2.0, 4.0}, setup, opt);
    ASSERT_EQ(rep.fits.size(), 4u);
    for (const auto& f : rep.fits) EXPECT_TRUE(f.pass) << f.name << ' ' << f.slope;
    EXPECT_LT(rep.pressure_spread, 3.0);
    EXPECT_LT(rep.displacement_spread, 3.0);
    // the source is identical across horizons
    for (const auto& h : rep.runs) EXPECT_NEAR(h.dj_l1_l2, rep.runs[0].dj_l1_l2, 1e-12);
}

TEST(Fit, LogSlopeOfPowerLaw) {
    std::vector<double> x{0.5, 1.0, 2.0, 4.0}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
    EXPECT_NEAR(fit_log_slope(x, y), 2.5, 1e-12);
    EXPECT_THROW(fit_log_slope({1.0, 2.0}, {1.0, 0.0}), DomainError);
}

TEST(Manufactured, ExactFieldsSatisfyStrongEquations) {
    ManufacturedSolution ms;
    // Helmholtz in the fluid by central differences, transparent condition at z = h
    const Vec3 x{0.3, 0.7, 0.4};
    const double d = 1e-3;
    cplx lap = 0.0;
    for (int c = 0; c < 3; ++c) {
        Vec3 xp = x, xm = x;
        xp[c] += d;
        xm[c] -= d;
        lap += (ms.p(xp) - 2.0 * ms.p(x) + ms.p(xm)) / (d * d);
    }
    EXPECT_LT(std::abs(lap - ms.s * ms.s / (ms.mat.c * ms.mat.c) * ms.p(x)), 1e-4 * std::abs(ms.p(x)) * 10);
    const Vec3 top{0.3, 0.7, ms.h};
    EXPECT_LT(std::abs(ms.grad_p(top)[2] + ms.beta_k() * ms.p(top)), 1e-14);
    const auto u0 = ms.u({0.2, 0.1, ms.g0});
    EXPECT_EQ(std::abs(u0[0]) + std::abs(u0[1]) + std::abs(u0[2]), 0.0);
}

TEST(Manufactured, BodyForceMatchesFiniteDifferences) {
    ManufacturedSolution ms;
    const Vec3 x{0.4, 1.3, -0.6};
    const double d = 1e-3;
    auto f = ms.body_force(x);
    for (int al = 0; al < 3; ++al) {
        cplx lap = 0.0, graddiv = 0.0;
        for (int c = 0; c < 3; ++c) {
            Vec3 xp = x, xm = x;
            xp[c] += d;
            xm[c] -= d;
            lap += (ms.u(xp)[al] - 2.0 * ms.u(x)[al] + ms.u(xm)[al]) / (d * d);
        }
        Vec3 xp = x, xm = x;
        xp[al] += d;
        xm[al] -= d;
        graddiv = (ms.div_u(xp) - ms.div_u(xm)) / (2.0 * d);
        const cplx ref = ms.mat.mu * lap + (ms.mat.lambda + ms.mat.mu) * graddiv - ms.mat.rho2 * ms.s * ms.s * ms.u(x)[al];
        EXPECT_LT(std::abs(f[al] - ref), 1e-5);
    }
}

TEST(Manufactured, SecondOrderConvergence) {
    ManufacturedSolution ms;
    auto rep = manufactured_convergence(ms, {4, 8, 16});
    EXPECT_TRUE(rep.pass) << rep.p_order << ' ' << rep.u_order;
    for (std::size_t k = 1; k < rep.levels.size(); ++k) {
        EXPECT_LT(rep.levels[k].p_error, rep.levels[k - 1].p_error);
        EXPECT_LT(rep.levels[k].u_error, rep.levels[k - 1].u_error);
    }
}

#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include "rfsi/solve.hpp"

using namespace rfsi;

namespace {

MappedMesh coarse() {
    return build_mesh(sample_surfaces(SurfaceSpec::sinusoid(0.0, 0.1, 1), SurfaceSpec::flat(-1.0), 2.0, 4, 1.0), 2, 4);
}

SourceTerm source(const TemporalProfile& tp) {
    SourceTerm j;
    j.spatial.center = {1.0, 1.0, -0.5};
    j.spatial.radius = {0.8, 0.8, 0.24};
    j.spatial.direction = {0.2, 0.0, 1.0};
    j.spatial.period = 2.0;
    j.temporal = tp;
    return j;
}

MaterialParams materials() {
    MaterialParams m;
    m.rho2 = 2.0;
    return m;
}

}  // namespace

TEST(Gmres, MatchesDenseSolve) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::damped_sine(1.0, 2.0)));
    const cplx s(0.8, 1.5);
    SystemMatrix A(setup.pieces, setup.materials, s);
    auto b = setup.rhs(s);
    auto sol = solve_at_s(A, b, 1e-12);
    Eigen::VectorXcd ref = A.to_dense().partialPivLu().solve(b);
    CVector x(A.size());
    x << sol.p, sol.u;
    EXPECT_LT((x - ref).norm(), 1e-9 * ref.norm());
    EXPECT_LE(sol.residual, 1e-12);
}

TEST(Solve, ZeroRhsGivesZero) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::zero()));
    SystemMatrix A(setup.pieces, setup.materials, {1.0, 2.0});
    auto sol = solve_at_s(A, CVector::Zero(A.size()), 1e-10);
    EXPECT_EQ(sol.residual, 0.0);
    EXPECT_EQ(sol.p.norm() + sol.u.norm(), 0.0);
}

TEST(Solve, LinearInRhs) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::power_exp(1, 1.0)));
    const cplx s(1.0, 4.0);
    SystemMatrix A(setup.pieces, setup.materials, s);
    auto b = setup.rhs(s);
    auto x1 = solve_at_s(A, b, 1e-12);
    auto x2 = solve_at_s(A, cplx(3.0, -1.0) * b, 1e-12);
    EXPECT_LT((x2.u - cplx(3.0, -1.0) * x1.u).norm(), 1e-9 * x2.u.norm());
    EXPECT_LT((x2.p - cplx(3.0, -1.0) * x1.p).norm(), 1e-9 * x2.p.norm());
}

TEST(Solve, ReportsNonConvergence) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::power_exp(1, 1.0)));
    const cplx s(1.0, 4.0);
    SystemMatrix A(setup.pieces, setup.materials, s);
    SolverOptions opt;
    opt.max_iterations = 1;
    try {
        solve_at_s(A, setup.rhs(s), 1e-30, opt);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_GT(e.residual(), 0.0);
    }
    EXPECT_THROW(solve_at_s(A, setup.rhs(s), 0.0), ValidationError);
}

TEST(Sweep, ZeroSourceGivesZeroFields) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::zero()));
    LaplaceLine line{1.0, 10.0, 8};
    for (const auto& f : sweep_line(line, setup)) EXPECT_EQ(f.p.norm() + f.u.norm(), 0.0);
}

TEST(Sweep, ConjugateSymmetryAndResiduals) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::damped_sine(1.0, 2.0)));
    auto line = LaplaceLine::for_horizon(4.0, 64);
    auto fields = sweep_line(line, setup);
    ASSERT_EQ(fields.size(), 64u);
    for (const auto& f : fields) EXPECT_LE(f.residual, setup.solver.tol);
    // an explicit solve at a lower-half sample equals the mirrored field
    const int k = 5;
    auto direct = setup.solve(line.s(k));
    EXPECT_LT((direct.u - fields[k].u).norm(), 1e-8 * direct.u.norm());
    EXPECT_LT((direct.p - fields[k].p).norm(), 1e-8 * direct.p.norm());
}

TEST(Sweep, DeterministicAcrossWorkerCounts) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::damped_sine(1.0, 2.0)));
    LaplaceLine line{1.0, 20.0, 8};
    setup.workers = 1;
    auto a = sweep_line(line, setup);
    setup.workers = 3;
    auto b = sweep_line(line, setup);
    for (int k = 0; k < 8; ++k) {
        EXPECT_EQ((a[k].u - b[k].u).norm(), 0.0);
        EXPECT_EQ((a[k].p - b[k].p).norm(), 0.0);
    }
}

TEST(Workers, EnvironmentOverride) {
    ::setenv("RFSI_WORKERS", "5", 1);
    EXPECT_EQ(resolve_workers(2), 5);
    ::setenv("RFSI_WORKERS", "junk", 1);
    EXPECT_EQ(resolve_workers(2), 2);
    ::unsetenv("RFSI_WORKERS");
    EXPECT_EQ(resolve_workers(0), 1);
}

TEST(SDomainReport, ZeroSourceAndHomogeneity) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::damped_sine(1.0, 2.0)));
    const cplx s(1.0, 3.0);
    auto sol = setup.solve(s);
    auto r1 = s_domain_estimate_report(sol, setup.pieces, setup.source_norm(s));
    EXPECT_GT(r1.R_p, 0.0);
    EXPECT_GT(r1.R_u, 0.0);

    auto doubled = ProblemSetup::create(coarse(), materials(), setup.source.scaled(2.0));
    auto sol2 = doubled.solve(s);
    auto r2 = s_domain_estimate_report(sol2, doubled.pieces, doubled.source_norm(s));
    EXPECT_NEAR(r2.R_p, r1.R_p, 1e-8 * r1.R_p);
    EXPECT_NEAR(r2.R_u, r1.R_u, 1e-8 * r1.R_u);

    auto r0 = s_domain_estimate_report(sol, setup.pieces, 0.0);
    EXPECT_TRUE(r0.zero_source);
    EXPECT_EQ(r0.R_p, 0.0);
    EXPECT_EQ(r0.R_u, 0.0);
}

TEST(SDomainReport, RatiosBoundedAlongLine) {
    auto setup = ProblemSetup::create(coarse(), materials(), source(TemporalProfile::damped_sine(1.0, 2.0)));
    std::vector<double> rp, ru;
    for (int k = 0; k <= 20; ++k) {
        const cplx s(1.0, k);
        auto r = s_domain_estimate_report(setup.solve(s), setup.pieces, setup.source_norm(s));
        rp.push_back(r.R_p);
        ru.push_back(r.R_u);
    }
    EXPECT_LT(spread_factor(rp), 50.0);
    EXPECT_LT(spread_factor(ru), 50.0);
}

TEST(SweepLog, WritesHeader) {
    const std::string path = ::testing::TempDir() + "sweep.csv";
    write_sweep_log({SDomainReport{{1.0, 2.0}, 1e-11, 0.5, 0.25, false}}, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "re_s,im_s,residual,R_p,R_u");
}

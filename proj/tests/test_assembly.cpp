#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rfsi/assembly.hpp"

using namespace rfsi;

namespace {

MaterialParams materials() {
    MaterialParams m;
    m.rho1 = 1.2;
    m.c = 0.8;
    m.rho2 = 2.5;
    m.mu = 1.3;
    m.lambda = 0.7;
    return m;
}

RoughSurfacePair rough(int n) {
    SurfaceSpec f;
    f.terms = {{0.1, 1, 0, 0.2}, {0.05, 1, 1, 0.9}};
    return sample_surfaces(f, SurfaceSpec::sinusoid(-1.0, 0.05, 0, 1), 2.0, n, 1.0);
}

SpatialBump bump() {
    SpatialBump b;
    b.center = {0.9, 1.1, -0.5};
    b.radius = {0.8, 0.7, 0.45};
    b.direction = {0.3, -0.5, 1.0};
    b.period = 2.0;
    return b;
}

CVector random_vector(std::mt19937& rng, int n) {
    std::normal_distribution<double> nd;
    CVector v(n);
    for (int k = 0; k < n; ++k) v[k] = {nd(rng), nd(rng)};
    return v;
}

}  // namespace

TEST(Assembly, MatchesDenseOracleSmallest) {
    auto surf = rough(2);
    auto mesh = build_mesh_layers(surf, 1, 1);
    const auto mat = materials();
    const cplx s(0.9, 2.1);
    auto A = assemble_system(mesh, mat, s).to_dense();
    auto ref = oracle::dense_system(oracle::from_surfaces(surf, 1, 1), mat, s);
    EXPECT_LT(oracle::max_rel_entry_error(A, ref), 1e-12);
}

TEST(Assembly, MatchesDenseOracleRoughInterface) {
    auto surf = rough(4);
    auto mesh = build_mesh(surf, 2, 2);
    const auto mat = materials();
    for (cplx s : {cplx(1.0, 0.0), cplx(0.3, -4.0)}) {
        auto A = assemble_system(mesh, mat, s).to_dense();
        auto ref = oracle::dense_system(oracle::from_surfaces(surf, 2, 2), mat, s);
        EXPECT_LT(oracle::max_rel_entry_error(A, ref), 1e-12);
    }
}

TEST(Assembly, RhsMatchesDenseOracle) {
    auto surf = rough(4);
    auto mesh = build_mesh(surf, 2, 3);
    const auto mat = materials();
    const cplx s(0.6, 1.7);
    SourceTerm j{bump(), TemporalProfile::damped_sine(1.0, 2.0)};
    auto rhs = assemble_rhs(mesh, mat, s, j);
    auto ref = oracle::dense_rhs(oracle::from_surfaces(surf, 2, 3), mat, s, j.spatial, j.temporal.laplace(s));
    const double scale = ref.cwiseAbs().maxCoeff();
    ASSERT_GT(scale, 0.0);
    for (Eigen::Index k = 0; k < ref.size(); ++k)
        EXPECT_LE(std::abs(rhs[k] - ref[k]), 1e-12 * std::max(std::abs(ref[k]), 1e-3 * scale));
    const DofLayout L(mesh);
    EXPECT_EQ(rhs.head(L.num_p()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, RhsZeroAndLinear) {
    auto mesh = build_mesh(rough(4), 2, 3);
    const auto mat = materials();
    const cplx s(1.0, 1.0);
    SourceTerm zero{bump(), TemporalProfile::zero()};
    EXPECT_EQ(assemble_rhs(mesh, mat, s, zero).cwiseAbs().maxCoeff(), 0.0);
    SourceTerm j{bump(), TemporalProfile::power_exp(1, 1.0)};
    auto a = assemble_rhs(mesh, mat, s, j);
    auto b = assemble_rhs(mesh, mat, s, j.scaled(2.0));
    EXPECT_LT((b - 2.0 * a).cwiseAbs().maxCoeff(), 1e-15 * a.cwiseAbs().maxCoeff());
    EXPECT_THROW(assemble_rhs(mesh, mat, {0.0, 1.0}, j), DomainError);
}

TEST(Assembly, ZeroVectorAndDomain) {
    auto mesh = build_mesh(rough(4), 2, 2);
    auto A = assemble_system(mesh, materials(), {1.0, 2.0});
    CVector z = CVector::Zero(A.size());
    EXPECT_EQ(z.dot(A.apply(z)), cplx(0.0));
    EXPECT_THROW(assemble_system(mesh, materials(), {-0.1, 1.0}), DomainError);
}

TEST(Assembly, ElasticStiffnessScalesWithModuli) {
    auto pieces = assemble_pieces(build_mesh(rough(4), 2, 2));
    auto mat = materials();
    const cplx s(0.7, 1.9);
    const double alpha = 3.0;
    auto scaled = mat;
    scaled.mu *= alpha;
    scaled.lambda = alpha * (mat.lambda + mat.mu) - scaled.mu;
    SystemMatrix A(pieces, mat, s), B(pieces, scaled, s);
    CSparse mass = pieces.Mv.cast<cplx>() * (mat.rho1 * mat.rho2 * s * std::norm(s));
    Eigen::MatrixXcd ka = Eigen::MatrixXcd(A.elastic() - mass);
    Eigen::MatrixXcd kb = Eigen::MatrixXcd(B.elastic() - mass);
    EXPECT_LT((kb - alpha * ka).cwiseAbs().maxCoeff(), 1e-13 * ka.cwiseAbs().maxCoeff());
}

TEST(Assembly, InterfaceTermHasZeroRealPart) {
    auto pieces = assemble_pieces(build_mesh(rough(4), 2, 2));
    const auto mat = materials();
    SystemMatrix A(pieces, mat, {0.4, 3.0});
    std::mt19937 rng(0);
    const int np = pieces.layout.num_p();
    for (int trial = 0; trial < 10; ++trial) {
        CVector v = random_vector(rng, A.size());
        const cplx form = v.head(np).dot(A.coupling_pu() * v.tail(v.size() - np)) +
                          v.tail(v.size() - np).dot(A.coupling_up() * v.head(np));
        EXPECT_NEAR(form.real(), 0.0, 1e-12 * std::abs(form));
    }
}

TEST(Assembly, SplitFormsCombineToSystem) {
    auto pieces = assemble_pieces(build_mesh(rough(4), 2, 2));
    const auto mat = materials();
    const cplx s(0.8, -2.2);
    auto split = assemble_split(pieces, mat, s);
    Eigen::MatrixXcd combined(pieces.layout.size(), pieces.layout.size());
    combined << split.pressure_rows, split.displacement_rows * (mat.rho1 * std::norm(s));
    auto A = SystemMatrix(pieces, mat, s).to_dense();
    EXPECT_LT(oracle::max_rel_entry_error(combined, A), 1e-12);
}

TEST(Assembly, ConjugateSymmetryInS) {
    auto pieces = assemble_pieces(build_mesh(rough(4), 2, 2));
    const auto mat = materials();
    const cplx s(0.5, 1.3);
    auto A = SystemMatrix(pieces, mat, s).to_dense();
    auto B = SystemMatrix(pieces, mat, std::conj(s)).to_dense();
    EXPECT_LT((B - A.conjugate()).cwiseAbs().maxCoeff(), 1e-13 * A.cwiseAbs().maxCoeff());
}

TEST(Coercivity, ZeroAndPureAcoustic) {
    auto pieces = assemble_pieces(build_mesh(rough(4), 2, 2));
    const auto mat = materials();
    SystemMatrix A(pieces, mat, {1.0, 3.0});
    CVector v = CVector::Zero(A.size());
    EXPECT_EQ(coercivity_gap(v, A, pieces, mat), 0.0);
    std::mt19937 rng(1);
    v.head(pieces.layout.num_p()) = random_vector(rng, pieces.layout.num_p());
    EXPECT_GE(coercivity_gap(v, A, pieces, mat), 0.0);
}

TEST(Coercivity, RandomVectorsRespectBound) {
    auto pieces = assemble_pieces(build_mesh(rough(8), 4, 4));
    const auto mat = materials();
    std::mt19937 rng(2);
    for (cplx s : {cplx(1.0, 0.0), cplx(1.0, 3.0), cplx(0.3, 10.0)}) {
        SystemMatrix A(pieces, mat, s);
        for (int trial = 0; trial < 20; ++trial) {
            CVector v = random_vector(rng, A.size());
            ASSERT_GE(coercivity_gap(v, A, pieces, mat), -1e-10 * v.squaredNorm());
        }
    }
}

TEST(Assembly, CooDumpRoundTrip) {
    auto mesh = build_mesh(rough(2), 2, 2);
    auto A = assemble_system(mesh, materials(), {1.0, 1.0});
    const std::string path = ::testing::TempDir() + "matrix.coo";
    write_coo(A, path);
    std::ifstream in(path);
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(A.size(), A.size());
    int r, c;
    double re, im;
    while (in >> r >> c >> re >> im) B(r, c) += cplx(re, im);
    EXPECT_LT((B - A.to_dense()).cwiseAbs().maxCoeff(), 1e-14);
}

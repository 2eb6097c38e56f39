// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rfsi/assembly.hpp"
#include "rfsi/config.hpp"
#include "rfsi/dtn.hpp"
#include "rfsi/manufactured.hpp"
#include "rfsi/norms.hpp"
#include "rfsi/pipeline.hpp"
#include "rfsi/solve.hpp"

using namespace rfsi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    double time_limit = 0.0;  ///< seconds, 0 for none
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::vector<cplx> random_nodal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    std::vector<cplx> v(static_cast<std::size_t>(n) * n);
    for (auto& x : v) x = {nd(rng), nd(rng)};
    return v;
}

/// Re s uniform on (0, 1000], Im s uniform on [-1000, 1000].
cplx random_s(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0), im(-1e3, 1e3);
    const double re = 1e3 * (1.0 - unit(rng));
    return {re, im(rng)};
}

MaterialParams mixed_materials() {
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

std::string config_path(const char* name) { return std::string(RFSI_SOURCE_DIR) + "/configs/" + name; }

std::filesystem::path scratch(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / (std::string("rfsi_acceptance_") + name);
    std::filesystem::remove_all(dir);
    return dir;
}

const CheckResult& find_check(const RunSummary& s, const std::string& suite, const std::string& name) {
    for (const auto& c : s.checks)
        if (c.suite == suite && c.name == name) return c;
    throw std::runtime_error("missing check " + suite + "/" + name);
}

Outcome dtn_dissipation_check() {
    std::mt19937_64 rng(101);
    double worst = 1e300;
    for (int k = 0; k < 10000; ++k) {
        const cplx s = random_s(rng);
        const auto tr = to_spectral(random_nodal(rng, 8), 8, 2.0);
        double norm2 = 0.0;
        for (const auto& v : tr.coeffs) norm2 += std::norm(v);
        norm2 *= tr.mode_measure();
        worst = std::min(worst, dtn_dissipation(tr, s, 1.0) / norm2);
    }
    return {worst >= -1e-12, "min dissipation/||trace||^2 = " + fmt(worst) + " (>= -1e-12)", 10.0};
}

Outcome beta_branch_check() {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> xi(0.0, 1e6), cs(0.1, 10.0);
    double min_re = 1e300, worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const cplx s = random_s(rng);
        const double x = xi(rng), c = cs(rng);
        const cplx b = beta(x, s, c);
        const cplx target = s * s / (c * c) + x;
        min_re = std::min(min_re, b.real());
        worst = std::max(worst, std::abs(b * b - target) / std::abs(target));
    }
    return {min_re > 0.0 && worst <= 1e-12, "min Re beta = " + fmt(min_re) + ", max rel |beta^2 - target| = " + fmt(worst)};
}

Outcome dtn_oracle_check() {
    std::mt19937_64 rng(103);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const cplx s = random_s(rng);
        const auto nodal = random_nodal(rng, 8);
        const auto got = to_nodal(apply_dtn(to_spectral(nodal, 8, 2.0), s, 1.3));
        const auto ref = oracle::dense_dtn(nodal, 8, 2.0, s, 1.3);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            num = std::max(num, std::abs(got[i] - ref[i]));
            den = std::max(den, std::abs(ref[i]));
        }
        worst = std::max(worst, num / den);
    }
    return {worst <= 1e-12, "max relative deviation from dense DFT = " + fmt(worst) + " (<= 1e-12)"};
}

Outcome trace_check() {
    std::mt19937_64 rng(104);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const int n = 16, nz = 8, modes = 4;
    const double L = 2.0;
    double worst = 0.0;
    std::string gammas;
    for (double d : {1.0, 0.5}) {
        for (int trial = 0; trial < 100; ++trial) {
            SlabField u{n, L, {}, {}};
            for (int k = 0; k <= nz; ++k) u.z.push_back(-d + d * k / nz);
            u.values.assign(u.z.size() * n * n, 0.0);
            for (std::size_t k = 0; k < u.z.size(); ++k)
                for (int b = -modes; b <= modes; ++b)
                    for (int a = -modes; a <= modes; ++a) {
                        const double amp = nd(rng) / (1.0 + a * a + b * b), ph = phase(rng);
                        for (int j = 0; j < n; ++j)
                            for (int i = 0; i < n; ++i)
                                u.values[(k * n + j) * n + i] += amp * std::cos(2.0 * kPi * (a * i + b * j) / n + ph);
                    }
            const auto r = trace_inequality_check(u, trial % 2 ? SlabFace::bottom : SlabFace::top, 0.0);
            worst = std::max(worst, r.ratio);
            if (trial == 0) gammas += (gammas.empty() ? "" : ", ") + fmt(r.value("gamma0"));
        }
    }
    return {worst <= 1.0, "max ratio = " + fmt(worst) + " (<= 1), gamma0 = " + gammas, 10.0};
}

Outcome coercivity_check() {
    const auto pieces = assemble_pieces(build_mesh(rough(8), 4, 4));
    const auto mat = mixed_materials();
    std::mt19937_64 rng(105);
    std::normal_distribution<double> nd;
    double worst = 1e300;
    for (cplx s : {cplx(1.0, 0.0), cplx(1.0, 3.0), cplx(0.3, 10.0)}) {
        const SystemMatrix A(pieces, mat, s);
        for (int trial = 0; trial < 200; ++trial) {
            CVector v(A.size());
            for (auto& x : v) x = {nd(rng), nd(rng)};
            worst = std::min(worst, coercivity_gap(v, A, pieces, mat) / v.squaredNorm());
        }
    }
    return {worst >= -1e-10, "min gap/||v||^2 = " + fmt(worst) + " (>= -1e-10)"};
}

Outcome assembly_oracle_check() {
    const auto surf = rough(2);
    const auto mesh = build_mesh_layers(surf, 1, 1);
    const auto om = oracle::from_surfaces(surf, 1, 1);
    const auto mat = mixed_materials();
    SourceTerm j;
    j.spatial.center = {1.0, 1.0, -0.5};
    j.spatial.radius = {0.9, 0.9, 0.45};
    j.spatial.period = 2.0;
    j.temporal = TemporalProfile::damped_sine(1.0, 2.0);
    double worst_a = 0.0, worst_b = 0.0;
    for (cplx s : {cplx(0.9, 2.1), cplx(1.0, 0.0), cplx(0.3, -4.0)}) {
        const Eigen::MatrixXcd A = assemble_system(mesh, mat, s).to_dense();
        worst_a = std::max(worst_a, oracle::max_rel_entry_error(A, oracle::dense_system(om, mat, s)));
        const Eigen::VectorXcd b = assemble_rhs(mesh, mat, s, j);
        worst_b = std::max(worst_b, oracle::max_rel_entry_error(
                                        b, oracle::dense_rhs(om, mat, s, j.spatial, j.temporal.laplace(s))));
    }
    return {worst_a <= 1e-12 && worst_b <= 1e-12,
            "max entry error matrix = " + fmt(worst_a) + ", rhs = " + fmt(worst_b) + " (<= 1e-12)"};
}

Outcome parseval_check() {
    double worst = 0.0;
    for (double T : {3.0, 4.0, 8.0}) {
        const auto line = LaplaceLine::for_horizon(T);
        std::vector<cplx> F;
        for (int k = 0; k < line.n_s; ++k) F.push_back(1.0 / ((line.s(k) + 1.0) * (line.s(k) + 1.0)));
        // one period of the line, 2 pi / ds = 2T, so the grid covers the whole signal
        const auto times = uniform_times(2.0 * T, 2 * line.n_s + 1);
        std::vector<double> u;
        for (double t : times) u.push_back(t * std::exp(-t));
        worst = std::max(worst, parseval_residual(times, u, F, line));
    }
    return {worst < 1e-6, "max residual over T in {3, 4, 8} = " + fmt(worst) + " (< 1e-6)"};
}

Outcome mms_check() {
    ManufacturedSolution ms;
    ms.s = {2.0, 2.0};
    const auto rep = manufactured_convergence(ms, {4, 8, 16});
    std::string errs;
    for (const auto& l : rep.levels) errs += " " + fmt(l.p_error) + "/" + fmt(l.u_error);
    return {rep.p_order >= 1.8 && rep.u_order >= 1.8,
            "order p = " + fmt(rep.p_order) + ", u = " + fmt(rep.u_order) + " (>= 1.8); errors p/u:" + errs, 300.0};
}

Outcome ratio_spread_check() {
    const auto mesh = build_mesh(rough(4), 2, 4);
    SourceTerm j;
    j.spatial.center = {1.0, 1.0, -0.5};
    j.spatial.radius = {0.6, 0.6, 0.25};
    j.spatial.period = 2.0;
    j.temporal = TemporalProfile::damped_sine(1.0, 2.0);
    const auto setup = ProblemSetup::create(mesh, mixed_materials(), j);
    std::vector<double> rp, ru;
    for (int k = -10; k <= 10; ++k) {
        const cplx s(1.0, 2.0 * k);
        const auto r = s_domain_estimate_report(setup.solve(s), setup.pieces, setup.source_norm(s));
        rp.push_back(r.R_p);
        ru.push_back(r.R_u);
    }
    const double sp = spread_factor(rp), su = spread_factor(ru);
    return {sp < 50.0 && su < 50.0, "spread R_p = " + fmt(sp) + ", R_u = " + fmt(su) + " (< 50)"};
}

std::vector<Outcome> default_run_checks() {
    auto cfg = load_config(config_path("simulate.yaml"));
    cfg.output.directory = scratch("simulate").string();
    std::ostringstream log;
    const auto t0 = std::chrono::steady_clock::now();
    const auto sum = run_simulate(cfg, log);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double tol = cfg.laplace.tolerance;
    const auto& p0 = find_check(sum, "initial", "p0");
    const auto& u0 = find_check(sum, "initial", "u0");
    const auto& du0 = find_check(sum, "initial", "du0");
    const auto& eb = find_check(sum, "energy", "bound_ratio");
    Outcome ic{p0.pass && u0.pass && du0.pass,
               "p0 = " + fmt(p0.measured) + ", u0 = " + fmt(u0.measured) + ", du0 = " + fmt(du0.measured) +
                   " (relative to max over t, < " + fmt(tol) + ")"};
    Outcome energy{eb.pass && secs < 600.0,
                   "max_t E / bound = " + fmt(eb.measured) + " (<= 1.01), N = " + std::to_string(cfg.geometry.n) +
                       ", n_s = " + std::to_string(cfg.laplace.n_s) + ", run " + fmt(secs) + " s (< 600 s)"};
    return {ic, energy};
}

Outcome apriori_check() {
    auto cfg = load_config(config_path("sweep_t.yaml"));
    cfg.output.directory = scratch("sweep_t").string();
    std::ostringstream log;
    const auto sum = run_sweep_t(cfg, {0.5, 1.0, 2.0, 4.0}, log);
    std::string detail;
    for (const char* name : {"p_Linf_L2", "u_Linf_L2", "p_L2_L2", "u_L2_L2"}) {
        const auto& c = find_check(sum, "exponent", name);
        detail += std::string(name) + " " + fmt(c.measured) + " (<= " + fmt(c.limit) + "), ";
    }
    detail += "spread p = " + fmt(find_check(sum, "stability", "pressure_spread").measured) +
              ", u = " + fmt(find_check(sum, "stability", "displacement_spread").measured) + " (< 3)";
    return {sum.pass(), detail, 1800.0};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<Outcome> defaults;
    auto default_run = [&](int k) {
        return [&, k] {
            if (defaults.empty()) defaults = default_run_checks();
            return defaults[k];
        };
    };
    const std::vector<Criterion> criteria{
        {1, "dtn_dissipativity", dtn_dissipation_check},
        {2, "beta_branch", beta_branch_check},
        {3, "dtn_dense_oracle", dtn_oracle_check},
        {4, "trace_inequality", trace_check},
        {5, "coercivity", coercivity_check},
        {6, "assembly_dense_oracle", assembly_oracle_check},
        {7, "parseval", parseval_check},
        {8, "manufactured_convergence", mms_check},
        {9, "s_domain_ratio_spread", ratio_spread_check},
        {10, "initial_conditions", default_run(0)},
        {11, "energy_bound", default_run(1)},
        {12, "apriori_T_scaling", apriori_check},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.time_limit > 0.0 && secs >= o.time_limit) {
            o.pass = false;
            o.detail += "; over time limit " + fmt(o.time_limit) + " s";
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ["
                  << fmt(secs) << " s]" << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}

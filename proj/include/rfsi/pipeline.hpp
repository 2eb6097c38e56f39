#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "rfsi/config.hpp"
#include "rfsi/timedomain.hpp"
#include "rfsi/verify.hpp"

namespace rfsi {

struct RunSummary {
    std::vector<CheckResult> checks;
    std::vector<std::string> files;

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
};

namespace detail {

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, const std::string& header, RunSummary& summary) : out_(path) {
        if (!out_) throw IoError("cannot write " + path.string());
        out_ << header << '\n' << std::setprecision(12);
        summary.files.push_back(path.string());
    }

    template <class... Args>
    void row(const Args&... args) {
        int k = 0;
        ((out_ << (k++ ? "," : "") << args), ...);
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

inline std::string number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

inline std::filesystem::path prepare_output(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.output.directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline void write_metadata(const std::filesystem::path& dir, const RunConfig& cfg, const std::string& command,
                           RunSummary& summary) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "command" << YAML::Value << command;
    e << YAML::Key << "timestamp" << YAML::Value << utc_timestamp();
    e << YAML::Key << "config_file" << YAML::Value << cfg.path;
#ifdef RFSI_USE_UMFPACK
    e << YAML::Key << "factorization" << YAML::Value << "umfpack";
#else
    e << YAML::Key << "factorization" << YAML::Value << "sparselu";
#endif
    e << YAML::Key << "pass" << YAML::Value << summary.pass();
    e << YAML::Key << "config" << YAML::Value << YAML::Load(to_yaml(cfg));
    e << YAML::EndMap;
    const auto path = dir / "metadata.yaml";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << e.c_str() << '\n';
    summary.files.push_back(path.string());
}

inline void write_checks(const std::filesystem::path& path, RunSummary& summary) {
    CsvFile csv(path, "suite,check,measured,relation,limit,pass", summary);
    for (const auto& c : summary.checks) csv.row(c.suite, c.name, c.measured, c.lower ? ">=" : "<=", c.limit, c.pass ? 1 : 0);
}

}  // namespace detail

/// Sweep, reconstruction and energy on the configured line; writes energy.csv,
/// norms.csv, sweep.csv, checks.csv and metadata.yaml.
inline RunSummary run_simulate(const RunConfig& cfg, std::ostream& log) {
    const auto dir = detail::prepare_output(cfg);
    const auto mesh = cfg.mesh();
    const auto setup = cfg.setup(mesh);
    const auto line = cfg.laplace.line();
    const double T = cfg.laplace.T;
    const auto src = validate_source(setup.source, mesh, T);
    log << "simulate: " << mesh.n() << "x" << mesh.n() << "x(" << mesh.fluid.nz << "+" << mesh.solid.nz << "), "
        << setup.pieces.layout.size() << " unknowns, n_s = " << line.n_s << ", T = " << T << '\n';

    const auto sweep = sweep_line(line, setup);
    const auto f = reconstruct_time_fields(sweep, line, uniform_times(T, line.n_s));
    const auto e = energy_series(f, setup.pieces, setup.materials);
    const auto norms = horizon_norms(f, setup.pieces);
    const double dj = setup.source_l2 * setup.source.temporal.derivative_l1(T);
    const auto bound = energy_bound_check(e, f, setup.pieces, setup.materials, dj);
    const auto ic = initial_condition_report(f, setup.pieces, e, cfg.laplace.tolerance);
    const auto comp = compatibility_constants(f, setup.pieces, T);
    const double margin = dtn_sign_margin(line, mesh.n(), mesh.period(), cfg.materials.c);
    double max_residual = 0.0;
    std::vector<SDomainReport> reports;
    for (const auto& s : sweep) {
        max_residual = std::max(max_residual, s.residual);
        reports.push_back(s_domain_estimate_report(s, setup.pieces, setup.source_norm(s.s)));
    }

    RunSummary sum;
    const double tol = cfg.laplace.tolerance;
    sum.checks = {
        make_check("solve", "max_residual", max_residual, cfg.solver.options.tol, false),
        make_check("initial", "p0", ic.p0, tol, false),
        make_check("initial", "dp0", ic.dp0, tol, false),
        make_check("initial", "u0", ic.u0, tol, false),
        make_check("initial", "du0", ic.du0, tol, false),
        make_check("energy", "bound_ratio", bound.ratio, 1.0 + bound.tolerance, false),
        make_check("dtn", "sign_margin", margin, 0.0, true),
        make_check("compatibility", "velocity", comp.velocity, 2.0, false),
        make_check("compatibility", "divergence", comp.divergence, 2.0, false),
        make_check("compatibility", "gradient", comp.gradient, 2.0, false),
    };

    {
        detail::CsvFile csv(dir / "energy.csv", "t,e1,e2,E", sum);
        for (std::size_t i = 0; i < e.t.size(); ++i) csv.row(e.t[i], e.e1[i], e.e2[i], e.total[i]);
    }
    {
        detail::CsvFile csv(dir / "norms.csv", "T,name,value", sum);
        const std::vector<std::pair<const char*, double>> rows{
            {"p_Linf_L2", norms.p_linf},
            {"u_Linf_L2", norms.u_linf},
            {"p_L2_L2", norms.p_l2},
            {"u_L2_L2", norms.u_l2},
            {"pressure_stability", norms.pressure_stability},
            {"displacement_stability", norms.displacement_stability},
            {"dt_j_L1_L2", dj},
            {"max_energy", e.max_total()},
            {"max_ddu_L2", bound.value("max_ddu")},
            {"energy_bound", bound.rhs},
            {"initial_p", ic.p0},
            {"initial_dp", ic.dp0},
            {"initial_u", ic.u0},
            {"initial_du", ic.du0},
            {"initial_energy", ic.energy0},
            {"compatibility_velocity", comp.velocity},
            {"compatibility_divergence", comp.divergence},
            {"compatibility_gradient", comp.gradient},
            {"dtn_sign_margin", margin},
            {"max_residual", max_residual},
            {"source_spatial_L2", src.spatial_l2},
            {"source_support_margin", src.support_margin},
        };
        for (const auto& [name, value] : rows) csv.row(T, name, value);
    }
    write_sweep_log(reports, (dir / "sweep.csv").string());
    sum.files.push_back((dir / "sweep.csv").string());
    detail::write_checks(dir / "checks.csv", sum);
    detail::write_metadata(dir, cfg, "simulate", sum);
    return sum;
}

/// Runs one verification suite, or all of them for "all"; writes verify.csv and metadata.yaml.
inline RunSummary run_verify(const RunConfig& cfg, const std::string& suite, std::ostream& log) {
    const auto& names = verify_suites();
    if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
        throw ConfigError("unknown verify suite '" + suite + "' (all, dtn, trace, coercivity, parseval, mms)");
    const auto dir = detail::prepare_output(cfg);
    RunSummary sum;
    auto wanted = [&](const char* name) { return suite == "all" || suite == name; };
    auto append = [&](std::vector<CheckResult> c) {
        for (const auto& r : c) log << "  " << r.suite << '/' << r.name << " = " << r.measured << (r.pass ? "  ok" : "  FAIL") << '\n';
        sum.checks.insert(sum.checks.end(), c.begin(), c.end());
    };
    const auto& g = cfg.geometry;
    if (wanted("dtn")) append(verify_dtn(g.n, g.period, cfg.materials.c, cfg.verify));
    if (wanted("trace")) append(verify_trace(g.n, g.period, cfg.verify));
    if (wanted("coercivity")) append(verify_coercivity(cfg.mesh(), cfg.materials, cfg.verify));
    if (wanted("parseval")) append(verify_parseval(cfg.verify));
    if (wanted("mms")) append(verify_mms(cfg.materials, cfg.solver.options, cfg.verify));
    detail::write_checks(dir / "verify.csv", sum);
    detail::write_metadata(dir, cfg, "verify " + suite, sum);
    return sum;
}

/// Horizon study with the configured source; writes norms.csv, exponents.csv,
/// checks.csv and metadata.yaml.
inline RunSummary run_sweep_t(const RunConfig& cfg, const std::vector<double>& horizons, std::ostream& log) {
    if (horizons.size() < 3) throw ConfigError("sweep-T needs at least 3 horizons");
    const double t_min = *std::min_element(horizons.begin(), horizons.end());
    const double t_max = *std::max_element(horizons.begin(), horizons.end());
    if (!(t_min > 0.0)) throw ConfigError("horizons must be positive");
    const auto& tp = cfg.source.term.temporal;
    const double v_min = tp.derivative_l1(t_min), v_max = tp.derivative_l1(t_max);
    if (std::abs(v_max - v_min) > 1e-10 * std::max(1.0, v_max))
        throw ConfigError("sweep-T needs a source that is at rest after the shortest horizon (" + detail::number(t_min) +
                          "), so that its derivative norm is the same for every horizon");
    const auto dir = detail::prepare_output(cfg);
    const auto mesh = cfg.mesh();
    const auto setup = cfg.setup(mesh);
    validate_source(setup.source, mesh, t_min);
    log << "sweep-T: " << horizons.size() << " horizons on " << mesh.n() << "x" << mesh.n() << "x(" << mesh.fluid.nz
        << "+" << mesh.solid.nz << ")\n";
    const auto rep = apriori_exponents(horizons, setup, cfg.sweep);

    RunSummary sum;
    for (const auto& h : rep.runs)
        sum.checks.push_back(make_check("solve", "max_residual_T=" + detail::number(h.T), h.max_residual,
                                        cfg.solver.options.tol, false));
    for (const auto& fit : rep.fits) sum.checks.push_back(make_check("exponent", fit.name, fit.slope, fit.bound, false));
    if (!rep.zero_source) {
        sum.checks.push_back(make_check("stability", "pressure_spread", rep.pressure_spread, rep.spread_limit, false));
        sum.checks.push_back(make_check("stability", "displacement_spread", rep.displacement_spread, rep.spread_limit, false));
    }
    {
        detail::CsvFile csv(dir / "norms.csv", "T,name,value", sum);
        for (const auto& h : rep.runs) {
            const std::vector<std::pair<const char*, double>> rows{
                {"n_s", static_cast<double>(h.n_s)},
                {"p_Linf_L2", h.p_linf},
                {"u_Linf_L2", h.u_linf},
                {"p_L2_L2", h.p_l2},
                {"u_L2_L2", h.u_l2},
                {"pressure_stability", h.pressure_stability},
                {"displacement_stability", h.displacement_stability},
                {"dt_j_L1_L2", h.dj_l1_l2},
                {"max_residual", h.max_residual},
            };
            for (const auto& [name, value] : rows) csv.row(h.T, name, value);
        }
    }
    {
        detail::CsvFile csv(dir / "exponents.csv", "name,slope,bound,pass", sum);
        for (const auto& fit : rep.fits) csv.row(fit.name, fit.slope, fit.bound, fit.pass ? 1 : 0);
    }
    for (const auto& fit : rep.fits) log << "  " << fit.name << " slope " << fit.slope << " (bound " << fit.bound << ")\n";
    detail::write_checks(dir / "checks.csv", sum);
    std::string command = "sweep-T --horizons ";
    for (std::size_t k = 0; k < horizons.size(); ++k) command += (k ? "," : "") + detail::number(horizons[k]);
    detail::write_metadata(dir, cfg, command, sum);
    return sum;
}

}  // namespace rfsi

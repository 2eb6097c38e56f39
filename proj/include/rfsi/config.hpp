#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "rfsi/errors.hpp"
#include "rfsi/geometry.hpp"
#include "rfsi/physics.hpp"
#include "rfsi/solve.hpp"
#include "rfsi/spectral.hpp"
#include "rfsi/timedomain.hpp"
#include "rfsi/verify.hpp"

namespace rfsi {

struct GeometryConfig {
    double period = 2.0;
    int n = 16;
    int nz_fluid = 8;
    int nz_solid = 8;
    double h = 1.0;
    SurfaceSpec interface = SurfaceSpec::sinusoid(0.0, 0.1, 1, 0);
    SurfaceSpec bottom = SurfaceSpec::flat(-1.0);
    std::string surfaces_csv;  ///< height field `x,y,f,g`; replaces the presets when set
};

struct SourceConfig {
    SourceTerm term;
    std::string profile_csv;  ///< sampled temporal profile `t,amplitude`, when used
};

struct LaplaceConfig {
    double T = 3.0;
    int n_s = 64;
    std::optional<double> s1, s2_max;
    double tolerance = 1e-4;

    LaplaceLine line() const {
        LaplaceLine l = LaplaceLine::for_horizon(T, n_s);
        if (s1) l.s1 = *s1;
        if (s2_max) l.s2_max = *s2_max;
        l.validate();
        return l;
    }
};

struct SolverConfig {
    SolverOptions options;
    int workers = 1;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats{"csv"};
};

struct RunConfig {
    std::string path;
    std::uint64_t seed = 0;
    GeometryConfig geometry;
    MaterialParams materials;
    SourceConfig source;
    LaplaceConfig laplace;
    SolverConfig solver;
    VerifyOptions verify;
    AprioriOptions sweep;
    OutputConfig output;

    RoughSurfacePair surfaces() const {
        if (!geometry.surfaces_csv.empty()) {
            auto s = load_surfaces_csv(geometry.surfaces_csv, geometry.period, geometry.h);
            if (s.n != geometry.n)
                throw ConfigError("geometry.n = " + std::to_string(geometry.n) + " but " + geometry.surfaces_csv +
                                  " holds a " + std::to_string(s.n) + " x " + std::to_string(s.n) + " grid");
            return s;
        }
        return sample_surfaces(geometry.interface, geometry.bottom, geometry.period, geometry.n, geometry.h);
    }

    MappedMesh mesh() const { return build_mesh(surfaces(), geometry.nz_fluid, geometry.nz_solid); }

    ProblemSetup setup(const MappedMesh& m) const {
        return ProblemSetup::create(m, materials, source.term, solver.options, solver.workers);
    }

    void validate() const {
        materials.validate();
        if (geometry.n < 2) throw ConfigError("geometry.n must be at least 2");
        if (geometry.nz_fluid < 2 || geometry.nz_solid < 2) throw ConfigError("geometry.nz_fluid and nz_solid must be at least 2");
        if (!(geometry.period > 0.0)) throw ConfigError("geometry.period must be positive");
        surfaces();
        if (!(laplace.T > 0.0)) throw ConfigError("laplace.T must be positive");
        if (laplace.n_s < 2 || laplace.n_s % 2 != 0) throw ConfigError("laplace.n_s must be even and at least 2");
        if (!(laplace.tolerance > 0.0)) throw ConfigError("laplace.tolerance must be positive");
        if (laplace.s1 && !(*laplace.s1 > 0.0)) throw ConfigError("laplace.s1 must be positive");
        if (laplace.s2_max && !(*laplace.s2_max > 0.0)) throw ConfigError("laplace.s2_max must be positive");
        if (laplace.line().ds() > kPi / laplace.T * (1.0 + 1e-12))
            throw ConfigError("laplace: sample spacing 2 s2_max / n_s exceeds pi / T, the reconstruction would alias");
        if (!(solver.options.tol > 0.0)) throw ConfigError("solver.tol must be positive");
        if (solver.options.restart < 1 || solver.options.max_iterations < 1)
            throw ConfigError("solver.restart and solver.max_iterations must be positive");
        if (solver.workers < 1) throw ConfigError("solver.workers must be positive");
        if (output.directory.empty()) throw ConfigError("output.directory must not be empty");
        for (const auto& f : output.formats)
            if (f != "csv") throw ConfigError("output.formats: unsupported format '" + f + "' (supported: csv)");
        if (verify.dtn_samples < 1 || verify.trace_fields < 1 || verify.coercivity_vectors < 1)
            throw ConfigError("verify sample counts must be positive");
        if (sweep.min_samples < 2 || !(sweep.s2_max > 0.0)) throw ConfigError("sweep.s2_max and sweep.min_samples must be positive");
    }
};

namespace detail {

inline std::string at_line(const YAML::Node& n) {
    const auto m = n.Mark();
    return m.is_null() ? std::string() : " (line " + std::to_string(m.line + 1) + ")";
}

/// A mapping node whose keys are checked against an allowed set.
class Section {
public:
    Section(const YAML::Node& node, std::string name, const std::set<std::string>& allowed)
        : node_(node), name_(std::move(name)) {
        if (!node_ || node_.IsNull()) return;
        if (!node_.IsMap()) throw ConfigError("section '" + name_ + "' must be a mapping" + at_line(node_));
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) throw ConfigError("unknown key '" + qualified(key) + "'" + at_line(kv.first));
        }
    }

    bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
    YAML::Node child(const std::string& key) const { return has(key) ? node_[key] : YAML::Node(); }
    std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

    template <class T>
    T get(const std::string& key, T fallback) const {
        if (!has(key)) return fallback;
        return convert<T>(node_[key], qualified(key));
    }

    template <class T>
    std::optional<T> optional(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return convert<T>(node_[key], qualified(key));
    }

    template <class T>
    static T convert(const YAML::Node& n, const std::string& key) {
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError("key '" + key + "' has an invalid value" + at_line(n));
        }
    }

private:
    YAML::Node node_;
    std::string name_;
};

inline Vec3 to_vec3(const YAML::Node& n, const std::string& key) {
    const auto v = Section::convert<std::vector<double>>(n, key);
    if (v.size() != 3) throw ConfigError("key '" + key + "' needs three numbers" + at_line(n));
    return {v[0], v[1], v[2]};
}

inline cplx to_complex(const YAML::Node& n, const std::string& key) {
    const auto v = Section::convert<std::vector<double>>(n, key);
    if (v.size() != 2) throw ConfigError("key '" + key + "' needs [re, im]" + at_line(n));
    return {v[0], v[1]};
}

inline int mode_of(double period, double wavelength, const std::string& key) {
    if (!(wavelength > 0.0)) throw ConfigError("key '" + key + "' must be positive");
    const double m = period / wavelength;
    if (std::abs(m - std::round(m)) > 1e-9)
        throw ConfigError("key '" + key + "' must divide geometry.period into a whole number of periods");
    return static_cast<int>(std::round(m));
}

inline SurfaceSpec parse_surface(const YAML::Node& node, const std::string& name, double period, SurfaceSpec fallback) {
    if (!node || node.IsNull()) return fallback;
    const Section head(node, name, {"preset", "offset", "amplitude", "wavelength", "axis", "phase", "terms"});
    const auto preset = head.get<std::string>("preset", "flat");
    SurfaceSpec s;
    s.offset = head.get("offset", 0.0);
    auto reject = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (head.has(k))
                throw ConfigError("key '" + head.qualified(k) + "' does not apply to preset " + preset + at_line(head.child(k)));
    };
    if (preset == "flat") {
        reject({"amplitude", "wavelength", "axis", "phase", "terms"});
    } else if (preset == "sinusoid") {
        reject({"terms"});
        SinusoidTerm t;
        t.amplitude = head.get("amplitude", 0.0);
        const int m = mode_of(period, head.get("wavelength", period), head.qualified("wavelength"));
        const auto axis = head.get<std::string>("axis", "x");
        if (axis == "x") {
            t.mode_x = m;
            t.mode_y = 0;
        } else if (axis == "y") {
            t.mode_x = 0;
            t.mode_y = m;
        } else {
            throw ConfigError("key '" + head.qualified("axis") + "' must be x or y" + at_line(head.child("axis")));
        }
        t.phase = head.get("phase", 0.0);
        s.terms.push_back(t);
    } else if (preset == "sum") {
        reject({"amplitude", "wavelength", "axis", "phase"});
        const auto list = head.child("terms");
        if (list && !list.IsSequence()) throw ConfigError("key '" + head.qualified("terms") + "' must be a list" + at_line(list));
        for (std::size_t k = 0; list && k < list.size(); ++k) {
            const Section term(list[k], head.qualified("terms") + "[" + std::to_string(k) + "]",
                               {"amplitude", "mode_x", "mode_y", "phase"});
            s.terms.push_back({term.get("amplitude", 0.0), term.get("mode_x", 0), term.get("mode_y", 0), term.get("phase", 0.0)});
        }
    } else {
        throw ConfigError("key '" + head.qualified("preset") + "': unknown surface preset '" + preset +
                          "' (flat, sinusoid, sum)" + at_line(head.child("preset")));
    }
    return s;
}

inline std::string resolve(const std::string& base, const std::string& file) {
    const std::filesystem::path p(file);
    if (p.is_absolute() || base.empty()) return file;
    return (std::filesystem::path(base).parent_path() / p).string();
}

inline TemporalProfile parse_temporal(const Section& t, SourceConfig& src, const std::string& path) {
    const auto profile = t.get<std::string>("profile", "damped_sine");
    std::set<std::string> used{"profile"};
    TemporalProfile out;
    if (profile == "zero") {
        out = TemporalProfile::zero();
    } else if (profile == "power_exp") {
        out = TemporalProfile::power_exp(t.get("power", 1), t.get("rate", 1.0));
        used.insert({"power", "rate"});
    } else if (profile == "sine") {
        out = TemporalProfile::sine(t.get("omega", 1.0));
        used.insert("omega");
    } else if (profile == "cosine") {
        out = TemporalProfile::cosine(t.get("omega", 1.0));
        used.insert("omega");
    } else if (profile == "damped_sine") {
        out = TemporalProfile::damped_sine(t.get("rate", 1.0), t.get("omega", 2.0));
        used.insert({"rate", "omega"});
    } else if (profile == "pulse") {
        const double d = t.get("duration", 1.0);
        if (!(d > 0.0)) throw ConfigError("key '" + t.qualified("duration") + "' must be positive");
        out = TemporalProfile::pulse(d);
        used.insert("duration");
    } else if (profile == "csv") {
        if (!t.has("path")) throw ConfigError("key '" + t.qualified("path") + "' is required for profile csv");
        src.profile_csv = resolve(path, t.get<std::string>("path", ""));
        out = load_profile_csv(src.profile_csv);
        used.insert("path");
    } else {
        throw ConfigError("key '" + t.qualified("profile") + "': unknown temporal profile '" + profile +
                          "' (zero, power_exp, sine, cosine, damped_sine, pulse, csv)" + at_line(t.child("profile")));
    }
    for (const char* k : {"power", "rate", "omega", "duration", "path"})
        if (t.has(k) && !used.count(k))
            throw ConfigError("key '" + t.qualified(k) + "' does not apply to profile " + profile + at_line(t.child(k)));
    return out;
}

}  // namespace detail

/// Parses a YAML run configuration. `path` locates relative input files.
inline RunConfig parse_config(const std::string& text, const std::string& path = "") {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError((path.empty() ? std::string("config") : path) + ":" + std::to_string(e.mark.line + 1) + ":" +
                          std::to_string(e.mark.column + 1) + ": parse error: " + e.msg);
    }
    using detail::Section;
    const Section top(root, "", {"seed", "geometry", "materials", "source", "laplace", "solver", "verify", "sweep", "output"});
    RunConfig cfg;
    cfg.path = path;
    cfg.seed = top.get<std::uint64_t>("seed", 0);

    const Section g(top.child("geometry"), "geometry",
                    {"period", "n", "nz_fluid", "nz_solid", "h", "interface", "bottom", "surfaces_csv"});
    auto& geo = cfg.geometry;
    geo.period = g.get("period", geo.period);
    geo.n = g.get("n", geo.n);
    geo.nz_fluid = g.get("nz_fluid", geo.nz_fluid);
    geo.nz_solid = g.get("nz_solid", geo.nz_solid);
    geo.h = g.get("h", geo.h);
    if (g.has("surfaces_csv")) {
        if (g.has("interface") || g.has("bottom"))
            throw ConfigError("geometry.surfaces_csv cannot be combined with geometry.interface or geometry.bottom");
        geo.surfaces_csv = detail::resolve(path, g.get<std::string>("surfaces_csv", ""));
    }
    geo.interface = detail::parse_surface(g.child("interface"), "geometry.interface", geo.period, geo.interface);
    geo.bottom = detail::parse_surface(g.child("bottom"), "geometry.bottom", geo.period, geo.bottom);

    const Section m(top.child("materials"), "materials", {"rho1", "c", "rho2", "mu", "lambda"});
    auto& mat = cfg.materials;
    mat.rho1 = m.get("rho1", mat.rho1);
    mat.c = m.get("c", mat.c);
    mat.rho2 = m.get("rho2", mat.rho2);
    mat.mu = m.get("mu", mat.mu);
    mat.lambda = m.get("lambda", mat.lambda);

    const Section s(top.child("source"), "source", {"temporal", "spatial"});
    const Section st(s.child("temporal"), "source.temporal", {"profile", "power", "rate", "omega", "duration", "path"});
    auto& j = cfg.source.term;
    j.temporal = detail::parse_temporal(st, cfg.source, path);
    const Section sp(s.child("spatial"), "source.spatial", {"center", "radius", "direction", "amplitude"});
    j.spatial.center = {0.5 * geo.period, 0.5 * geo.period, -0.5};
    j.spatial.radius = {0.3 * geo.period, 0.3 * geo.period, 0.25};
    if (sp.has("center")) j.spatial.center = detail::to_vec3(sp.child("center"), "source.spatial.center");
    if (sp.has("radius")) j.spatial.radius = detail::to_vec3(sp.child("radius"), "source.spatial.radius");
    if (sp.has("direction")) j.spatial.direction = detail::to_vec3(sp.child("direction"), "source.spatial.direction");
    j.spatial.amplitude = sp.get("amplitude", 1.0);
    j.spatial.period = geo.period;

    const Section l(top.child("laplace"), "laplace", {"T", "n_s", "s1", "s2_max", "tolerance"});
    cfg.laplace.T = l.get("T", cfg.laplace.T);
    cfg.laplace.n_s = l.get("n_s", cfg.laplace.n_s);
    cfg.laplace.s1 = l.optional<double>("s1");
    cfg.laplace.s2_max = l.optional<double>("s2_max");
    cfg.laplace.tolerance = l.get("tolerance", cfg.laplace.tolerance);

    const Section so(top.child("solver"), "solver", {"tol", "restart", "max_iterations", "workers"});
    cfg.solver.options.tol = so.get("tol", cfg.solver.options.tol);
    cfg.solver.options.restart = so.get("restart", cfg.solver.options.restart);
    cfg.solver.options.max_iterations = so.get("max_iterations", cfg.solver.options.max_iterations);
    cfg.solver.workers = so.get("workers", cfg.solver.workers);

    const Section v(top.child("verify"), "verify",
                    {"dtn_samples", "trace_fields", "coercivity_vectors", "coercivity_s", "parseval_T", "mms_sizes",
                     "mms_s", "mms_order"});
    auto& vo = cfg.verify;
    vo.seed = cfg.seed;
    vo.dtn_samples = v.get("dtn_samples", vo.dtn_samples);
    vo.trace_fields = v.get("trace_fields", vo.trace_fields);
    vo.coercivity_vectors = v.get("coercivity_vectors", vo.coercivity_vectors);
    if (v.has("coercivity_s")) {
        const auto list = v.child("coercivity_s");
        if (!list.IsSequence()) throw ConfigError("key 'verify.coercivity_s' must be a list" + detail::at_line(list));
        vo.coercivity_s.clear();
        for (std::size_t k = 0; k < list.size(); ++k) vo.coercivity_s.push_back(detail::to_complex(list[k], "verify.coercivity_s"));
    }
    vo.parseval_T = v.get("parseval_T", vo.parseval_T);
    vo.mms_sizes = v.get("mms_sizes", vo.mms_sizes);
    if (v.has("mms_s")) vo.mms_s = detail::to_complex(v.child("mms_s"), "verify.mms_s");
    vo.mms_order = v.get("mms_order", vo.mms_order);

    const Section w(top.child("sweep"), "sweep", {"s2_max", "min_samples", "slope_slack", "spread_limit"});
    cfg.sweep.s2_max = w.get("s2_max", cfg.sweep.s2_max);
    cfg.sweep.min_samples = w.get("min_samples", cfg.sweep.min_samples);
    cfg.sweep.slope_slack = w.get("slope_slack", cfg.sweep.slope_slack);
    cfg.sweep.spread_limit = w.get("spread_limit", cfg.sweep.spread_limit);

    const Section o(top.child("output"), "output", {"directory", "formats"});
    cfg.output.directory = o.get("directory", cfg.output.directory);
    cfg.output.formats = o.get("formats", cfg.output.formats);

    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

namespace detail {

inline void emit_surface(YAML::Emitter& e, const SurfaceSpec& s) {
    e << YAML::BeginMap << YAML::Key << "preset" << YAML::Value << "sum" << YAML::Key << "offset" << YAML::Value << s.offset;
    e << YAML::Key << "terms" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : s.terms) {
        e << YAML::Flow << YAML::BeginMap << YAML::Key << "amplitude" << YAML::Value << t.amplitude << YAML::Key << "mode_x"
          << YAML::Value << t.mode_x << YAML::Key << "mode_y" << YAML::Value << t.mode_y << YAML::Key << "phase"
          << YAML::Value << t.phase << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
}

inline void emit_vec3(YAML::Emitter& e, const char* key, const Vec3& v) {
    e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << v[0] << v[1] << v[2] << YAML::EndSeq;
}

inline const char* profile_name(TemporalKind k) {
    switch (k) {
        case TemporalKind::zero: return "zero";
        case TemporalKind::power_exp: return "power_exp";
        case TemporalKind::sine: return "sine";
        case TemporalKind::cosine: return "cosine";
        case TemporalKind::damped_sine: return "damped_sine";
        case TemporalKind::pulse: return "pulse";
        case TemporalKind::sampled: return "csv";
    }
    return "zero";
}

}  // namespace detail

/// The fully resolved configuration, loadable by parse_config.
inline std::string to_yaml(const RunConfig& cfg) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "seed" << YAML::Value << cfg.seed;

    const auto& g = cfg.geometry;
    e << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "period" << YAML::Value << g.period << YAML::Key << "n" << YAML::Value << g.n;
    e << YAML::Key << "nz_fluid" << YAML::Value << g.nz_fluid << YAML::Key << "nz_solid" << YAML::Value << g.nz_solid;
    e << YAML::Key << "h" << YAML::Value << g.h;
    if (!g.surfaces_csv.empty()) {
        e << YAML::Key << "surfaces_csv" << YAML::Value << std::filesystem::absolute(g.surfaces_csv).string();
    } else {
        e << YAML::Key << "interface" << YAML::Value;
        detail::emit_surface(e, g.interface);
        e << YAML::Key << "bottom" << YAML::Value;
        detail::emit_surface(e, g.bottom);
    }
    e << YAML::EndMap;

    const auto& m = cfg.materials;
    e << YAML::Key << "materials" << YAML::Value << YAML::BeginMap << YAML::Key << "rho1" << YAML::Value << m.rho1
      << YAML::Key << "c" << YAML::Value << m.c << YAML::Key << "rho2" << YAML::Value << m.rho2 << YAML::Key << "mu"
      << YAML::Value << m.mu << YAML::Key << "lambda" << YAML::Value << m.lambda << YAML::EndMap;

    const auto& j = cfg.source.term;
    e << YAML::Key << "source" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "temporal" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "profile" << YAML::Value << detail::profile_name(j.temporal.kind);
    switch (j.temporal.kind) {
        case TemporalKind::power_exp:
            e << YAML::Key << "power" << YAML::Value << j.temporal.power << YAML::Key << "rate" << YAML::Value << j.temporal.rate;
            break;
        case TemporalKind::sine:
        case TemporalKind::cosine: e << YAML::Key << "omega" << YAML::Value << j.temporal.omega; break;
        case TemporalKind::damped_sine:
            e << YAML::Key << "rate" << YAML::Value << j.temporal.rate << YAML::Key << "omega" << YAML::Value << j.temporal.omega;
            break;
        case TemporalKind::pulse: e << YAML::Key << "duration" << YAML::Value << j.temporal.duration; break;
        case TemporalKind::sampled:
            e << YAML::Key << "path" << YAML::Value << std::filesystem::absolute(cfg.source.profile_csv).string();
            break;
        case TemporalKind::zero: break;
    }
    e << YAML::EndMap;
    e << YAML::Key << "spatial" << YAML::Value << YAML::BeginMap;
    detail::emit_vec3(e, "center", j.spatial.center);
    detail::emit_vec3(e, "radius", j.spatial.radius);
    detail::emit_vec3(e, "direction", j.spatial.direction);
    e << YAML::Key << "amplitude" << YAML::Value << j.spatial.amplitude << YAML::EndMap << YAML::EndMap;

    const auto line = cfg.laplace.line();
    e << YAML::Key << "laplace" << YAML::Value << YAML::BeginMap << YAML::Key << "T" << YAML::Value << cfg.laplace.T
      << YAML::Key << "n_s" << YAML::Value << line.n_s << YAML::Key << "s1" << YAML::Value << line.s1 << YAML::Key
      << "s2_max" << YAML::Value << line.s2_max << YAML::Key << "tolerance" << YAML::Value << cfg.laplace.tolerance
      << YAML::EndMap;

    const auto& so = cfg.solver;
    e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap << YAML::Key << "tol" << YAML::Value << so.options.tol
      << YAML::Key << "restart" << YAML::Value << so.options.restart << YAML::Key << "max_iterations" << YAML::Value
      << so.options.max_iterations << YAML::Key << "workers" << YAML::Value << so.workers << YAML::EndMap;

    const auto& v = cfg.verify;
    e << YAML::Key << "verify" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "dtn_samples" << YAML::Value << v.dtn_samples << YAML::Key << "trace_fields" << YAML::Value
      << v.trace_fields << YAML::Key << "coercivity_vectors" << YAML::Value << v.coercivity_vectors;
    e << YAML::Key << "coercivity_s" << YAML::Value << YAML::BeginSeq;
    for (cplx s : v.coercivity_s) e << YAML::Flow << YAML::BeginSeq << s.real() << s.imag() << YAML::EndSeq;
    e << YAML::EndSeq;
    e << YAML::Key << "parseval_T" << YAML::Value << v.parseval_T;
    e << YAML::Key << "mms_sizes" << YAML::Value << YAML::Flow << v.mms_sizes;
    e << YAML::Key << "mms_s" << YAML::Value << YAML::Flow << YAML::BeginSeq << v.mms_s.real() << v.mms_s.imag() << YAML::EndSeq;
    e << YAML::Key << "mms_order" << YAML::Value << v.mms_order << YAML::EndMap;

    const auto& w = cfg.sweep;
    e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap << YAML::Key << "s2_max" << YAML::Value << w.s2_max
      << YAML::Key << "min_samples" << YAML::Value << w.min_samples << YAML::Key << "slope_slack" << YAML::Value
      << w.slope_slack << YAML::Key << "spread_limit" << YAML::Value << w.spread_limit << YAML::EndMap;

    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "directory" << YAML::Value
      << cfg.output.directory << YAML::Key << "formats" << YAML::Value << YAML::Flow << cfg.output.formats << YAML::EndMap;
    e << YAML::EndMap;
    return e.c_str();
}

}  // namespace rfsi

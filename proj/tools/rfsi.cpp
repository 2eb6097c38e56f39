#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rfsi/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kChecksFailed = 1, kError = 2 };

int report(const rfsi::RunSummary& sum) {
    for (const auto& c : sum.checks)
        if (!c.pass)
            std::cerr << "FAIL " << c.suite << '/' << c.name << ": " << c.measured << (c.lower ? " < " : " > ") << c.limit
                      << '\n';
    for (const auto& f : sum.files) std::cout << f << '\n';
    const bool ok = sum.pass();
    std::cerr << (ok ? "all checks passed" : "some checks failed") << '\n';
    return ok ? kOk : kChecksFailed;
}

rfsi::RunConfig load(const std::string& path, const std::string& output) {
    auto cfg = rfsi::load_config(path);
    if (!output.empty()) cfg.output.directory = output;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laplace-domain solver for acoustic waves over a rough elastic interface"};
    app.require_subcommand(1);
    std::string config, output, suite = "all";
    std::vector<double> horizons;

    auto* simulate = app.add_subcommand("simulate", "sweep, reconstruct and check the energy of one run");
    simulate->add_option("--config", config, "run configuration (YAML)")->required();
    simulate->add_option("--output", output, "output directory (overrides output.directory)");

    auto* verify = app.add_subcommand("verify", "run the property suites");
    verify->add_option("--config", config, "run configuration (YAML)")->required();
    verify->add_option("--suite", suite, "all, dtn, trace, coercivity, parseval or mms")->capture_default_str();
    verify->add_option("--output", output, "output directory (overrides output.directory)");

    auto* sweep = app.add_subcommand("sweep-T", "fit norm growth over several horizons");
    sweep->add_option("--config", config, "run configuration (YAML)")->required();
    sweep->add_option("--horizons", horizons, "comma separated horizons, e.g. 0.5,1,2,4")->delimiter(',')->required();
    sweep->add_option("--output", output, "output directory (overrides output.directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const auto cfg = load(config, output);
        if (*simulate) return report(rfsi::run_simulate(cfg, std::cerr));
        if (*verify) return report(rfsi::run_verify(cfg, suite, std::cerr));
        return report(rfsi::run_sweep_t(cfg, horizons, std::cerr));
    } catch (const rfsi::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
    } catch (const rfsi::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
    } catch (const rfsi::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
    } catch (const rfsi::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kError;
}

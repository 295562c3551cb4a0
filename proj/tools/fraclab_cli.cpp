// fraclab: experiment drivers for fractional perimeters and Allen-Cahn energies.
//
//   fraclab sweep-eps --config cfg.ini --out results --format csv --jobs 4
//   fraclab counterexample classical --config cfg.ini
//
// Exit status: 0 when every verdict passes, 2 when a verdict fails, 1 on error.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "fraclab/lab/experiments.hpp"

namespace {

struct Common {
    std::string config;
    std::string out = ".";
    std::string format = "csv";
    int jobs = 0;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--jobs", c.jobs, "concurrent sweep points (overrides run.jobs)")->check(CLI::PositiveNumber);
}

int run(const std::string& experiment, const Common& c) {
    using namespace fraclab::lab;
    ExperimentConfig cfg = load_config(c.config);
    if (!cfg.experiment.empty() && cfg.experiment != experiment)
        throw ConfigError("config kind '" + cfg.experiment + "' does not match subcommand '" + experiment + "'");
    if (cfg.name.empty() || cfg.name == cfg.experiment) cfg.name = experiment;
    cfg.experiment = experiment;
    if (c.jobs > 0) cfg.jobs = c.jobs;
    const SweepReport rep = run_experiment(cfg);
    for (const auto& path : emit(rep, c.format, c.out)) std::printf("wrote %s\n", path.c_str());
    for (const auto& v : rep.verdicts)
        std::printf("%-28s %s  value=%.6g  tol=%.3g  %s\n", v.name.c_str(), v.pass ? "PASS" : "FAIL", v.value, v.tolerance, v.detail.c_str());
    return rep.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclab: fractional perimeter and Allen-Cahn experiments"};
    app.require_subcommand(1);
    Common common;
    std::string selected;
    auto plain = [&](const char* name, const char* help) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(cmd, common);
        cmd->callback([&selected, name] { selected = name; });
    };
    plain("sweep-s", "Massari minimizers along s -> 1/2");
    plain("sweep-eps", "mass-constrained Allen-Cahn minimizers along eps -> 0");
    plain("neumann-check", "exterior values against the Neumann extension");
    plain("curvature-check", "hybrid mean curvature constancy of the limit couple");
    plain("minimize", "single mass-constrained minimization at the first eps");
    CLI::App* counter = app.add_subcommand("counterexample", "non-existence and uniqueness counterexamples");
    std::string which;
    counter->add_option("which", which, "classical or fractional")->required()->check(CLI::IsMember({"classical", "fractional"}));
    add_common(counter, common);
    counter->callback([&] { selected = "counterexample-" + which; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        return run(selected, common);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

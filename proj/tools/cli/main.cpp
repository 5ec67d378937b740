// Experiment runner: one subcommand per verification suite.
//
//   grushin_cli lemmas --n-grid default
//   grushin_cli volumes --n 1 --x 0 --samples 1e6 --seed 7 --out reports
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or
// configuration errors.

#include "../experiments/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using grushin::experiments::ExperimentConfig;
using grushin::experiments::json;

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> format;
    std::vector<int> dims;
    std::optional<double> x;
    std::optional<double> samples;
    std::optional<double> pairs;
    std::optional<std::string> n_grid;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file");
    sub->add_option("--out", f.out, "Directory for report files");
    sub->add_option("--seed", f.seed, "RNG seed");
    sub->add_option("--jobs", f.jobs, "Worker threads (0: all cores)");
    sub->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--n", f.dims, "Dimensions (repeatable)");
    sub->add_option("--x", f.x, "|x| of the ball center (volumes)");
    sub->add_option("--samples", f.samples, "Monte Carlo samples");
    sub->add_option("--pairs", f.pairs, "Random pairs per dimension (distances)");
    sub->add_option("--n-grid", f.n_grid, "Grid preset: default or coarse");
}

ExperimentConfig build(const std::string& command, const Flags& f) {
    ExperimentConfig c;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw grushin::ConfigError("cannot open config " + f.config);
        json j;
        try {
            j = json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw grushin::ConfigError(std::string("config parse error: ") + e.what());
        }
        c = ExperimentConfig::from_json(j);
    }
    c.command = command;
    if (!f.out.empty()) c.out_dir = f.out;
    if (f.seed) c.seed = *f.seed;
    if (f.jobs) c.jobs = *f.jobs;
    if (f.format) c.format = *f.format;
    if (!f.dims.empty()) c.dims = f.dims;
    if (f.x) c.xnorm = *f.x;
    if (f.samples) c.samples = static_cast<std::int64_t>(*f.samples);
    if (f.pairs) c.pairs = static_cast<std::int64_t>(*f.pairs);
    if (f.n_grid) c.n_grid = *f.n_grid;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grushin operator verification suites"};
    app.require_subcommand(1);
    Flags flags;
    for (const char* name : {"distances", "lemmas", "volumes", "kernels", "maximal", "all"}) {
        auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " suite");
        add_common(sub, flags);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto cfg = build(app.get_subcommands().front()->get_name(), flags);
        const auto reports = grushin::experiments::run(cfg);
        bool ok = true;
        for (const auto& r : reports) {
            for (const auto& c : r.checks)
                std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << r.suite << "/" << c.name << ": " << c.detail << "\n";
            if (!cfg.out_dir.empty()) grushin::experiments::write_report(r, cfg.out_dir, cfg.format);
            ok = ok && r.passed();
        }
        std::cout << (ok ? "all checks passed" : "some checks failed") << std::endl;
        return ok ? 0 : 1;
    } catch (const grushin::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const grushin::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

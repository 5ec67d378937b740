#pragma once

#include <grushin/geometry.hpp>
#include <grushin/numerics.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace grushin::experiments {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Thresholds that the suites assert. Each was fixed from a desk run and is
// documented next to its use in experiments.cpp.
struct Thresholds {
    double cc_over_k_volume = 0.5;     // |B_CC| >= c |B_K|
    double green_A1 = 6.283185307179586 * (1.0 + 1e-9);  // ratio in [1/A1, A1]
    double ef1_floor = 0.01;
    double asymptotic_rel_err = 0.2;
    double composition_max = 1.05;
    double hds_bound = 100.0;          // max ratio over samples
    double hds_spread = 3.0;           // max over n / min over n
    double dcc_dk_spread = 2.0;        // sup d_CC/d_K: max over n / min over n
};

struct ExperimentConfig {
    std::string command = "all";
    std::vector<int> dims;                // empty: each suite's default list
    std::uint64_t seed = 7;
    int jobs = 1;
    std::int64_t samples = 1'000'000;     // Monte Carlo draws per volume
    std::int64_t pairs = 100'000;         // random pairs per dimension
    std::string n_grid = "default";       // default | coarse
    std::optional<double> xnorm;          // restricts the volume matrix to this |x|
    std::string out_dir;
    std::string format = "json";          // json | csv
    double quad_rel_tol = 1e-10;
    int quad_max_refinements = 2000;
    Thresholds thresholds;

    // Reads the keys this struct holds; unknown keys are a ConfigError.
    static ExperimentConfig from_json(const json& j);
    void validate() const;
    json to_json() const;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

struct Report {
    std::string suite;
    json config = json::object();  // the configuration the suite ran with
    json summary = json::object();
    std::vector<Check> checks;
    Table table;

    bool passed() const;
    const Check* find(const std::string& name) const;
    json to_json() const;
    std::string table_csv() const;
    std::string checks_csv() const;
};

Report run_distances(const ExperimentConfig& cfg);
Report run_lemmas(const ExperimentConfig& cfg);
Report run_volumes(const ExperimentConfig& cfg);
Report run_kernels(const ExperimentConfig& cfg);
Report run_maximal(const ExperimentConfig& cfg);

// Runs cfg.command ("all" runs every suite in the order above).
std::vector<Report> run(const ExperimentConfig& cfg);

// Random pair used by the sweeps: scales of x, x' and u - u' are drawn
// log-uniformly, with a share of nearly antipodal and nearly equal x'.
std::pair<Point, Point> random_pair(int n, Rng& rng);

// Writes <out>/<suite>.json, or <out>/<suite>.csv and <out>/<suite>_checks.csv.
void write_report(const Report& r, const std::string& out_dir, const std::string& format);

}  // namespace grushin::experiments

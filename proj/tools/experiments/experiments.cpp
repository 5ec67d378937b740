#include "experiments.hpp"

#include <grushin/balls.hpp>
#include <grushin/kernels.hpp>
#include <grushin/lemmas.hpp>
#include <grushin/maximal.hpp>
#include <grushin/mu.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace grushin::experiments {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

void add(Report& r, std::string name, bool ok, std::string detail) {
    r.checks.push_back({std::move(name), ok, std::move(detail)});
}

std::vector<int> dims_or(const ExperimentConfig& cfg, std::vector<int> fallback) {
    return cfg.dims.empty() ? fallback : cfg.dims;
}

std::vector<double> random_vec(int n, double scale, Rng& rng) {
    std::vector<double> v(n);
    const double k = scale / std::sqrt(static_cast<double>(n));
    for (auto& c : v) c = rng.normal() * k;
    return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min()); }

Point on_axis(int n, double xnorm, double u = 0.0) {
    std::vector<double> x(n, 0.0);
    x[0] = xnorm;
    return {x, u};
}

KernelConfig kcfg(const ExperimentConfig& cfg, int n) {
    auto k = kernel_config(n);
    k.quad.rel_tol = cfg.quad_rel_tol;
    k.quad.max_refinements = cfg.quad_max_refinements;
    return k;
}

}  // namespace

// ------------------------------------------------------------------ config

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig c;
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const auto& k = it.key();
            const auto& v = it.value();
            if (k == "command") c.command = v.get<std::string>();
            else if (k == "dims") c.dims = v.get<std::vector<int>>();
            else if (k == "seed") c.seed = v.get<std::uint64_t>();
            else if (k == "jobs") c.jobs = v.get<int>();
            else if (k == "samples") c.samples = static_cast<std::int64_t>(v.get<double>());
            else if (k == "pairs") c.pairs = static_cast<std::int64_t>(v.get<double>());
            else if (k == "n_grid") c.n_grid = v.get<std::string>();
            else if (k == "x") c.xnorm = v.get<double>();
            else if (k == "out") c.out_dir = v.get<std::string>();
            else if (k == "format") c.format = v.get<std::string>();
            else if (k == "quad_rel_tol") c.quad_rel_tol = v.get<double>();
            else if (k == "quad_max_refinements") c.quad_max_refinements = v.get<int>();
            else if (k == "schema_version") {
                if (v.get<int>() != kSchemaVersion) throw ConfigError("config: unsupported schema_version");
            } else throw ConfigError("config: unknown key '" + k + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> commands{"distances", "lemmas", "volumes", "kernels", "maximal", "all"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
        throw ConfigError("config: unknown command '" + command + "'");
    for (int n : dims)
        if (n < 1) throw ConfigError("config: dimensions must be >= 1");
    if (jobs < 0) throw ConfigError("config: jobs must be >= 0");
    if (samples < 1000) throw ConfigError("config: samples must be >= 1000");
    if (pairs < 1) throw ConfigError("config: pairs must be >= 1");
    if (n_grid != "default" && n_grid != "coarse") throw ConfigError("config: n_grid must be default or coarse");
    if (xnorm && !(*xnorm >= 0.0)) throw ConfigError("config: x must be >= 0");
    if (format != "json" && format != "csv") throw ConfigError("config: format must be json or csv");
    if (!(quad_rel_tol > 0.0) || quad_max_refinements < 1) throw ConfigError("config: bad quadrature overrides");
}

json ExperimentConfig::to_json() const {
    json j;
    j["command"] = command;
    j["dims"] = dims;
    j["seed"] = seed;
    j["samples"] = samples;
    j["pairs"] = pairs;
    j["n_grid"] = n_grid;
    if (xnorm) j["x"] = *xnorm;
    j["quad_rel_tol"] = quad_rel_tol;
    j["quad_max_refinements"] = quad_max_refinements;
    return j;
}

// ------------------------------------------------------------------ report

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* Report::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

json Report::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["suite"] = suite;
    j["passed"] = passed();
    j["config"] = config;
    j["summary"] = summary;
    j["checks"] = json::array();
    for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["columns"] = table.columns;
    j["rows"] = json::array();
    for (const auto& row : table.rows) j["rows"].push_back(row);
    return j;
}

namespace {

std::string csv_cell(const json& v) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    return v.dump();
}

}  // namespace

std::string Report::table_csv() const {
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << " suite=" << suite << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << "\n";
    }
    return os.str();
}

std::string Report::checks_csv() const {
    std::ostringstream os;
    os << "suite,check,passed,detail\n";
    for (const auto& c : checks)
        os << suite << "," << csv_cell(c.name) << "," << (c.passed ? "true" : "false") << "," << csv_cell(c.detail)
           << "\n";
    return os.str();
}

void write_report(const Report& r, const std::string& out_dir, const std::string& format) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto put = [](const fs::path& p, const std::string& text) {
        std::ofstream f(p);
        if (!f) throw ConfigError("cannot write " + p.string());
        f << text;
    };
    if (format == "csv") {
        put(fs::path(out_dir) / (r.suite + ".csv"), r.table_csv());
        put(fs::path(out_dir) / (r.suite + "_checks.csv"), r.checks_csv());
    } else {
        put(fs::path(out_dir) / (r.suite + ".json"), r.to_json().dump(2) + "\n");
    }
}

std::pair<Point, Point> random_pair(int n, Rng& rng) {
    const double sx = std::exp(rng.uniform(-3.0, 1.0));
    auto x = random_vec(n, sx, rng);
    std::vector<double> xp;
    const double mode = rng.uniform();
    if (mode < 0.15) {
        xp = x;
        const double eps = std::exp(rng.uniform(-30.0, -2.0)) * sx;
        for (auto& c : xp) c = -c + eps * rng.normal();
    } else if (mode < 0.25) {
        xp = x;
        const double eps = std::exp(rng.uniform(-20.0, -2.0)) * sx;
        for (auto& c : xp) c += eps * rng.normal();
    } else if (mode < 0.3) {
        xp.assign(n, 0.0);
    } else {
        xp = random_vec(n, std::exp(rng.uniform(-3.0, 1.0)), rng);
    }
    const double u = rng.normal();
    double s = std::exp(rng.uniform(-6.0, 3.0));
    if (rng.uniform() < 0.05 && norm2(x) + norm2(xp) > 0.0) s = 0.0;
    if (s == 0.0 && x == xp) s = 1.0;
    const double up = rng.uniform() < 0.5 ? u + s : u - s;
    return {Point(x, u), Point(xp, up)};
}

// ------------------------------------------------------------------ distances

Report run_distances(const ExperimentConfig& cfg) {
    Report rep;
    rep.suite = "distances";
    rep.table.columns = {"n", "pairs", "max_dK_minus_dCC", "violations", "sup_dCC_over_dK", "triangle_max_ratio"};
    double sup_lo = std::numeric_limits<double>::infinity();
    double sup_hi = 0.0;
    long total_viol = 0;
    double worst_viol = -std::numeric_limits<double>::infinity();
    double worst_euclid = 0.0;
    double worst_seam = 0.0;
    double worst_homog = 0.0;

    for (int n : dims_or(cfg, {1, 2, 3, 5, 10})) {
        Rng rng(cfg.seed, 1000 + static_cast<std::uint64_t>(n));
        long viol = 0;
        double maxv = -std::numeric_limits<double>::infinity();
        double sup = 0.0;
        for (std::int64_t i = 0; i < cfg.pairs; ++i) {
            auto [g, gp] = random_pair(n, rng);
            const double k = d_K(g, gp);
            const double c = d_CC(g, gp);
            maxv = std::max(maxv, k - c);
            if (k > c + 1e-9) ++viol;
            if (k > 0.0) sup = std::max(sup, c / k);
        }
        // Triangle inequality for d_K is not asserted; the worst ratio is recorded.
        double tri = 0.0;
        const std::int64_t triples = std::min<std::int64_t>(cfg.pairs / 10 + 1, 10000);
        for (std::int64_t i = 0; i < triples; ++i) {
            auto [a, b] = random_pair(n, rng);
            const Point c = random_pair(n, rng).first;
            const double rhs = d_K(a, c) + d_K(c, b);
            if (rhs > 0.0) tri = std::max(tri, d_K(a, b) / rhs);
        }
        // u = u': the CC distance is Euclidean.
        for (int i = 0; i < 10000; ++i) {
            auto [g, gp] = random_pair(n, rng);
            gp.u = g.u;
            double e2 = 0.0;
            for (int k = 0; k < n; ++k) e2 += (g.x[k] - gp.x[k]) * (g.x[k] - gp.x[k]);
            const double e = std::sqrt(e2);
            worst_euclid = std::max(worst_euclid, std::abs(d_CC(g, gp) - e) / (1.0 + e));
        }
        // Seam between the antipodal case and the generic one.
        for (int i = 0; i < 1000; ++i) {
            auto x = random_vec(n, std::exp(rng.uniform(-2.0, 1.0)), rng);
            std::vector<double> xm(x);
            for (auto& c : xm) c = -c;
            const double s0 = 0.5 * kPi * norm2(x);
            const double above = d_CC(Point(x, 0.0), Point(xm, s0 * (1.0 + 1e-6)));
            const double below = d_CC(Point(x, 0.0), Point(xm, s0 * (1.0 - 1e-6)));
            worst_seam = std::max(worst_seam, rel(below, above));
        }
        // Dilation homogeneity. Powers of two keep the dilated inputs exact, so
        // nearly coincident pairs do not pick up rounding from the scaling itself.
        for (int i = 0; i < 1000; ++i) {
            auto [g, gp] = random_pair(n, rng);
            const double r = std::ldexp(1.0, static_cast<int>(rng.uniform(-6.0, 7.0)));
            const double base = d_CC(g, gp);
            if (base > 0.0) worst_homog = std::max(worst_homog, rel(d_CC(dilate(g, r), dilate(gp, r)), r * base));
        }
        sup_lo = std::min(sup_lo, sup);
        sup_hi = std::max(sup_hi, sup);
        total_viol += viol;
        worst_viol = std::max(worst_viol, maxv);
        rep.table.rows.push_back({n, cfg.pairs, maxv, viol, sup, tri});
        rep.summary["sup_dCC_over_dK"][std::to_string(n)] = sup;
    }

    // Heisenberg degenerate case.
    double worst_heis = 0.0;
    for (double up : {1e-3, 1.0, 1e3}) {
        const double d = d_CC(Point({0.0}, 0.0), Point({0.0}, up));
        worst_heis = std::max(worst_heis, rel(d, std::sqrt(2.0 * kPi * up)));
    }

    // mu inversion round trip.
    Rng rng(cfg.seed, 2000);
    double worst_rt = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double a = i % 10 == 0 ? -1.0 : rng.uniform(-1.0, 1.0);
        const double M = a == -1.0 ? 0.5 * kPi * (1.0 - 1e-9) : 20.0;
        const double m = rng.uniform(-M, M);
        const double phi = mu_inverse(a, m);
        const double back = mu(a, phi);
        worst_rt = std::max(worst_rt, std::abs(back - m) / std::max(1.0, std::abs(m)));
    }
    bool reject_ok = true;
    for (double m : {0.5 * kPi, -0.5 * kPi, std::nextafter(0.5 * kPi, 4.0), 2.0, 1e6}) {
        try {
            (void)mu_inverse(-1.0, m);
            reject_ok = false;
        } catch (const OutOfRange&) {
        }
    }
    try {
        (void)mu_inverse(-1.0, std::nextafter(0.5 * kPi, 0.0));
    } catch (const Error&) {
        reject_ok = false;
    }

    rep.summary["max_dK_minus_dCC"] = worst_viol;
    rep.summary["sup_spread"] = sup_hi / sup_lo;
    rep.summary["euclidean_max_err"] = worst_euclid;
    rep.summary["seam_max_rel"] = worst_seam;
    rep.summary["homogeneity_max_rel"] = worst_homog;
    rep.summary["heisenberg_max_rel"] = worst_heis;
    rep.summary["mu_roundtrip_max_err"] = worst_rt;

    add(rep, "dK_le_dCC", total_viol == 0, std::to_string(total_viol) + " violations, max d_K - d_CC " + fmt(worst_viol));
    add(rep, "dCC_over_dK_stable", std::isfinite(sup_hi) && sup_hi / sup_lo <= cfg.thresholds.dcc_dk_spread,
        "sup in [" + fmt(sup_lo) + ", " + fmt(sup_hi) + "]");
    add(rep, "euclidean_when_u_equal", worst_euclid <= 1e-9, "max err " + fmt(worst_euclid));
    add(rep, "antipodal_seam_continuous", worst_seam <= 1e-3, "max rel " + fmt(worst_seam));
    add(rep, "dCC_homogeneous", worst_homog <= 1e-9, "max rel " + fmt(worst_homog));
    add(rep, "heisenberg_limit", worst_heis <= 1e-12, "max rel " + fmt(worst_heis));
    add(rep, "mu_inverse_roundtrip", worst_rt < 1e-9, "max err " + fmt(worst_rt));
    add(rep, "mu_inverse_rejects_out_of_range", reject_ok, "a = -1, |m| >= pi/2");
    return rep;
}

// ------------------------------------------------------------------ lemmas

Report run_lemmas(const ExperimentConfig& cfg) {
    using namespace grushin::lemma;
    Report rep;
    rep.suite = "lemmas";
    rep.table.columns = {"function", "domain", "grid", "min", "argmin", "violations", "threshold", "slack"};
    SweepOptions opt;
    opt.jobs = cfg.jobs;
    if (cfg.n_grid == "coarse") {
        opt.r_points = 51;
        opt.omega_points = 500;
        opt.points_1d = 500;
        opt.xi_points = 2000;
    }
    for (const auto& s : run_all_sweeps(opt)) {
        json grid = s.grid_sizes;
        json argmin = s.argmin;
        rep.table.rows.push_back({s.name, s.domain, grid.dump(), s.min_value, argmin.dump(), s.violations, s.threshold,
                                  s.slack});
        add(rep, "sweep_" + s.name, s.passed(),
            std::to_string(s.violations) + " violations over " + std::to_string(s.evaluated) + ", min " +
                fmt(s.min_value));
    }
    const double xi = Xi(0.5 * kPi);
    add(rep, "Xi_half_pi", std::abs(xi - 2.0 / kPi) <= 1e-14, "Xi(pi/2) - 2/pi = " + fmt(xi - 2.0 / kPi));

    // Signs of dG2/dr and dG1/dr by central differences.
    const double h = 1e-5;
    long bad_g2 = 0;
    long bad_g1 = 0;
    const int N = opt.omega_points;
    for (int i = 1; i < N; ++i) {
        const double w = (kPi - 1e-3) * i / N;
        for (double r : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
            const double d2 = (G2(r + h, w) - G2(r - h, w)) / (2 * h);
            const double d1 = (G1(r + h, w) - G1(r - h, w)) / (2 * h);
            if (!(d2 > -1e-7)) ++bad_g2;
            if (w <= 0.5 * kPi && d1 > 1e-7) ++bad_g1;
            if (w >= 0.5 * kPi && d1 < -1e-7) ++bad_g1;
        }
    }
    add(rep, "dG2_dr_positive", bad_g2 == 0, std::to_string(bad_g2) + " violations");
    add(rep, "dG1_dr_sign_change_at_half_pi", bad_g1 == 0, std::to_string(bad_g1) + " violations");

    // For omega <= pi/2 the minimum over r sits at an endpoint.
    long interior = 0;
    for (int i = 1; i <= 200; ++i) {
        const double w = 0.5 * kPi * i / 200;
        const double ends = std::min(G(-1.0, w), G(1.0, w));
        for (int k = 1; k < opt.r_points - 1; ++k) {
            const double r = -1.0 + 2.0 * k / (opt.r_points - 1);
            if (G(r, w) < ends - 1e-12) ++interior;
        }
    }
    add(rep, "G_min_at_r_endpoints", interior == 0, std::to_string(interior) + " interior minima");

    double c1 = std::numeric_limits<double>::infinity();
    double C1 = 0.0;
    for (int i = 1; i < opt.points_1d; ++i) {
        const double v = taylor_ratio(kPi * i / opt.points_1d);
        c1 = std::min(c1, v);
        C1 = std::max(C1, v);
    }
    rep.summary["c1"] = c1;
    rep.summary["C1"] = C1;
    // The sup is the omega -> 0 limit 1/6, approached to O(h^2) on the open grid.
    add(rep, "taylor_ratio_bounds", c1 > 0.0 && c1 <= 1.0 / 6.0 && std::abs(C1 - 1.0 / 6.0) <= 1e-6,
        "c1 = " + fmt(c1) + ", C1 = " + fmt(C1));
    return rep;
}

// ------------------------------------------------------------------ volumes

Report run_volumes(const ExperimentConfig& cfg) {
    Report rep;
    rep.suite = "volumes";
    rep.table.columns = {"metric", "n", "x", "r", "method", "value", "error", "samples", "seed"};
    const auto dims = dims_or(cfg, {1, 2, 3, 5, 10});
    const std::vector<double> xs = cfg.xnorm ? std::vector<double>{*cfg.xnorm} : std::vector<double>{0, 0.5, 1, 2, 5};

    long outside = 0;
    long not_converged = 0;
    double worst_dil = 0.0;
    double min_frac = std::numeric_limits<double>::infinity();
    double max_frac = 0.0;
    long nonmono = 0;
    for (int n : dims) {
        double prev = 0.0;
        std::vector<double> sorted_x = xs;
        std::sort(sorted_x.begin(), sorted_x.end());
        for (double x : sorted_x) {
            for (double r : {0.5, 1.0, 2.0}) {
                const auto v = volume_BK_exact(x, n, r);
                if (!v.converged) ++not_converged;
                const auto b = volume_BK_bracket(x, n, r);
                if (v.value < b.lower * (1 - 1e-6) || v.value > b.upper * (1 + 1e-6)) ++outside;
                rep.table.rows.push_back({"K", n, x, r, "exact", v.value, v.error, v.samples, 0});
                if (r != 1.0) {
                    const auto unit = volume_BK_exact(x / r, n, 1.0);
                    worst_dil = std::max(worst_dil, rel(v.value, std::pow(r, n + 2) * unit.value));
                }
            }
            const auto k = volume_BK_exact(x, n, 1.0);
            const auto c = volume_BCC_exact(x, n);
            if (!c.converged) ++not_converged;
            const double frac = c.value / k.value;
            min_frac = std::min(min_frac, frac);
            max_frac = std::max(max_frac, frac);
            rep.table.rows.push_back({"CC", n, x, 1.0, "exact", c.value, c.error, c.samples, 0});
            if (k.value < prev * (1 - 1e-9)) ++nonmono;
            prev = k.value;
        }
    }
    rep.summary["cc_over_k_min"] = min_frac;
    rep.summary["cc_over_k_max"] = max_frac;
    add(rep, "BK_within_bracket", outside == 0, std::to_string(outside) + " outside [U/8, U]");
    add(rep, "quadrature_converged", not_converged == 0, std::to_string(not_converged) + " flagged");
    add(rep, "dilation_identity", worst_dil <= 1e-7, "max rel " + fmt(worst_dil));
    add(rep, "BCC_fraction_of_BK", min_frac >= cfg.thresholds.cc_over_k_volume && max_frac <= 1.0 + 1e-9,
        "|B_CC|/|B_K| in [" + fmt(min_frac) + ", " + fmt(max_frac) + "]");
    add(rep, "BK_nondecreasing_in_x", nonmono == 0, std::to_string(nonmono) + " decreases");

    // Monte Carlo on shared draws.
    std::vector<std::pair<int, double>> mc;
    if (cfg.dims.empty() && !cfg.xnorm) mc = {{1, 0.0}, {2, 0.5}, {3, 1.0}};
    else
        for (int n : dims)
            for (double x : xs) mc.emplace_back(n, x);
    double worst_sigma = 0.0;
    long cc_not_k = 0;
    for (const auto& [n, x] : mc) {
        MonteCarloOptions opt;
        opt.samples = cfg.samples;
        opt.seed = cfg.seed;
        opt.jobs = cfg.jobs;
        const auto s = volume_monte_carlo_shared(on_axis(n, x), 1.0, opt);
        const double ek = volume_BK_exact(x, n, 1.0).value;
        const double ec = volume_BCC_exact(x, n).value;
        const double zk = std::abs(s.k.value - ek) / s.k.error;
        const double zc = std::abs(s.cc.value - ec) / s.cc.error;
        worst_sigma = std::max({worst_sigma, zk, zc});
        cc_not_k += s.cc_not_k;
        rep.table.rows.push_back({"K", n, x, 1.0, "monte_carlo", s.k.value, s.k.error, s.k.samples, cfg.seed});
        rep.table.rows.push_back({"CC", n, x, 1.0, "monte_carlo", s.cc.value, s.cc.error, s.cc.samples, cfg.seed});
    }
    rep.summary["mc_max_sigma"] = worst_sigma;
    add(rep, "monte_carlo_within_3_sigma", worst_sigma <= 3.0, "max |z| " + fmt(worst_sigma));
    add(rep, "cc_hits_inside_k", cc_not_k == 0, std::to_string(cc_not_k) + " CC hits outside B_K");

    // theta_0 residual and the J lower bound on random (x, z), |z| < 1.
    Rng rng(cfg.seed, 3000);
    double worst_res = 0.0;
    double J_c = std::numeric_limits<double>::infinity();
    for (int n : {1, 2, 3, 5}) {
        for (int i = 0; i < 2000; ++i) {
            auto x = random_vec(n, std::exp(rng.uniform(-3.0, 2.0)), rng);
            auto z = random_vec(n, 1.0, rng);
            const double zn = std::sqrt(norm2(z));
            const double target = std::pow(rng.uniform(), 1.0 / n) * (1.0 - 1e-9);
            if (zn > 0.0)
                for (auto& c : z) c *= target / zn;
            const double z2 = norm2(z);
            const double p = norm2(x) + dot(x, z);
            try {
                const double t = theta0_from(z2, p);
                worst_res = std::max(worst_res, std::abs(theta0_residual(z2, p, t)));
            } catch (const OutOfRange&) {
                // x' numerically antipodal to x: the profile never reaches 1 below pi.
            }
            const double J = J_value(x, z);
            const double denom = (1.0 + std::sqrt(norm2(x))) * std::sqrt(1.0 - z2);
            if (denom > 0.0) J_c = std::min(J_c, J / denom);
        }
    }
    rep.summary["theta0_max_residual"] = worst_res;
    rep.summary["J_lower_constant"] = J_c;
    add(rep, "theta0_residual", worst_res < 1e-10, "max " + fmt(worst_res));
    add(rep, "J_bounded_below", J_c > 0.0, "c = " + fmt(J_c));

    // n^{3/2} |B_K| / (D_K |S^{n-1}|) over the ball, n = 1..30.
    double ef1 = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= 30; ++n) {
        const auto e = check_EF1(on_axis(n, 0.0), 2000, cfg.seed + static_cast<std::uint64_t>(n));
        ef1 = std::min(ef1, e.min_ratio);
    }
    rep.summary["EF1_min"] = ef1;
    add(rep, "EF1_positive", ef1 > cfg.thresholds.ef1_floor, "min " + fmt(ef1));
    return rep;
}

// ------------------------------------------------------------------ kernels

Report run_kernels(const ExperimentConfig& cfg) {
    Report rep;
    rep.suite = "kernels";
    rep.table.columns = {"kernel", "n", "x", "xp", "a", "s", "method", "value", "error"};
    auto row = [&](const char* kernel, const PairInvariants& p, const char* method, double v, double e) {
        rep.table.rows.push_back({kernel, p.n, p.xnorm, p.xpnorm, p.a, p.s, method, v, e});
    };
    Rng rng(cfg.seed, 4000);

    // Stochastic completeness, n = 1.
    double worst_mass = 0.0;
    for (double h : {0.25, 1.0, 4.0}) {
        const auto m = heat_kernel_mass(Point({0.3}, 0.2), h, kcfg(cfg, 1), 1e-6);
        worst_mass = std::max(worst_mass, std::abs(m.value - 1.0));
        rep.table.rows.push_back({"heat_mass", 1, 0.3, json(), json(), h, "nested_quadrature", m.value, m.error});
    }
    add(rep, "heat_mass_is_one", worst_mass <= 1e-3, "max |mass - 1| " + fmt(worst_mass));

    // Green function against the time integral of the heat kernel, n = 3.
    {
        const auto k3 = kcfg(cfg, 3);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            auto [g, gp] = random_pair(3, rng);
            const auto p = pair_invariants(g, gp);
            const double G = green_from(p, k3);
            const auto H = green_by_heat(p, k3);
            worst = std::max(worst, rel(H.value, G));
            row("green", p, "closed_form", G, 0.0);
            row("green", p, "time_integrated_heat", H.value, H.error);
        }
        add(rep, "green_equals_integrated_heat", worst <= 0.01, "max rel " + fmt(worst));
    }

    // Green / comparison ratio over n = 2..40.
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (int n = 2; n <= 40; ++n) {
            const auto kn = kcfg(cfg, n);
            for (int i = 0; i < 20; ++i) {
                auto [g, gp] = random_pair(n, rng);
                const auto p = pair_invariants(g, gp);
                if (p.dK == 0.0) continue;
                const double q = green_comparison_ratio(p, kn);
                lo = std::min(lo, q);
                hi = std::max(hi, q);
            }
        }
        const double A1 = cfg.thresholds.green_A1;
        rep.summary["green_ratio_min"] = lo;
        rep.summary["green_ratio_max"] = hi;
        add(rep, "green_ratio_in_bracket", lo >= 1.0 / A1 && hi <= A1,
            "ratio in [" + fmt(lo) + ", " + fmt(hi) + "], A1 = " + fmt(A1));

        double c = 0.0;
        for (int n : {2, 10, 50})
            for (double kappa : {1.0, 10.0, 1e3}) {
                const double q = green_comparison_ratio_kappa(kappa, n, kcfg(cfg, n)) / 4.0;
                c = std::max({c, q, 1.0 / q});
            }
        rep.summary["green_Y_bracket_c"] = c;
        add(rep, "green_Y_bracket", std::isfinite(c), "Y sqrt(n) D_K / d_K within [1/c, c], c = " + fmt(c));
    }

    // Poisson: direct against contour-shifted, n = 3, and the imaginary residue.
    {
        const auto k3 = kcfg(cfg, 3);
        double worst = 0.0;
        double worst_res = 0.0;
        double worst_sym = 0.0;
        bool positive = true;
        for (int i = 0; i < 10; ++i) {
            auto [g, gp] = random_pair(3, rng);
            const auto p = pair_invariants(g, gp);
            const auto a = poisson_shifted(p, 1.0, k3);
            const auto b = poisson_direct(p, 1.0, k3);
            worst = std::max(worst, rel(b.value, a.value));
            worst_res = std::max({worst_res, a.imag_residue / a.value, b.imag_residue / b.value});
            positive = positive && a.value > 0.0;
            worst_sym = std::max(worst_sym, rel(poisson_kernel(gp, g, k3), a.value));
            row("poisson", p, "shifted", a.value, a.error);
            row("poisson", p, "direct", b.value, b.error);
        }
        add(rep, "poisson_direct_equals_shifted", worst <= 1e-6, "max rel " + fmt(worst));
        add(rep, "poisson_imaginary_residue", worst_res <= 1e-12, "max residue / value " + fmt(worst_res));
        add(rep, "poisson_positive_symmetric", positive && worst_sym <= 1e-12, "max asymmetry " + fmt(worst_sym));

        double worst_sub = 0.0;
        for (int i = 0; i < 5; ++i) {
            auto [g, gp] = random_pair(3, rng);
            const auto p = pair_invariants(g, gp);
            const double P = poisson_h(p, 1.0, k3);
            const auto S = poisson_by_subordination(p, k3);
            worst_sub = std::max(worst_sub, rel(S.value, P));
            row("poisson", p, "subordinated_heat", S.value, S.error);
        }
        add(rep, "poisson_equals_subordinated_heat", worst_sub <= 0.01, "max rel " + fmt(worst_sub));
    }

    // Scaling identity P_h = h^{-Q} P(delta_{1/h} g, delta_{1/h} g'), n = 2.
    {
        const auto k2 = kcfg(cfg, 2);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            auto [g, gp] = random_pair(2, rng);
            const double h = std::exp(rng.uniform(-2.0, 2.0));
            const double lhs = poisson_shifted(pair_invariants(g, gp), h, k2).value;
            const double rhs =
                std::pow(h, -4.0) * poisson_direct(pair_invariants(dilate(g, 1.0 / h), dilate(gp, 1.0 / h)), 1.0, k2).value;
            worst = std::max(worst, rel(lhs, rhs));
        }
        add(rep, "poisson_scaling_identity", worst <= 1e-6, "max rel " + fmt(worst));

        auto [g, gp] = random_pair(2, rng);
        const double a2 = poisson_time_average(g, gp, 1e-2, k2);
        const double a3 = poisson_time_average(g, gp, 1e-3, k2);
        rep.summary["time_average_decay_ratio"] = a2 / a3;
        add(rep, "time_average_decays", a3 < a2 && a3 > 0.0, "avg(1e-2)/avg(1e-3) = " + fmt(a2 / a3));
    }

    // Main term of the large-distance asymptotics, n = 40.
    {
        const int n = 40;
        const auto k40 = kcfg(cfg, n);
        double worst10 = 0.0;
        long abs_nonmono = 0;
        long shrink_fail = 0;
        json trend = json::array();
        for (int i = 0; i < 6; ++i) {
            auto [g, gp] = random_pair(n, rng);
            const double d = d_K(g, gp);
            std::vector<double> errs;  // signed P / main term - 1
            for (double U : {5.0, 10.0, 20.0}) {
                const double r = U * std::sqrt(static_cast<double>(n)) / d;
                const auto p = pair_invariants(dilate(g, r), dilate(gp, r));
                const double P = poisson_h(p, 1.0, k40);
                const double A = poisson_asymptotic_from(p, n);
                errs.push_back(P / A - 1.0);
                row("poisson", p, U == 10.0 ? "asymptotic_U10" : "asymptotic", A, 0.0);
            }
            worst10 = std::max(worst10, std::abs(errs[1]));
            if (!(std::abs(errs[0]) > std::abs(errs[1]) && std::abs(errs[1]) > std::abs(errs[2]))) ++abs_nonmono;
            // The error is (1 + O(n/d_K^2))(1 + O(n^{-1/2})); only the first factor
            // depends on U, so its increments must shrink as U doubles.
            if (!(std::abs(errs[2] - errs[1]) < std::abs(errs[1] - errs[0]))) ++shrink_fail;
            trend.push_back(errs);
        }
        rep.summary["asymptotic_signed_errors_U5_10_20"] = trend;
        rep.summary["asymptotic_abs_error_nonmonotone_directions"] = abs_nonmono;
        add(rep, "poisson_asymptotic_U10", worst10 <= cfg.thresholds.asymptotic_rel_err, "max rel err " + fmt(worst10));
        add(rep, "poisson_asymptotic_error_decreases", shrink_fail == 0,
            "U-dependent error part shrinks in " + std::to_string(6 - shrink_fail) + "/6 directions; |error| monotone in " +
                std::to_string(6 - abs_nonmono) + "/6 (finite-n floor)");
    }

    // Empirical gap of the half resolvent; reported only.
    {
        json gaps = json::object();
        for (int n : {5, 10, 20}) {
            const auto p = pair_invariants(on_axis(n, 0.0), on_axis(n, 0.7, 0.2));
            gaps[std::to_string(n)] = half_resolvent_gap(p, 1.0, kcfg(cfg, n));
        }
        rep.summary["half_resolvent_gap_c1"] = gaps;
    }
    return rep;
}

// ------------------------------------------------------------------ maximal

Report run_maximal(const ExperimentConfig& cfg) {
    Report rep;
    rep.suite = "maximal";
    rep.table.columns = {"experiment", "n", "parameter", "value"};

    auto grid_for = [&](int n) {
        const bool coarse = cfg.n_grid == "coarse";
        if (n == 1) return GridFunction::cube(1, 2.0, coarse ? 32 : 64, 4.0, coarse ? 32 : 64);
        if (n == 2) return GridFunction::cube(2, 2.0, coarse ? 8 : 12, 4.0, coarse ? 12 : 16);
        return GridFunction::cube(n, 2.0, 6, 4.0, 10);
    };

    // Composition bound with the constant 8.
    double worst = 0.0;
    for (int n : {1, 2}) {
        double wn = 0.0;
        for (int t = 0; t < 20; ++t) {
            auto f = grid_for(n);
            Rng rng(cfg.seed, 5000 + 100 * static_cast<std::uint64_t>(n) + t);
            const int spikes = 1 + static_cast<int>(rng.uniform() * 8);
            for (int k = 0; k < spikes; ++k)
                f[static_cast<std::size_t>(rng.uniform() * static_cast<double>(f.size()))] = rng.uniform();
            wn = std::max(wn, composition_check(f, cfg.jobs).max_ratio);
        }
        // A function carried by one u-line.
        auto line = grid_for(n);
        for (std::size_t xc = 0; xc < line.x_cells(); ++xc) line[line.index(xc, line.u_cells() / 2)] = 1.0;
        wn = std::max(wn, composition_check(line, cfg.jobs).max_ratio);
        worst = std::max(worst, wn);
        rep.table.rows.push_back({"composition_max_ratio", n, "21 functions", wn});
    }
    rep.summary["composition_max_ratio"] = worst;
    add(rep, "composition_bound", worst <= cfg.thresholds.composition_max, "max ratio " + fmt(worst));

    {
        auto f = grid_for(1);
        f.fill(1.0);
        const auto c = composition_check(f, cfg.jobs);
        add(rep, "composition_constant_input", std::abs(c.max_ratio - 0.125) <= 1e-12, "ratio " + fmt(c.max_ratio));
    }

    // Weak-type ratios for single-cell spikes; trend recorded.
    json weak = json::object();
    for (int n : {1, 2, 3}) {
        double best = 0.0;
        for (double off : {0.0, 0.5, 1.0}) {
            auto f = grid_for(n);
            std::size_t xc = 0;
            double bestd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < f.x_cells(); ++c) {
                auto x = f.x_center(c);
                double d = std::abs(x[0] - off);
                for (int k = 1; k < n; ++k) d += std::abs(x[k]);
                if (d < bestd) {
                    bestd = d;
                    xc = c;
                }
            }
            f[f.index(xc, f.u_cells() / 2)] = 1.0;
            const auto M = maximal(f, MaximalMetric::K, default_radii(f, MaximalMetric::K), cfg.jobs);
            const double w = weak_type_ratio(M, f);
            best = std::max(best, w);
            rep.table.rows.push_back({"weak_type_ratio", n, off, w});
        }
        weak[std::to_string(n)] = best;
    }
    rep.summary["weak_type_ratio"] = weak;
    add(rep, "weak_type_ratio_finite", std::isfinite(weak["1"].get<double>()) && std::isfinite(weak["3"].get<double>()),
        "n=1: " + fmt(weak["1"].get<double>()) + ", n=3: " + fmt(weak["3"].get<double>()));

    // Hopf-Dunford-Schwartz comparison, U = 10.
    double hmax = 0.0;
    double hmin = std::numeric_limits<double>::infinity();
    for (int n : {5, 10, 20}) {
        const auto r = hds_comparison(on_axis(n, 0.0), 10.0, 24, cfg.seed, cfg.jobs);
        hmax = std::max(hmax, r.max_ratio);
        hmin = std::min(hmin, r.max_ratio);
        rep.table.rows.push_back({"hds_max_ratio", n, 10.0, r.max_ratio});
        // Near the boundary of the unit ball.
        const double b = hds_ratio(on_axis(n, 0.0), on_axis(n, 1.0 - 1e-6), 10.0, r.volume, kernel_config(n));
        hmax = std::max(hmax, b);
        rep.table.rows.push_back({"hds_boundary_ratio", n, 10.0, b});
    }
    rep.summary["hds_max_ratio"] = hmax;
    add(rep, "hds_ratio_bounded_and_stable", hmax <= cfg.thresholds.hds_bound && hmax / hmin <= cfg.thresholds.hds_spread,
        "max " + fmt(hmax) + ", spread " + fmt(hmax / hmin));

    // Sensitivity to U at n = 10; reported, not asserted.
    json sens = json::object();
    for (double U : {5.0, 10.0, 20.0, 40.0}) {
        const auto r = hds_comparison(on_axis(10, 0.0), U, 12, cfg.seed, cfg.jobs);
        sens[fmt(U)] = r.max_ratio;
        rep.table.rows.push_back({"hds_U_sensitivity", 10, U, r.max_ratio});
    }
    rep.summary["hds_U_sensitivity_n10"] = sens;
    return rep;
}

std::vector<Report> run(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Report> out;
    const bool all = cfg.command == "all";
    if (all || cfg.command == "distances") out.push_back(run_distances(cfg));
    if (all || cfg.command == "lemmas") out.push_back(run_lemmas(cfg));
    if (all || cfg.command == "volumes") out.push_back(run_volumes(cfg));
    if (all || cfg.command == "kernels") out.push_back(run_kernels(cfg));
    if (all || cfg.command == "maximal") out.push_back(run_maximal(cfg));
    for (auto& r : out) r.config = cfg.to_json();
    return out;
}

}  // namespace grushin::experiments

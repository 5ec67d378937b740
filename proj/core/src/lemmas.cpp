#include <grushin/lemmas.hpp>
#include <grushin/mu.hpp>
#include <grushin/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace grushin::lemma {
namespace {

void check_r_omega(double r, double omega) {
    if (!(r >= -1.0 && r <= 1.0)) throw DomainError("lemma: r must lie in [-1, 1]");
    if (!(omega >= 0.0 && omega < kPi)) throw DomainError("lemma: omega must lie in [0, pi)");
}

// (x / sin x)^2
double inv_sinc2(double x) {
    const double s = sinc(x);
    return 1.0 / (s * s);
}

}  // namespace

double Psi(double r, double omega) {
    check_r_omega(r, omega);
    if (r >= 0.0) return inv_sinc2(omega) * (1.0 - r * std::cos(omega));
    // (1 + cos) (omega/sin)^2 = 2 ((omega/2)/sin(omega/2))^2 keeps r -> -1, omega -> pi finite.
    return 2.0 * inv_sinc2(0.5 * omega) - (1.0 + r) * inv_sinc2(omega) * std::cos(omega);
}

double Phi(double r, double omega) { return Psi(r, omega) + r; }

double G1(double r, double omega) { return Phi(r, omega) - mu(r, omega); }
double G2(double r, double omega) { return Phi(r, omega) + mu(r, omega); }
double G(double r, double omega) { return G1(r, omega) * G2(r, omega); }

double G_direct(double r, double omega) {
    const double p = Phi(r, omega);
    const double m = mu(r, omega);
    return p * p - m * m;
}

double dG1_dr(double omega) {
    check_r_omega(0.0, omega);
    if (omega == 0.0) return 0.0;
    const double sw = std::sin(omega);
    const double cw = std::cos(omega);
    return 1.0 - 1.0 / sw + omega * cw * (1.0 - omega) / (sw * sw);
}

double dG2_dr(double omega) {
    check_r_omega(0.0, omega);
    if (omega < 1e-4) return omega / 3.0 + omega * omega / 6.0;
    const double sw = std::sin(omega);
    const double cw = std::cos(omega);
    // 1 - (omega/sin)^2 cos + (sin - omega cos) / sin^2
    return 1.0 - inv_sinc2(omega) * cw + sin_minus_x_cos(omega) / (sw * sw);
}

double Z1(double y) {
    if (!(y >= 0.0 && y < kPi / 2.0)) throw DomainError("Z1: y must lie in [0, pi/2)");
    const double first = 2.0 * inv_sinc2(y) - 1.0;
    if (y == 0.0) return first * first;
    const double sy = std::sin(y);
    // y / sin^2 y - cot y = (2y - sin 2y) / (2 sin^2 y)
    const double second = x_minus_sin(2.0 * y) / (2.0 * sy * sy);
    return (first - second) * (first + second);
}

double Z2(double y) {
    if (!(y >= 0.0 && y < kPi / 4.0)) throw DomainError("Z2: y must lie in [0, pi/4)");
    const double cy = std::cos(y);
    const double t = y / cy;
    const double first = 2.0 * t * t + 1.0;
    const double second = y / (cy * cy) + std::tan(y);
    return (first - second) * (first + second);
}

double Xi(double omega) {
    if (!(omega > 0.0 && omega < kPi)) throw DomainError("Xi: omega must lie in (0, pi)");
    return x_minus_sin(2.0 * omega) / (2.0 * omega * omega * std::sin(omega));
}

double K_fn(double omega) {
    if (!(omega >= 0.0 && omega < kPi)) throw DomainError("K_fn: omega must lie in [0, pi)");
    const double sw = std::sin(omega);
    return sw * sw - sw - std::cos(omega) * (omega * omega - omega);
}

double T(double omega) {
    if (!(omega >= 0.0 && omega < kPi)) throw DomainError("T: omega must lie in [0, pi)");
    if (omega < 0.3) {
        const double w2 = omega * omega;
        const double w6 = w2 * w2 * w2;
        return w6 * (2.0 / 45.0 +
                     w2 * (-2.0 / 315.0 +
                           w2 * (2.0 / 4725.0 +
                                 w2 * (-8.0 / 467775.0 + w2 * (4.0 / 8513505.0 + w2 * (-2.0 / 212837625.0))))));
    }
    const double sw = std::sin(omega);
    return omega * omega + 0.5 * omega * std::sin(2.0 * omega) - 2.0 * sw * sw;
}

double V(double h) {
    if (!(h >= 0.0 && h <= kPi / 2.0)) throw DomainError("V: h must lie in [0, pi/2]");
    return h * h * h - sin_minus_x_cos(h);
}

double z_star(double y) {
    if (!(y >= 0.0 && y < kPi / 2.0)) throw DomainError("z_star: y must lie in [0, pi/2)");
    if (y < 0.3) {
        const double y2 = y * y;
        const double y6 = y2 * y2 * y2;
        return y6 * (16.0 / 9.0 +
                     y2 * (8.0 / 9.0 +
                           y2 * (-1114.0 / 4725.0 +
                                 y2 * (1133.0 / 42525.0 +
                                       y2 * (-49877.0 / 26195400.0 + y2 * (329191.0 / 3405402000.0))))));
    }
    const double y2 = y * y;
    return (1.0 + 6.0 * y2 - 16.0 * y2 * y2) * std::cos(y) - (1.0 + 2.0 * y2) * std::cos(3.0 * y) +
           2.0 * y * (-5.0 + 8.0 * y2 + std::cos(2.0 * y)) * std::sin(y);
}

double z_star_prime(double y) {
    if (!(y >= 0.0 && y < kPi / 2.0)) throw DomainError("z_star_prime: y must lie in [0, pi/2)");
    const double sy = std::sin(y);
    const double cy = std::cos(y);
    const double ysq_minus_s2 = x_minus_sin(y) * (y + sy);  // y^2 - sin^2 y
    return 4.0 * (4.0 * y * y * sy * ysq_minus_s2 + sy * ysq_minus_s2 +
                  sin_minus_x_cos(y) * (12.0 * y * y - 2.0 * y * sy * cy - 3.0 * sy * sy));
}

double z_star_prime_direct(double y) {
    const double sy = std::sin(y);
    const double cy = std::cos(y);
    return 4.0 * y * cy * (sy * sy - 12.0 * y * y) + 4.0 * y * y * (12.0 + 4.0 * y * y + 3.0 * std::cos(2.0 * y)) * sy -
           16.0 * sy * sy * sy;
}

double taylor_ratio(double omega) {
    if (!(omega >= 0.0 && omega < kPi)) throw DomainError("taylor_ratio: omega must lie in [0, pi)");
    if (omega == 0.0) return 1.0 / 6.0;
    return x_minus_sin(omega) / (omega * omega * omega);
}

double chain_gap(double y) {
    if (!(y > 0.0 && y < kPi)) throw DomainError("chain_gap: y must lie in (0, pi)");
    const double sc = sinc(y);
    const double one_minus_sc = x_minus_sin(y) / y;
    const double g1 = one_minus_sc;
    const double g2 = sc * one_minus_sc;
    // sinc^2 - cos = (1 - cos) - (1 - sinc)(1 + sinc)
    const double g3 = one_minus_cos(y) - one_minus_sc * (1.0 + sc);
    return std::min({g1, g2, g3});
}

double Grid1D::at(int i) const {
    if (count == 1) return open_lo || open_hi ? 0.5 * (lo + hi) : lo;
    const int first = open_lo ? 1 : 0;
    const int intervals = count - 1 + (open_lo ? 1 : 0) + (open_hi ? 1 : 0);
    return lo + (hi - lo) * static_cast<double>(i + first) / intervals;
}

std::string Grid1D::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << (open_lo ? "(" : "[") << lo << ", " << hi << (open_hi ? ")" : "]") << " x " << count;
    return os.str();
}

namespace {

bool violates(double v, double threshold, double slack, bool strict) {
    if (std::isnan(v)) return true;
    return strict ? v <= threshold - slack : v < threshold - slack;
}

}  // namespace

SweepReport sweep_1d(const std::string& name, const std::function<double(double)>& f, const Grid1D& grid,
                     double threshold, double slack, bool strict, int jobs) {
    SweepReport rep;
    rep.name = name;
    rep.domain = grid.describe();
    rep.grid_sizes = {grid.count};
    rep.threshold = threshold;
    rep.slack = slack;
    rep.strict = strict;
    if (grid.count <= 0) {
        rep.valid = false;
        rep.min_value = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    std::vector<double> vals(static_cast<std::size_t>(grid.count));
    parallel_for(vals.size(), jobs, [&](std::size_t i) { vals[i] = f(grid.at(static_cast<int>(i))); });
    std::size_t best = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < vals[best]) best = i;
        if (violates(vals[i], threshold, slack, strict)) ++rep.violations;
    }
    rep.min_value = vals[best];
    rep.argmin = {grid.at(static_cast<int>(best))};
    rep.evaluated = grid.count;
    return rep;
}

SweepReport sweep_2d(const std::string& name, const std::function<double(double, double)>& f,
                     const Grid1D& g0, const Grid1D& g1, double threshold, double slack, bool strict,
                     int jobs) {
    SweepReport rep;
    rep.name = name;
    rep.domain = g0.describe() + " * " + g1.describe();
    rep.grid_sizes = {g0.count, g1.count};
    rep.threshold = threshold;
    rep.slack = slack;
    rep.strict = strict;
    if (g0.count <= 0 || g1.count <= 0) {
        rep.valid = false;
        rep.min_value = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    struct Row {
        double min = std::numeric_limits<double>::infinity();
        int arg = 0;
        long bad = 0;
    };
    std::vector<Row> rows(static_cast<std::size_t>(g0.count));
    parallel_for(rows.size(), jobs, [&](std::size_t i) {
        const double a = g0.at(static_cast<int>(i));
        Row row;
        for (int j = 0; j < g1.count; ++j) {
            const double v = f(a, g1.at(j));
            if (v < row.min || (std::isnan(v) && !std::isnan(row.min))) {
                row.min = v;
                row.arg = j;
            }
            if (violates(v, threshold, slack, strict)) ++row.bad;
        }
        rows[i] = row;
    });
    std::size_t best = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].min < rows[best].min) best = i;
        rep.violations += rows[i].bad;
    }
    rep.min_value = rows[best].min;
    rep.argmin = {g0.at(static_cast<int>(best)), g1.at(rows[best].arg)};
    rep.evaluated = static_cast<long>(g0.count) * g1.count;
    return rep;
}

const char* sweep_name(SweepId id) {
    switch (id) {
        case SweepId::G: return "G";
        case SweepId::Z1: return "Z1";
        case SweepId::Z2: return "Z2";
        case SweepId::Chain: return "chain";
        case SweepId::K: return "K";
        case SweepId::T: return "T";
        case SweepId::V: return "V";
        case SweepId::ZStarPrime: return "z_star_prime";
        case SweepId::Xi: return "Xi";
    }
    return "?";
}

SweepReport sweep(SweepId id, const SweepOptions& opt) {
    const double s = opt.slack;
    const int m = opt.points_1d;
    switch (id) {
        case SweepId::G:
            return sweep_2d(sweep_name(id), G, Grid1D{-1.0, 1.0, opt.r_points},
                            Grid1D{0.0, kPi - 1e-3, opt.omega_points}, 1.0, s, false, opt.jobs);
        case SweepId::Z1:
            return sweep_1d(sweep_name(id), Z1, Grid1D{0.0, kPi / 2.0 - 1e-3, m}, 1.0, s, false, opt.jobs);
        case SweepId::Z2:
            return sweep_1d(sweep_name(id), Z2, Grid1D{0.0, kPi / 4.0 - 1e-3, m}, 1.0, s, false, opt.jobs);
        case SweepId::Chain:
            return sweep_1d(sweep_name(id), chain_gap, Grid1D{0.0, kPi, m, true, true}, 0.0, 0.0, true,
                            opt.jobs);
        case SweepId::K:
            return sweep_1d(sweep_name(id), K_fn, Grid1D{kPi / 2.0, kPi, m, true, true}, 0.0, 0.0, true,
                            opt.jobs);
        case SweepId::T:
            return sweep_1d(sweep_name(id), T, Grid1D{0.0, kPi, m, true, true}, 0.0, 0.0, true, opt.jobs);
        case SweepId::V:
            return sweep_1d(sweep_name(id), V, Grid1D{0.0, kPi / 2.0, m, true, true}, 0.0, 0.0, true,
                            opt.jobs);
        case SweepId::ZStarPrime:
            return sweep_1d(sweep_name(id), z_star_prime, Grid1D{0.0, kPi / 2.0, m, true, true}, 0.0, 0.0,
                            false, opt.jobs);
        case SweepId::Xi:
            return sweep_1d(sweep_name(id), Xi, Grid1D{1e-4, kPi - 1e-4, opt.xi_points}, 2.0 / kPi, s, false,
                            opt.jobs);
    }
    throw DomainError("sweep: unknown id");
}

std::vector<SweepReport> run_all_sweeps(const SweepOptions& opt) {
    std::vector<SweepReport> out;
    for (SweepId id : {SweepId::G, SweepId::Z1, SweepId::Z2, SweepId::Chain, SweepId::K, SweepId::T, SweepId::V,
                       SweepId::ZStarPrime, SweepId::Xi})
        out.push_back(sweep(id, opt));
    return out;
}

}  // namespace grushin::lemma

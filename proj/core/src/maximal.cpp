#include <grushin/maximal.hpp>
#include <grushin/mu.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace grushin {

void Axis::validate() const {
    if (count < 1) throw ConfigError("Axis: count must be >= 1");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("Axis: need lo < hi, both finite");
}

GridFunction::GridFunction(std::vector<Axis> x_axes, Axis u_axis) : x_axes_(std::move(x_axes)), u_axis_(u_axis) {
    if (x_axes_.empty()) throw ConfigError("GridFunction: n must be >= 1");
    u_axis_.validate();
    x_cells_ = 1;
    for (const auto& a : x_axes_) {
        a.validate();
        x_cells_ *= static_cast<std::size_t>(a.count);
    }
    values_.assign(x_cells_ * static_cast<std::size_t>(u_axis_.count), 0.0);
}

GridFunction GridFunction::cube(int n, double xhalf, int xcount, double uhalf, int ucount) {
    if (n < 1) throw ConfigError("GridFunction::cube: n must be >= 1");
    return GridFunction(std::vector<Axis>(n, Axis{-xhalf, xhalf, xcount}), Axis{-uhalf, uhalf, ucount});
}

double GridFunction::cell_measure() const {
    double m = u_axis_.step();
    for (const auto& a : x_axes_) m *= a.step();
    return m;
}

std::vector<double> GridFunction::x_center(std::size_t xcell) const {
    std::vector<double> x(x_axes_.size());
    for (std::size_t k = x_axes_.size(); k-- > 0;) {
        const auto c = static_cast<std::size_t>(x_axes_[k].count);
        x[k] = x_axes_[k].center(static_cast<int>(xcell % c));
        xcell /= c;
    }
    return x;
}

void GridFunction::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

double GridFunction::mass() const { return std::accumulate(values_.begin(), values_.end(), 0.0) * cell_measure(); }

double GridFunction::max_value() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

bool GridFunction::same_grid(const GridFunction& o) const {
    if (x_axes_.size() != o.x_axes_.size()) return false;
    auto eq = [](const Axis& a, const Axis& b) { return a.lo == b.lo && a.hi == b.hi && a.count == b.count; };
    for (std::size_t k = 0; k < x_axes_.size(); ++k)
        if (!eq(x_axes_[k], o.x_axes_[k])) return false;
    return eq(u_axis_, o.u_axis_);
}

void GridFunction::validate() const {
    for (double v : values_)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("GridFunction: values must be finite and >= 0");
}

const char* maximal_metric_name(MaximalMetric m) {
    switch (m) {
        case MaximalMetric::K: return "K";
        case MaximalMetric::CC: return "CC";
        case MaximalMetric::EuclideanX: return "EuclideanX";
        case MaximalMetric::Euclidean1D: return "Euclidean1D";
    }
    return "?";
}

RadiiSet RadiiSet::geometric(double lo, double hi, double ratio) {
    if (!(lo > 0.0) || !(hi >= lo) || !(ratio > 1.0)) throw ConfigError("RadiiSet::geometric: need 0 < lo <= hi, ratio > 1");
    RadiiSet s;
    for (double r = lo; r <= hi * (1.0 + 1e-12); r *= ratio) s.values.push_back(r);
    return s;
}

void RadiiSet::validate() const {
    if (values.empty()) throw ConfigError("RadiiSet: empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) throw ConfigError("RadiiSet: radii must be positive");
        if (i > 0 && !(values[i] > values[i - 1])) throw ConfigError("RadiiSet: radii must increase strictly");
    }
}

RadiiSet default_radii(const GridFunction& f, MaximalMetric metric) {
    double hx = 0.0;
    double diam2 = 0.0;
    for (const auto& a : f.x_axes()) {
        hx = std::max(hx, a.step());
        diam2 += (a.hi - a.lo) * (a.hi - a.lo);
    }
    const double hu = f.u_axis().step();
    const double uspan = f.u_axis().hi - f.u_axis().lo;
    double lo = 0.0;
    double hi = 0.0;
    switch (metric) {
        case MaximalMetric::Euclidean1D:
            lo = 2.0 * hu;
            hi = uspan;
            break;
        case MaximalMetric::EuclideanX:
            lo = 2.0 * hx;
            hi = std::sqrt(diam2);
            break;
        case MaximalMetric::K:
        case MaximalMetric::CC:
            // The u-extent of a radius-r ball is at least r^2 / 2.
            lo = std::max(2.0 * hx, std::sqrt(4.0 * hu));
            hi = std::max(lo, std::max(std::sqrt(diam2), std::sqrt(2.0 * uspan)));
            break;
    }
    return RadiiSet::geometric(lo, hi, std::pow(2.0, 0.25));
}

namespace {

// For one center column and radius: the x' columns the ball reaches and the
// number m of u-cells on either side of the center row (|k| du < S, so m = ceil(S/du) - 1).
struct Reach {
    std::size_t xcell;
    int m;
};

int cells_within(double S, double du) {
    if (!(S > 0.0)) return -1;
    const double q = S / du;
    if (q > 1e9) return 1'000'000'000;
    return static_cast<int>(std::ceil(q)) - 1;
}

std::vector<Reach> reach(const GridFunction& f, MaximalMetric metric, std::size_t xa, double r,
                         const std::vector<std::vector<double>>& centers) {
    std::vector<Reach> out;
    const double du = f.u_axis().step();
    if (metric == MaximalMetric::Euclidean1D) {
        out.push_back({xa, cells_within(r, du)});
        return out;
    }
    const auto& x = centers[xa];
    const double r2 = r * r;
    for (std::size_t xb = 0; xb < centers.size(); ++xb) {
        const auto& y = centers[xb];
        double diff2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) diff2 += (x[k] - y[k]) * (x[k] - y[k]);
        if (!(diff2 < r2)) continue;
        int m = 0;
        if (metric != MaximalMetric::EuclideanX) {
            double sum2 = 0.0;
            double xdot = 0.0;
            double xx = 0.0;
            double yy = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                sum2 += (x[k] + y[k]) * (x[k] + y[k]);
                xdot += x[k] * y[k];
                xx += x[k] * x[k];
                yy += y[k] * y[k];
            }
            const double S = metric == MaximalMetric::K ? k_half_width(diff2, sum2, r)
                                                        : cc_half_width(xx + yy, diff2, sum2, xdot, r);
            m = cells_within(S, du);
        }
        if (m >= 0) out.push_back({xb, m});
    }
    return out;
}

std::vector<std::vector<double>> all_centers(const GridFunction& f) {
    std::vector<std::vector<double>> c(f.x_cells());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.x_center(i);
    return c;
}

// Column prefix sums: P[xcell * (Nu + 1) + j] = sum of the first j values in that column.
std::vector<double> prefix_sums(const GridFunction& f) {
    const auto Nu = static_cast<std::size_t>(f.u_cells());
    std::vector<double> P(f.x_cells() * (Nu + 1), 0.0);
    for (std::size_t xc = 0; xc < f.x_cells(); ++xc) {
        double acc = 0.0;
        for (std::size_t j = 0; j < Nu; ++j) {
            acc += f[f.index(xc, static_cast<int>(j))];
            P[xc * (Nu + 1) + j + 1] = acc;
        }
    }
    return P;
}

// Applies `take(index, average)` to every cell for one radius.
template <class Take>
void for_each_average(const GridFunction& f, MaximalMetric metric, double r, const std::vector<double>& P,
                      const std::vector<std::vector<double>>& centers, int jobs, Take&& take) {
    const int Nu = f.u_cells();
    parallel_for(f.x_cells(), jobs, [&](std::size_t xa) {
        const auto cols = reach(f, metric, xa, r, centers);
        for (int j = 0; j < Nu; ++j) {
            double sum = 0.0;
            std::int64_t count = 0;
            for (const auto& c : cols) {
                const int lo = std::max(0, j - std::min(c.m, Nu));
                const int hi = std::min(Nu - 1, j + std::min(c.m, Nu));
                const double* col = &P[c.xcell * (Nu + 1)];
                sum += col[hi + 1] - col[lo];
                count += hi - lo + 1;
            }
            take(f.index(xa, j), count > 0, count > 0 ? sum / static_cast<double>(count) : 0.0);
        }
    });
}

}  // namespace

std::vector<std::size_t> ball_cells(const GridFunction& f, MaximalMetric metric, std::size_t xcell, int j, double r) {
    if (xcell >= f.x_cells() || j < 0 || j >= f.u_cells()) throw DomainError("ball_cells: cell out of range");
    const auto centers = all_centers(f);
    const int Nu = f.u_cells();
    std::vector<std::size_t> out;
    for (const auto& c : reach(f, metric, xcell, r, centers)) {
        const int lo = std::max(0, j - std::min(c.m, Nu));
        const int hi = std::min(Nu - 1, j + std::min(c.m, Nu));
        for (int k = lo; k <= hi; ++k) out.push_back(f.index(c.xcell, k));
    }
    std::sort(out.begin(), out.end());
    return out;
}

GridFunction ball_average(const GridFunction& f, MaximalMetric metric, double r, int jobs) {
    if (!(r > 0.0)) throw NonpositiveScale("ball_average: radius must be positive");
    GridFunction out = f;
    const auto P = prefix_sums(f);
    const auto centers = all_centers(f);
    for_each_average(f, metric, r, P, centers, jobs, [&](std::size_t i, bool ok, double avg) {
        if (!ok) throw EmptyBall("ball_average: ball captures no cell centers");
        out[i] = avg;
    });
    return out;
}

GridFunction maximal(const GridFunction& f, MaximalMetric metric, const RadiiSet& radii, int jobs) {
    radii.validate();
    f.validate();
    GridFunction out = f;
    out.fill(-1.0);
    const auto P = prefix_sums(f);
    const auto centers = all_centers(f);
    for (double r : radii.values) {
        for_each_average(f, metric, r, P, centers, jobs, [&](std::size_t i, bool ok, double avg) {
            if (ok) out[i] = std::max(out[i], avg);
        });
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] < 0.0) throw EmptyBall("maximal: every radius captures zero cells at some point");
    return out;
}

double weak_type_ratio(const GridFunction& Mf, const GridFunction& f, const std::vector<double>& lambdas) {
    if (!Mf.same_grid(f)) throw DimensionMismatch("weak_type_ratio: grids differ");
    const double mass = f.mass();
    if (!(mass > 0.0)) throw ZeroMass("weak_type_ratio: ||f||_1 = 0");
    const double cell = Mf.cell_measure();
    std::vector<double> v = Mf.values();
    std::sort(v.begin(), v.end(), std::greater<>());
    double best = 0.0;
    if (lambdas.empty()) {
        // lambda -> v_k from below: |{Mf > lambda}| -> #{Mf >= v_k}.
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!(v[k] > 0.0)) break;
            if (k + 1 < v.size() && v[k + 1] == v[k]) continue;
            best = std::max(best, v[k] * static_cast<double>(k + 1) * cell);
        }
    } else {
        for (double lam : lambdas) {
            if (!(lam > 0.0)) throw DomainError("weak_type_ratio: lambdas must be positive");
            const auto cnt = std::count_if(v.begin(), v.end(), [&](double y) { return y > lam; });
            best = std::max(best, lam * static_cast<double>(cnt) * cell);
        }
    }
    return best / mass;
}

namespace {

// Every radius at which the discrete ball changes, nudged just past the jump.
RadiiSet euclidean_x_radii(const GridFunction& f) {
    std::vector<double> d2;
    const auto c = all_centers(f);
    for (std::size_t b = 0; b < c.size(); ++b) {
        double s = 0.0;
        for (std::size_t k = 0; k < c[0].size(); ++k) s += (c[0][k] - c[b][k]) * (c[0][k] - c[b][k]);
        d2.push_back(s);
    }
    // Distances from a corner cover every difference vector up to sign.
    std::sort(d2.begin(), d2.end());
    RadiiSet r;
    double last = -1.0;
    for (double s : d2) {
        if (last >= 0.0 && s <= last * (1.0 + 1e-12) + 1e-300) continue;
        last = s;
        const double d = std::sqrt(s);
        r.values.push_back(d * (1.0 + 1e-9) + 1e-12);
    }
    return r;
}

RadiiSet euclidean_u_radii(const GridFunction& f) {
    RadiiSet r;
    const double du = f.u_axis().step();
    for (int k = 0; k < f.u_cells(); ++k) r.values.push_back((k + 0.5) * du);
    return r;
}

}  // namespace

CompositionReport composition_check(const GridFunction& f, int jobs, double k_radius_ratio) {
    f.validate();
    CompositionReport rep;
    const auto dk = default_radii(f, MaximalMetric::K);
    double lo = 0.5 * std::min(f.u_axis().step(), f.x_axes()[0].step());
    RadiiSet kr = RadiiSet::geometric(lo, dk.values.back(), k_radius_ratio);
    rep.lhs = maximal(f, MaximalMetric::K, kr, jobs);
    const auto inner = maximal(f, MaximalMetric::Euclidean1D, euclidean_u_radii(f), jobs);
    rep.rhs = maximal(inner, MaximalMetric::EuclideanX, euclidean_x_radii(f), jobs);
    for (auto& v : rep.rhs.values()) v *= 8.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double q;
        if (rep.rhs[i] > 0.0) q = rep.lhs[i] / rep.rhs[i];
        else q = rep.lhs[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        if (q > rep.max_ratio) {
            rep.max_ratio = q;
            rep.argmax = i;
        }
    }
    return rep;
}

double phi_kernel_normalizer(int n) {
    if (n < 1) throw DomainError("phi_kernel: n must be >= 1");
    return 0.5 * sphere_area(n) * beta(0.5 * n, 1.5);
}

double phi_kernel(const std::vector<double>& x) {
    if (x.empty()) throw DomainError("phi_kernel: empty vector");
    const double r2 = norm2(x);
    if (!(r2 < 1.0)) return 0.0;
    return std::sqrt(1.0 - r2) / phi_kernel_normalizer(static_cast<int>(x.size()));
}

double hds_ratio(const Point& g, const Point& gp, double U, double volume, const KernelConfig& cfg) {
    if (!(U > 0.0)) throw DomainError("hds_ratio: U must be positive");
    if (!(volume > 0.0)) throw DomainError("hds_ratio: volume must be positive");
    const int n = cfg.n;
    const double t = 1.0 / (U * std::sqrt(static_cast<double>(n)));
    const double avg = poisson_time_average(g, gp, t, cfg);
    return 1.0 / (volume * n * avg);
}

HDSReport hds_comparison(const Point& g, double U, std::int64_t samples, std::uint64_t seed, int jobs) {
    g.validate();
    const int n = g.dim();
    if (n < 2) throw DomainError("hds_comparison: n must be >= 2");
    if (samples < 1) throw DomainError("hds_comparison: need at least one sample");
    HDSReport rep;
    rep.n = n;
    rep.U = U;
    rep.t = 1.0 / (U * std::sqrt(static_cast<double>(n)));
    rep.volume = volume_BK_exact(std::sqrt(norm2(g.x)), n, 1.0).value;
    rep.samples = samples;

    std::vector<Point> pts;
    Rng rng(seed, 0);
    const BallSpec ball{Metric::K, g, 1.0};
    while (static_cast<std::int64_t>(pts.size()) < samples) {
        Point p = sample_envelope(g, 1.0, rng);
        if (in_ball(ball, p) && d_K(g, p) > 0.0) pts.push_back(std::move(p));
    }
    const auto cfg = kernel_config(n);
    std::vector<double> ratio(pts.size());
    parallel_for(pts.size(), jobs, [&](std::size_t i) { ratio[i] = hds_ratio(g, pts[i], U, rep.volume, cfg); });
    const auto mx = std::max_element(ratio.begin(), ratio.end());
    rep.max_ratio = *mx;
    rep.min_ratio = *std::min_element(ratio.begin(), ratio.end());
    rep.dK_at_max = d_K(g, pts[static_cast<std::size_t>(mx - ratio.begin())]);
    return rep;
}

}  // namespace grushin

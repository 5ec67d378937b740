#include <grushin/balls.hpp>
#include <grushin/mu.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace grushin {
namespace {

constexpr double kAntipodalBand = 1e-12;

double log_sin_weight(int n, double psi, double log_b) {
    return (n - 2) * std::log(std::sin(psi)) - log_b;
}

QuadratureSpec quad_spec(const VolumeOptions& opt, double tighten) {
    QuadratureSpec q;
    q.rel_tol = opt.rel_tol * tighten;
    q.abs_tol = opt.abs_tol * tighten;
    q.max_refinements = opt.max_refinements;
    return q;
}

// Integral over the sphere S^{n-1} of f(cos psi), where psi is the angle to a
// fixed axis. For n = 1 the sphere is the two points +-1.
struct SphereResult {
    double value;
    double error;
    std::int64_t evals;
    bool converged;
};

template <class F>
SphereResult sphere_integral(int n, F&& f, const QuadratureSpec& q) {
    if (n == 1) return {f(1.0) + f(-1.0), 0.0, 2, true};
    const double log_b = log_beta(0.5 * (n - 1), 0.5);
    const double area = sphere_area(n);
    auto inner = integrate(
        [&](double psi) { return f(std::cos(psi)) * std::exp(log_sin_weight(n, psi, log_b)); }, 0.0, kPi, q);
    return {area * inner.value, area * inner.error, inner.evals, inner.converged};
}

}  // namespace

const char* metric_name(Metric m) { return m == Metric::K ? "K" : "CC"; }

void BallSpec::validate() const {
    center.validate();
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("BallSpec: radius must be positive");
}

bool in_ball(const BallSpec& spec, const Point& gp) {
    if (spec.center.dim() != gp.dim()) throw DimensionMismatch("in_ball: dimension mismatch");
    const PairInvariants p = pair_invariants(spec.center, gp);
    const double d = spec.metric == Metric::K ? p.dK : d_CC(p);
    return d < spec.radius;
}

bool in_ball_K_closed_form(const Point& center, double r, const Point& gp) {
    if (center.dim() != gp.dim()) throw DimensionMismatch("in_ball_K_closed_form: dimension mismatch");
    double diff2 = 0.0, sum2 = 0.0;
    for (int i = 0; i < center.dim(); ++i) {
        diff2 += (gp.x[i] - center.x[i]) * (gp.x[i] - center.x[i]);
        sum2 += (gp.x[i] + center.x[i]) * (gp.x[i] + center.x[i]);
    }
    if (!(diff2 < r * r)) return false;
    return 2.0 * std::abs(gp.u - center.u) < std::sqrt(r * r - diff2) * std::sqrt(r * r + sum2);
}

double k_half_width(double diff2, double sum2, double r) {
    const double r2 = r * r;
    if (!(diff2 < r2)) return 0.0;
    return 0.5 * std::sqrt((r2 - diff2) * (r2 + sum2));
}

double theta0_residual(double z2, double p, double theta) {
    const double sc = sinc(theta);
    return z2 + 2.0 * p * one_minus_cos(theta) - sc * sc;
}

namespace {

// Root of cc_profile(theta) = r^2; throws OutOfRange when the profile stays
// below r^2 all the way to pi (x' numerically antipodal to x).
double solve_profile(double R2, double diff2, double sum2, double xdot, double r) {
    const double r2 = r * r;
    auto F = [&](double t) { return cc_profile(R2, diff2, sum2, xdot, t) - r2; };
    if (!(diff2 < r2)) throw DomainError("theta0: |x' - x| must be < r");
    double hi = kPi - 1e-9;
    if (F(hi) < 0.0) {
        hi = std::nextafter(kPi, 0.0);
        if (F(hi) < 0.0) throw OutOfRange("theta0: profile does not reach r^2 below pi");
    }
    RootSpec spec;
    spec.lo = 0.0;
    spec.hi = hi;
    spec.tol = 1e-15;
    spec.max_iter = 600;
    return find_root_monotone(F, spec);
}

}  // namespace

double theta0_from(double z2, double p, double r) {
    if (!(z2 >= 0.0)) throw DomainError("theta0: |z|^2 must be nonnegative");
    if (!(z2 < r * r)) throw DomainError("theta0: |z| must be < r");
    const double R2 = z2 + 2.0 * p;
    const double sum2 = z2 + 4.0 * p;
    if (R2 <= 0.0) throw OutOfRange("theta0: x = x' = 0 has no interior root");
    return solve_profile(R2, z2, std::max(sum2, 0.0), p, r);
}

double theta0(const std::vector<double>& x, const std::vector<double>& z) {
    if (x.size() != z.size()) throw DimensionMismatch("theta0: dimension mismatch");
    return theta0_from(norm2(z), norm2(x) + dot(x, z));
}

double cc_half_width(double R2, double diff2, double sum2, double xdot, double r) {
    const double r2 = r * r;
    if (!(diff2 < r2)) return 0.0;
    if (R2 == 0.0) return r2 / (2.0 * kPi);
    const double xnorm = std::sqrt(0.5 * R2);
    const bool antipodal = std::sqrt(sum2) <= kAntipodalBand * (1.0 + xnorm);
    if (antipodal && r2 >= kPi * kPi * xnorm * xnorm) return r2 / (2.0 * kPi);
    double theta;
    try {
        theta = solve_profile(R2, diff2, sum2, xdot, r);
    } catch (const OutOfRange&) {
        return r2 / (2.0 * kPi);
    }
    const double b = std::clamp(sum2 / R2, 0.0, 2.0);
    return 0.5 * R2 * mu_b(b, theta);
}

double J_from(double z2, double p) {
    const double R2 = z2 + 2.0 * p;
    if (R2 <= 0.0) return 1.0 / kPi;
    double t;
    try {
        t = theta0_from(z2, p);
    } catch (const OutOfRange&) {
        return 1.0 / kPi;
    }
    if (t == 0.0) return 0.0;
    return x_minus_sin(2.0 * t) / (2.0 * t * t) + 2.0 * p * std::sin(t);
}

double J_value(const std::vector<double>& x, const std::vector<double>& z) {
    if (x.size() != z.size()) throw DimensionMismatch("J_value: dimension mismatch");
    const double z2 = norm2(z);
    if (!(z2 < 1.0)) throw DomainError("J_value: |z| must be < 1");
    return J_from(z2, norm2(x) + dot(x, z));
}

EstimateWithError volume_BK_exact(double xnorm, int n, double r, const VolumeOptions& opt) {
    if (n < 1) throw DomainError("volume_BK_exact: n must be >= 1");
    if (!(r > 0.0)) throw NonpositiveScale("volume_BK_exact: r must be positive");
    if (!(xnorm >= 0.0)) throw DomainError("volume_BK_exact: |x| must be nonnegative");
    const QuadratureSpec inner_q = quad_spec(opt, 0.1);
    const QuadratureSpec outer_q = quad_spec(opt, 1.0);
    const double r2 = r * r;
    double inner_err = 0.0;
    std::int64_t evals = 0;
    bool ok = true;

    // t = r sin(alpha) takes the sqrt(r^2 - t^2) edge into a smooth cos^2 factor.
    auto outer = integrate(
        [&](double alpha) {
            const double t = r * std::sin(alpha);
            const double c = r * std::cos(alpha);
            double ang;
            if (xnorm == 0.0) {
                ang = (n == 1 ? 2.0 : sphere_area(n)) * std::sqrt(r2 + t * t);
            } else {
                // |2x + z|^2 = 4|x|^2 + 4|x| t cos(psi) + t^2
                auto res = sphere_integral(
                    n,
                    [&](double cp) {
                        return std::sqrt(r2 + 4.0 * xnorm * xnorm + 4.0 * xnorm * t * cp + t * t);
                    },
                    inner_q);
                ang = res.value;
                inner_err = std::max(inner_err, res.error);
                evals += res.evals;
                ok = ok && res.converged;
            }
            return std::pow(t, n - 1) * c * c * ang;
        },
        0.0, kPi / 2.0, outer_q);
    EstimateWithError out;
    out.value = outer.value;
    out.error = outer.error + inner_err * r * (kPi / 2.0) * std::pow(r, n + 1);
    out.samples = outer.evals + evals;
    out.converged = ok && outer.converged;
    return out;
}

double volume_BK_origin(int n, double r) {
    if (n < 1) throw DomainError("volume_BK_origin: n must be >= 1");
    return std::exp(log_sphere_area(n) + (n + 2) * std::log(r) + log_beta(0.25 * n, 1.5)) / 4.0;
}

VolumeBracket volume_BK_bracket(double xnorm, int n, double r) {
    const double ub =
        std::exp((n + 1) * std::log(r) + log_beta(0.5 * n, 1.5) + log_sphere_area(n)) * (r + xnorm);
    return {ub / 8.0, ub};
}

EstimateWithError volume_BCC_exact(double xnorm, int n, const VolumeOptions& opt) {
    if (n < 1) throw DomainError("volume_BCC_exact: n must be >= 1");
    if (!(xnorm >= 0.0)) throw DomainError("volume_BCC_exact: |x| must be nonnegative");
    const QuadratureSpec inner_q = quad_spec(opt, 0.1);
    const QuadratureSpec outer_q = quad_spec(opt, 1.0);
    const double x2 = xnorm * xnorm;
    double inner_err = 0.0;
    std::int64_t evals = 0;
    bool ok = true;

    auto outer = integrate(
        [&](double alpha) {
            const double t = std::sin(alpha);
            const double c = std::cos(alpha);
            const double z2 = t * t;
            double ang;
            if (xnorm == 0.0) {
                ang = (n == 1 ? 2.0 : sphere_area(n)) * J_from(z2, 0.0);
            } else {
                auto res = sphere_integral(n, [&](double cp) { return J_from(z2, x2 + xnorm * t * cp); }, inner_q);
                ang = res.value;
                inner_err = std::max(inner_err, res.error);
                evals += res.evals;
                ok = ok && res.converged;
            }
            return std::pow(t, n - 1) * c * ang;
        },
        0.0, kPi / 2.0, outer_q);
    EstimateWithError out;
    out.value = outer.value;
    out.error = outer.error + inner_err * (kPi / 2.0);
    out.samples = outer.evals + evals;
    out.converged = ok && outer.converged;
    return out;
}

double envelope_half_height(double xnorm, double r) {
    // |x + x'| <= 2|x| + r inside the ball and sqrt(r^2 - |x - x'|^2) <= r.
    const double w = 2.0 * xnorm + r;
    return 0.5 * r * std::sqrt(r * r + w * w);
}

double envelope_volume(double xnorm, int n, double r) {
    const double log_ball = log_sphere_area(n) - std::log(static_cast<double>(n)) + n * std::log(r);
    return std::exp(log_ball) * 2.0 * envelope_half_height(xnorm, r);
}

Point sample_envelope(const Point& center, double r, Rng& rng) {
    const int n = center.dim();
    const double H = envelope_half_height(std::sqrt(norm2(center.x)), r);
    Point g = center;
    double len2 = 0.0;
    std::vector<double> dir(static_cast<std::size_t>(n));
    do {
        len2 = 0.0;
        for (double& d : dir) {
            d = rng.normal();
            len2 += d * d;
        }
    } while (len2 == 0.0);
    const double rad = r * std::pow(rng.uniform(), 1.0 / n) / std::sqrt(len2);
    for (int i = 0; i < n; ++i) g.x[i] += rad * dir[i];
    g.u += H * (2.0 * rng.uniform() - 1.0);
    return g;
}

namespace {

struct BatchCounts {
    std::int64_t k = 0;
    std::int64_t cc = 0;
    std::int64_t cc_not_k = 0;
};

template <class Body>
std::vector<BatchCounts> run_batches(const MonteCarloOptions& opt, Body&& body) {
    if (opt.samples <= 0) throw DomainError("volume_monte_carlo: sample count must be positive");
    if (opt.batch <= 0) throw DomainError("volume_monte_carlo: batch size must be positive");
    const std::int64_t nb = (opt.samples + opt.batch - 1) / opt.batch;
    std::vector<BatchCounts> counts(static_cast<std::size_t>(nb));
    parallel_for(counts.size(), opt.jobs, [&](std::size_t b) {
        Rng rng(opt.seed, b);
        const std::int64_t draws = std::min(opt.batch, opt.samples - static_cast<std::int64_t>(b) * opt.batch);
        for (std::int64_t i = 0; i < draws; ++i) body(rng, counts[b]);
    });
    return counts;
}

EstimateWithError binomial(std::int64_t hits, std::int64_t n, double env, std::uint64_t seed) {
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    EstimateWithError e;
    e.value = env * p;
    e.error = env * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    e.samples = n;
    e.seed = seed;
    return e;
}

}  // namespace

EstimateWithError volume_monte_carlo(const BallSpec& spec, const MonteCarloOptions& opt) {
    spec.validate();
    const double xnorm = std::sqrt(norm2(spec.center.x));
    const double env = envelope_volume(xnorm, spec.center.dim(), spec.radius);
    if (!(env > 0.0) || !std::isfinite(env)) throw DegenerateEnvelope("volume_monte_carlo: envelope volume not finite");
    auto counts = run_batches(opt, [&](Rng& rng, BatchCounts& c) {
        if (in_ball(spec, sample_envelope(spec.center, spec.radius, rng))) ++c.k;
    });
    std::int64_t hits = 0;
    for (const auto& c : counts) hits += c.k;
    return binomial(hits, opt.samples, env, opt.seed);
}

SharedSampleReport volume_monte_carlo_shared(const Point& center, double r, const MonteCarloOptions& opt) {
    BallSpec kb{Metric::K, center, r};
    BallSpec cb{Metric::CC, center, r};
    kb.validate();
    const double xnorm = std::sqrt(norm2(center.x));
    const double env = envelope_volume(xnorm, center.dim(), r);
    if (!(env > 0.0) || !std::isfinite(env)) throw DegenerateEnvelope("volume_monte_carlo: envelope volume not finite");
    auto counts = run_batches(opt, [&](Rng& rng, BatchCounts& c) {
        const Point g = sample_envelope(center, r, rng);
        const bool k = in_ball(kb, g);
        const bool cc = in_ball(cb, g);
        c.k += k;
        c.cc += cc;
        c.cc_not_k += (cc && !k);
    });
    SharedSampleReport rep;
    std::int64_t k = 0, cc = 0;
    for (const auto& c : counts) {
        k += c.k;
        cc += c.cc;
        rep.cc_not_k += c.cc_not_k;
    }
    rep.k = binomial(k, opt.samples, env, opt.seed);
    rep.cc = binomial(cc, opt.samples, env, opt.seed);
    rep.envelope_volume = env;
    return rep;
}

EF1Report check_EF1(const Point& g, std::int64_t samples, std::uint64_t seed) {
    g.validate();
    if (samples <= 0) throw DomainError("check_EF1: sample count must be positive");
    const int n = g.dim();
    const double xnorm = std::sqrt(norm2(g.x));
    EF1Report rep;
    rep.volume = volume_BK_exact(xnorm, n, 1.0).value;
    const double scale = std::pow(static_cast<double>(n), 1.5) * rep.volume / sphere_area(n);
    Rng rng(seed, 0);
    double worst = std::numeric_limits<double>::infinity();
    std::int64_t accepted = 0;
    // Rejection from the envelope; cap the attempts so a bad envelope cannot hang.
    for (std::int64_t tries = 0; accepted < samples && tries < 1000 * samples; ++tries) {
        const Point gp = sample_envelope(g, 1.0, rng);
        const PairInvariants p = pair_invariants(g, gp);
        if (!(p.dK < 1.0) || p.dK == 0.0) continue;
        ++accepted;
        worst = std::min(worst, scale / p.DK);
    }
    rep.min_ratio = worst;
    rep.samples = accepted;
    return rep;
}

}  // namespace grushin

#include <grushin/kernels.hpp>
#include <grushin/mu.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace grushin {

using cd = std::complex<double>;

namespace {

constexpr double kLogCut = -50.0;  // e^-50 below the peak counts as zero

double log_cosh(double x) {
    x = std::abs(x);
    return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

// Doubles the window until the log-magnitude of the integrand, measured from
// its value at lambda = 0, falls below kLogCut on both sides.
template <class LogMag>
double envelope_window(LogMag&& logmag, double cap) {
    double L = 1.0;
    while (L < cap && (logmag(L) > kLogCut || logmag(-L) > kLogCut)) L *= 2.0;
    return std::min(L, cap);
}

// Largest dyadic fraction of L at which the integrand is still within e^-1 of its peak at 0.
template <class LogMag>
double peak_width(LogMag&& logmag, double L) {
    double w = L;
    while (w > 1e-12 * L && logmag(w) < -1.0 && logmag(-w) < -1.0) w *= 0.5;
    return w;
}

// Integrates over [0, L] on panels [0, w], [w, 2w], [2w, 4w], ... so that a narrow
// peak at 0 followed by a long tail is never sampled too coarsely by one rule.
template <class F>
auto integrate_from_peak(F&& f, double w, double L, const QuadratureSpec& spec) {
    using T = std::decay_t<decltype(f(0.0))>;
    QuadResult<T> out;
    out.converged = true;
    double a = 0.0;
    double b = std::min(w, L);
    while (a < L) {
        auto r = integrate(f, a, b, spec);
        out.value += r.value;
        out.error += r.error;
        out.evals += r.evals;
        out.converged = out.converged && r.converged;
        a = b;
        b = std::min(2.0 * b, L);
    }
    return out;
}

QuadratureSpec inner_spec(const KernelConfig& cfg) { return cfg.quad; }

// Gamma(n/2 + 3/2) / pi^{n/2 + 3/2}
double log_poisson_prefactor(int n) { return log_gamma(0.5 * n + 1.5) - (0.5 * n + 1.5) * std::log(kPi); }

// 2 int_0^inf (lambda / sinh lambda)^{n/2}: the lambda-integral at zero separation.
double zero_separation_integral(int n, const KernelConfig& cfg) {
    QuadratureSpec q = cfg.quad;
    const double L = std::min(cfg.quad.truncation, 2.0 * (-kLogCut) / n + 20.0);
    auto r = integrate(
        [&](double l) { return std::exp(0.5 * n * std::real(log_z_over_sinh(cd(l, 0.0)))); }, 0.0, L, q);
    return 2.0 * r.value;
}

}  // namespace

void KernelConfig::validate() const {
    if (n < 1) throw DomainError("KernelConfig: n must be >= 1");
    quad.validate();
}

KernelConfig kernel_config(int n) {
    KernelConfig c;
    c.n = n;
    return c;
}

cd cexpm1(cd z) {
    const double x = z.real();
    const double y = z.imag();
    const double sh = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * sh * sh, std::exp(x) * std::sin(y)};
}

cd log_z_over_sinh(cd z) {
    const double lam = z.real();
    const double th = z.imag();
    if (!(th >= 0.0 && th < kPi)) throw DomainError("log_z_over_sinh: need 0 <= Im z < pi");
    if (std::abs(z) < 1e-4) {
        const cd z2 = z * z;
        return -z2 / 6.0 + z2 * z2 / 180.0;
    }
    // |sinh z|^2 = cosh^2(lam) (tanh^2(lam) cos^2(th) + sin^2(th)); Im sinh z > 0 for th in (0, pi).
    const double t = std::tanh(lam);
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double log_abs_sinh = log_cosh(lam) + 0.5 * std::log(t * t * c * c + s * s);
    const double arg_sinh = std::atan2(s, c * t);
    const double arg_z = std::atan2(th, lam);
    return {std::log(std::abs(z)) - log_abs_sinh, arg_z - arg_sinh};
}

PairInvariants scale_invariants(const PairInvariants& p, double r) {
    PairInvariants q = p;
    const double r2 = r * r;
    q.R2 *= r2;
    q.s *= r2;
    q.xdot *= r2;
    q.diff2 *= r2;
    q.sum2 *= r2;
    q.xnorm *= r;
    q.xpnorm *= r;
    q.DK *= r;
    q.dK *= r;
    return q;
}

// ---------------------------------------------------------------- heat kernel

namespace {

// log of (z/sinh z)^{n/2} exp(-[R^2 z tanh(z/2) + |x-x'|^2 z/sinh z - 2 i s z] / 4h)
cd heat_log_integrand(cd z, int n, const PairInvariants& p, double h) {
    const cd Lz = log_z_over_sinh(z);
    const cd zs = std::exp(Lz);
    cd ztanh;
    if (std::abs(z) < 1e-4) {
        ztanh = 0.5 * z * z * (1.0 - z * z / 12.0);
    } else {
        const cd q1 = -cexpm1(-z);  // 1 - e^{-z}
        ztanh = z * q1 / (2.0 - q1);
    }
    const cd E = p.R2 * ztanh + p.diff2 * zs - cd(0.0, 2.0 * p.s) * z;
    return 0.5 * n * Lz - E / (4.0 * h);
}

}  // namespace

double heat_saddle(const PairInvariants& p, double h, int n) {
    if (p.s == 0.0) return 0.0;
    const double b = p.R2 > 0.0 ? std::clamp(p.sum2 / p.R2, 0.0, 2.0) : 1.0;
    auto g = [&](double th) {
        const double first = th < 1e-8 ? th / 3.0 : sin_minus_x_cos(th) / (th * std::sin(th));  // 1/th - cot th
        const double m = p.R2 > 0.0 ? p.R2 * mu_b(b, th) : 0.0;
        return 0.5 * n * first + (m - 2.0 * p.s) / (4.0 * h);
    };
    const double cap = kPi - 0.05;
    if (g(cap) <= 0.0) return cap;
    RootSpec spec;
    spec.lo = 0.0;
    spec.hi = cap;
    spec.tol = 1e-12;
    return find_root_monotone(g, spec);
}

namespace {

double heat_on_line(const PairInvariants& p, double h, const KernelConfig& cfg, double theta) {
    const int n = cfg.n;
    const double L0 = std::real(heat_log_integrand(cd(0.0, theta), n, p, h));
    auto logmag = [&](double lam) { return std::real(heat_log_integrand(cd(std::abs(lam), theta), n, p, h)) - L0; };
    const double L = envelope_window(logmag, cfg.quad.truncation);
    auto r = integrate_from_peak(
        [&](double lam) { return std::real(std::exp(heat_log_integrand(cd(lam, theta), n, p, h) - L0)); },
        peak_width(logmag, L), L, inner_spec(cfg));
    const double I = 2.0 * r.value;
    if (!(I > 0.0)) return 0.0;
    return std::exp(L0 - (0.5 * n + 1.0) * std::log(4.0 * kPi * h) + std::log(I));
}

}  // namespace

double heat_kernel_from(const PairInvariants& p, double h, const KernelConfig& cfg) {
    cfg.validate();
    if (p.n != cfg.n) throw DimensionMismatch("heat_kernel: config dimension differs from the points");
    if (!(h > 0.0) || !std::isfinite(h)) throw NonpositiveScale("heat_kernel: h must be positive");
    return heat_on_line(p, h, cfg, heat_saddle(p, h, cfg.n));
}

double heat_kernel(const Point& g, const Point& gp, double h, const KernelConfig& cfg) {
    return heat_kernel_from(pair_invariants(g, gp), h, cfg);
}

double heat_kernel_real_line(const PairInvariants& p, double h, const KernelConfig& cfg) {
    cfg.validate();
    if (!(h > 0.0)) throw NonpositiveScale("heat_kernel_real_line: h must be positive");
    return heat_on_line(p, h, cfg, 0.0);
}

EstimateWithError heat_kernel_mass(const Point& g, double h, const KernelConfig& cfg, double tol) {
    if (g.dim() != 1 || cfg.n != 1) throw DomainError("heat_kernel_mass: implemented for n = 1 only");
    if (!(h > 0.0)) throw NonpositiveScale("heat_kernel_mass: h must be positive");
    QuadratureSpec q;
    q.rel_tol = tol;
    q.abs_tol = 1e-300;
    q.max_refinements = 400;
    KernelConfig kc = cfg;
    kc.quad.rel_tol = std::min(cfg.quad.rel_tol, tol * 1e-2);

    const double x0 = g.x[0];
    const double wx = 16.0 * std::sqrt(h);  // the x'-marginal is Gaussian with variance 2h
    std::int64_t evals = 0;
    bool ok = true;
    double inner_err = 0.0;
    auto outer = integrate(
        [&](double xp) {
            Point gp({xp}, g.u);
            auto at = [&](double du) {
                gp.u = g.u + du;
                return heat_kernel(g, gp, h, kc);
            };
            const double peak = at(0.0);
            if (!(peak > 0.0)) return 0.0;
            double U = std::max(h, 1e-3);
            while (at(U) > 1e-18 * peak && U < 1e6) U *= 2.0;
            auto in = integrate(at, 0.0, U, q);
            evals += in.evals;
            ok = ok && in.converged;
            inner_err += in.error;
            return 2.0 * in.value;
        },
        x0 - wx, x0 + wx, q);
    EstimateWithError e;
    e.value = outer.value;
    e.error = outer.error + 2.0 * inner_err / std::max<std::int64_t>(1, outer.evals) * 2.0 * wx;
    e.samples = evals;
    e.converged = ok && outer.converged;
    return e;
}

// --------------------------------------------------------------- Green function

double green_Y(double kappa, int n, const KernelConfig& cfg) {
    if (!(kappa > 0.0)) throw DomainError("green_Y: kappa must be positive");
    if (n < 1) throw DomainError("green_Y: n must be >= 1");
    auto logf = [&](double lam) {
        lam = std::abs(lam);
        // log(1 + kappa sinh^2) without overflow for large lambda
        const double lk = std::log(kappa);
        const double ls2 = lam > 20.0 ? 2.0 * (lam - std::log(2.0)) : 2.0 * std::log(std::sinh(lam));
        const double x = lk + ls2;
        const double l1p = x > 40.0 ? x : std::log1p(std::exp(x));
        return -0.5 * n * l1p;
    };
    const double L = envelope_window(logf, 1e3);
    auto r = integrate_from_peak([&](double l) { return std::exp(logf(l)); }, peak_width(logf, L), L, cfg.quad);
    return r.value;
}

double green_from(const PairInvariants& p, const KernelConfig& cfg) {
    cfg.validate();
    if (p.dK == 0.0) throw SingularPoint("green_function: g = g'");
    const int n = cfg.n;
    const double kappa = 2.0 * p.DK * p.DK / (p.dK * p.dK);
    const double Y = green_Y(kappa, n, cfg);
    return std::exp(log_gamma(0.5 * n) - (0.5 * n + 1.0) * std::log(kPi) - n * std::log(p.dK) + std::log(Y));
}

double green_function(const Point& g, const Point& gp, const KernelConfig& cfg) {
    return green_from(pair_invariants(g, gp), cfg);
}

double green_comparison_ratio_kappa(double kappa, int n, const KernelConfig& cfg) {
    return 4.0 * green_Y(kappa, n, cfg) * std::sqrt(static_cast<double>(n)) * std::sqrt(0.5 * kappa);
}

double green_comparison_ratio(const PairInvariants& p, const KernelConfig& cfg) {
    if (p.dK == 0.0) throw SingularPoint("green_comparison_ratio: g = g'");
    return green_comparison_ratio_kappa(2.0 * p.DK * p.DK / (p.dK * p.dK), cfg.n, cfg);
}

Bracket green_ratio_bracket(int n) {
    if (n < 2) throw DomainError("green_ratio_bracket: n must be >= 2");
    // 2 int_0^1 e^{-h^2} dh = sqrt(pi) erf(1)
    const double lo = std::sqrt(kPi) * std::erf(1.0);
    const double hi = std::sqrt(2.0 * n) * beta(0.5 * (n - 1), 0.5);
    return {lo, hi};
}

EstimateWithError green_by_heat(const PairInvariants& p, const KernelConfig& cfg) {
    cfg.validate();
    if (p.dK == 0.0) throw SingularPoint("green_by_heat: g = g'");
    const int n = cfg.n;
    const double d2 = p.dK * p.dK;
    const double h0 = d2 / 400.0;
    const double h1 = std::max({d2, p.R2, p.s, 1e-300}) * 1e6;
    QuadratureSpec q;
    q.rel_tol = 1e-8;
    q.abs_tol = 1e-300;
    q.max_refinements = 400;
    auto r = integrate(
        [&](double v) {
            const double h = std::exp(v);
            return heat_kernel_from(p, h, cfg) * h;
        },
        std::log(h0), std::log(h1), q);
    // p_h ~ (4 pi h)^{-n/2-1} I0 for h >> d^2, R^2, s.
    const double I0 = zero_separation_integral(n, cfg);
    const double tail = std::pow(4.0 * kPi, -0.5 * n - 1.0) * I0 * std::pow(h1, -0.5 * n) / (0.5 * n);
    EstimateWithError e;
    e.value = r.value + tail;
    e.error = r.error + tail * 1e-3;
    e.samples = r.evals;
    e.converged = r.converged;
    return e;
}

// --------------------------------------------------------------- Poisson kernel

namespace {

void check_branch(cd w, cd bracket) {
    if (!(w.real() > 0.0) || !(bracket.real() > 0.0)) {
        std::ostringstream os;
        os << "poisson: principal branch left the right half-plane (w = " << w << ", bracket = " << bracket << ")";
        throw BranchCutViolation(os.str());
    }
}

}  // namespace

ComplexIntegral poisson_shifted(const PairInvariants& p, double h, const KernelConfig& cfg) {
    cfg.validate();
    if (!(h > 0.0)) throw NonpositiveScale("poisson: h must be positive");
    if (p.dK == 0.0) throw SingularPoint("poisson_shifted: g = g'");
    const int n = cfg.n;
    const double expo = 0.5 * n + 1.5;
    const double d2 = (p.dK / h) * (p.dK / h);
    const double D2 = (p.DK / h) * (p.DK / h);
    const double phi = p.phi;

    // w^{3/2} [1 + (w + 2 D^2 sinh^2(lambda/2)) / d^2]^{-(n+3)/2}, w = sinh(z)/z, z = lambda + i phi
    auto logF = [&](double lam, bool check) {
        const cd z(lam, phi);
        const cd L = log_z_over_sinh(z);  // log(z / sinh z), valid for either sign of lambda
        const cd w = std::exp(-L);
        const double sh = std::sinh(0.5 * lam);
        const cd br = 1.0 + (w + 2.0 * D2 * sh * sh) / d2;
        if (check) check_branch(w, br);
        return -1.5 * L - expo * std::log(br);
    };
    const double L0 = std::real(logF(0.0, true));
    auto logmag = [&](double l) { return std::real(logF(l, false)) - L0; };
    const double L = envelope_window(logmag, std::min(cfg.quad.truncation, 700.0));
    const double w = peak_width(logmag, L);
    auto right = integrate_from_peak([&](double l) { return std::exp(logF(l, true) - L0); }, w, L, inner_spec(cfg));
    auto left = integrate_from_peak([&](double l) { return std::exp(logF(-l, true) - L0); }, w, L, inner_spec(cfg));
    const cd I = right.value + left.value;

    const double log_scale = log_poisson_prefactor(n) - (n + 3) * std::log(p.dK) + (n + 3) * std::log(h) -
                             (n + 2) * std::log(h) + L0;
    const double scale = std::exp(log_scale);
    ComplexIntegral out;
    out.value = scale * I.real();
    out.imag_residue = scale * std::abs(I.imag());
    out.error = scale * (right.error + left.error);
    out.converged = right.converged && left.converged;
    return out;
}

ComplexIntegral poisson_direct(const PairInvariants& p, double h, const KernelConfig& cfg) {
    cfg.validate();
    if (!(h > 0.0)) throw NonpositiveScale("poisson: h must be positive");
    const int n = cfg.n;
    const double expo = 0.5 * n + 1.5;
    // h C int (lambda/sinh)^{n/2} [h^2 + R^2 lambda tanh(lambda/2) + |x-x'|^2 lambda/sinh - 2 i s lambda]^{-(n+3)/2}
    auto logF = [&](double lam) {
        const double lzs = std::real(log_z_over_sinh(cd(std::abs(lam), 0.0)));
        const double zs = std::exp(lzs);
        const double a = std::abs(lam);
        const double tanh_part = a < 1e-4 ? 0.5 * a * a : a * std::tanh(0.5 * a);
        const cd f(h * h + p.R2 * tanh_part + p.diff2 * zs, -2.0 * p.s * lam);
        return cd(0.5 * n * lzs, 0.0) - expo * std::log(f);
    };
    const double L0 = std::real(logF(0.0));
    auto logmag = [&](double l) { return std::real(logF(l)) - L0; };
    const double L = envelope_window(logmag, std::min(cfg.quad.truncation, 700.0));
    const double w = peak_width(logmag, L);
    auto right = integrate_from_peak([&](double l) { return std::exp(logF(l) - L0); }, w, L, inner_spec(cfg));
    auto left = integrate_from_peak([&](double l) { return std::exp(logF(-l) - L0); }, w, L, inner_spec(cfg));
    const cd I = right.value + left.value;
    const double scale = std::exp(log_poisson_prefactor(n) + std::log(h) + L0);
    ComplexIntegral out;
    out.value = scale * I.real();
    out.imag_residue = scale * std::abs(I.imag());
    out.error = scale * (right.error + left.error);
    out.converged = right.converged && left.converged;
    return out;
}

double poisson_h(const PairInvariants& p, double h, const KernelConfig& cfg) {
    if (p.dK == 0.0) return poisson_direct(p, h, cfg).value;
    return poisson_shifted(p, h, cfg).value;
}

double poisson_kernel(const Point& g, const Point& gp, const KernelConfig& cfg) {
    return poisson_h(pair_invariants(g, gp), 1.0, cfg);
}

double poisson_kernel_shifted(const Point& g, const Point& gp, const KernelConfig& cfg) {
    return poisson_shifted(pair_invariants(g, gp), 1.0, cfg).value;
}

double poisson_kernel_direct(const Point& g, const Point& gp, const KernelConfig& cfg) {
    return poisson_direct(pair_invariants(g, gp), 1.0, cfg).value;
}

double poisson_asymptotic_from(const PairInvariants& p, int n) {
    if (p.dK == 0.0) throw SingularPoint("poisson_asymptotic: g = g'");
    const double sphi = p.phi == 0.0 ? 1.0 : std::sin(p.phi) / p.phi;
    const double lg = 1.5 * std::log(sphi) + log_poisson_prefactor(n) + 0.5 * std::log(2.0) +
                      std::log(p.dK / p.DK) + log_beta(0.5 * n + 1.0, 0.5) - (n + 3) * std::log(p.dK);
    return std::exp(lg);
}

double poisson_asymptotic(const Point& g, const Point& gp, const KernelConfig& cfg) {
    return poisson_asymptotic_from(pair_invariants(g, gp), cfg.n);
}

EstimateWithError poisson_by_subordination(const PairInvariants& p, const KernelConfig& cfg) {
    cfg.validate();
    const int n = cfg.n;
    const double scale = 1.0 + p.dK * p.dK;
    const double t0 = scale / 400.0;
    const double t1 = std::max({scale, p.R2, p.s}) * 1e6;
    QuadratureSpec q;
    q.rel_tol = 1e-8;
    q.abs_tol = 1e-300;
    q.max_refinements = 400;
    const double c = 0.5 / std::sqrt(kPi);
    auto r = integrate(
        [&](double v) {
            const double t = std::exp(v);
            return c * std::exp(-0.5 * v - 0.25 / t) * heat_kernel_from(p, t, cfg);
        },
        std::log(t0), std::log(t1), q);
    const double I0 = zero_separation_integral(n, cfg);
    const double tail =
        c * std::pow(4.0 * kPi, -0.5 * n - 1.0) * I0 * std::pow(t1, -0.5 * n - 1.5) / (0.5 * n + 1.5);
    EstimateWithError e;
    e.value = r.value + tail;
    e.error = r.error + tail * 1e-3;
    e.samples = r.evals;
    e.converged = r.converged;
    return e;
}

double poisson_time_average_from(const PairInvariants& p, double t, const KernelConfig& cfg) {
    if (!(t > 0.0)) throw NonpositiveScale("poisson_time_average: t must be positive");
    QuadratureSpec q;
    q.rel_tol = 1e-8;
    q.abs_tol = 1e-300;
    q.max_refinements = 400;
    auto r = integrate([&](double h) { return poisson_h(p, h, cfg); }, 0.0, t, q);
    return r.value / t;
}

double poisson_time_average(const Point& g, const Point& gp, double t, const KernelConfig& cfg) {
    return poisson_time_average_from(pair_invariants(g, gp), t, cfg);
}

double half_resolvent_gap(const PairInvariants& p, double c, const KernelConfig& cfg) {
    if (p.dK == 0.0) throw SingularPoint("half_resolvent_gap: g = g'");
    if (!(c > 0.0)) throw DomainError("half_resolvent_gap: c must be positive");
    const int n = cfg.n;
    const double tau = c * p.dK / std::sqrt(static_cast<double>(n));
    QuadratureSpec q;
    q.rel_tol = 1e-8;
    q.abs_tol = 1e-300;
    q.max_refinements = 400;
    auto head = integrate([&](double h) { return poisson_h(p, h, cfg); }, 0.0, tau, q);
    const double H = std::max({p.DK, p.dK, tau, std::sqrt(p.R2)}) * 1e4;
    auto mid = integrate(
        [&](double v) {
            const double h = std::exp(v);
            return poisson_h(p, h, cfg) * h;
        },
        std::log(tau), std::log(H), q);
    // P_h ~ C I0 h^{-n-2} once h dominates every length in the pair.
    const double I0 = zero_separation_integral(n, cfg);
    const double tail = std::exp(log_poisson_prefactor(n)) * I0 * std::pow(H, -(n + 1.0)) / (n + 1.0);
    return head.value / (head.value + mid.value + tail);
}

}  // namespace grushin

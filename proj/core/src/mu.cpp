#include <grushin/mu.hpp>
#include <grushin/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace grushin {
namespace {

constexpr double kSeriesRadius = 1e-3;
constexpr double kAntipodalBand = 1e-12;
constexpr double kNearPi = 1e-3;  // below this, angles are carried as d = pi - theta

void check_phi(double phi) {
    if (!(std::abs(phi) < kPi)) throw DomainError("mu: |phi| must be < pi");
}

void check_b(double b) {
    if (!(b >= 0.0 && b <= 2.0)) throw DomainError("mu: a must lie in [-1, 1]");
}

// For phi >= 0:
//   mu = (phi - sin phi)/(1 - cos phi) + b (sin phi - phi cos phi)/sin^2 phi
// Both terms are nonnegative, so nothing cancels.
double mu_pos(double b, double phi) {
    const double a = b - 1.0;
    if (phi < kSeriesRadius) {
        const double p2 = phi * phi;
        return phi * ((2.0 + a) / 3.0 + p2 * ((8.0 + 7.0 * a) / 90.0 + p2 * (32.0 + 31.0 * a) / 2520.0));
    }
    const double sp = std::sin(phi);
    return x_minus_sin(phi) / one_minus_cos(phi) + b * sin_minus_x_cos(phi) / (sp * sp);
}

double mu_prime_pos(double b, double phi) {
    const double a = b - 1.0;
    if (phi < kSeriesRadius) {
        const double p2 = phi * phi;
        return (2.0 + a) / 3.0 + p2 * ((8.0 + 7.0 * a) / 30.0 + p2 * (32.0 + 31.0 * a) / 504.0);
    }
    const double sp = std::sin(phi);
    const double cp = std::cos(phi);
    const double omc = one_minus_cos(phi);
    const double first = (omc * omc - x_minus_sin(phi) * sp) / (omc * omc);
    const double second = (phi * sp * sp - 2.0 * cp * sin_minus_x_cos(phi)) / (sp * sp * sp);
    return first + b * second;
}

// mu(b; pi - d) for d > 0 written in d, so that d keeps its own digits.
double mu_near_pi(double b, double d) {
    const double sd = std::sin(d);
    const double cd = std::cos(d);
    const double first = (kPi - d - sd) / (1.0 + cd);
    return b == 0.0 ? first : first + b * (sd + (kPi - d) * cd) / (sd * sd);
}

// theta in [0, pi) together with delta = pi - theta at full relative precision.
struct Angle {
    double theta;
    double delta;
};

Angle solve_angle(double b, double m) {
    if (b == 0.0 && m >= kPi / 2.0) {
        std::ostringstream os;
        os << "mu_inverse: for a = -1 the range is |m| < pi/2, got m = " << m;
        throw OutOfRange(os.str());
    }
    const double split = kPi - kNearPi;
    if (mu_pos(b, split) >= m) {
        RootSpec spec;
        spec.lo = 0.0;
        spec.hi = split;
        spec.tol = 1e-16;
        spec.max_iter = 600;
        const double t = find_root_monotone([&](double p) { return mu_pos(b, p) - m; }, spec);
        return {t, kPi - t};
    }
    // Solve in log d on [1e-300, 1e-3]; mu decreases in d there.
    const double lo = std::log(1e-300);
    if (mu_near_pi(b, std::exp(lo)) < m) {
        std::ostringstream os;
        os << "mu_inverse: m = " << m << " exceeds the representable range for a = " << b - 1.0;
        throw OutOfRange(os.str());
    }
    RootSpec spec;
    spec.lo = lo;
    spec.hi = std::log(kNearPi);
    spec.tol = 1e-16;
    spec.max_iter = 600;
    const double t = find_root_monotone([&](double ld) { return mu_near_pi(b, std::exp(ld)) - m; }, spec);
    const double d = std::exp(t);
    return {kPi - d, d};
}

// cc_profile with the angle given as pi - delta when delta is small.
double profile_at(double R2, double diff2, double sum2, double xdot, const Angle& ang) {
    if (ang.delta >= kNearPi) return cc_profile(R2, diff2, sum2, xdot, ang.theta);
    const double d = ang.delta;
    const double th = kPi - d;
    const double sd = std::sin(d);
    const double ratio2 = (th / sd) * (th / sd);
    const double ch = std::cos(0.5 * d);  // sin(theta / 2)
    if (xdot >= 0.0) return ratio2 * (diff2 + 4.0 * xdot * ch * ch);
    const double b = sum2 / R2;
    return R2 * (th * th / (2.0 * ch * ch) + b * ratio2 * std::cos(d));
}

}  // namespace

double mu_b(double b, double phi) {
    check_b(b);
    check_phi(phi);
    return phi < 0.0 ? -mu_pos(b, -phi) : mu_pos(b, phi);
}

double mu_prime_b(double b, double phi) {
    check_b(b);
    check_phi(phi);
    return mu_prime_pos(b, std::abs(phi));
}

double mu(double a, double phi) {
    if (!(a >= -1.0 && a <= 1.0)) throw DomainError("mu: a must lie in [-1, 1]");
    return mu_b(1.0 + a, phi);
}

double mu_prime(double a, double phi) {
    if (!(a >= -1.0 && a <= 1.0)) throw DomainError("mu_prime: a must lie in [-1, 1]");
    return mu_prime_b(1.0 + a, phi);
}

double mu_inverse_b(double b, double m) {
    check_b(b);
    if (std::isnan(m)) throw DomainError("mu_inverse: m is NaN");
    if (m == 0.0) return 0.0;
    if (m < 0.0) return -mu_inverse_b(b, -m);
    // Angles within one ulp of pi round down so the result stays below pi.
    return std::min(solve_angle(b, m).theta, std::nextafter(kPi, 0.0));
}

double mu_inverse(double a, double m) {
    if (!(a >= -1.0 && a <= 1.0)) throw DomainError("mu_inverse: a must lie in [-1, 1]");
    return mu_inverse_b(1.0 + a, m);
}

double cc_profile(double R2, double diff2, double sum2, double xdot, double theta) {
    if (theta == 0.0) return diff2;
    const double st = std::sin(theta);
    const double ratio2 = (theta / st) * (theta / st);
    const double sh = std::sin(0.5 * theta);
    if (xdot >= 0.0) return ratio2 * (diff2 + 4.0 * xdot * sh * sh);
    // 1 + cos theta = 2 cos^2(theta/2) folded into the first term.
    const double b = sum2 / R2;
    return R2 * (theta * theta / (2.0 * sh * sh) - b * ratio2 * std::cos(theta));
}

double d_CC(const PairInvariants& p) {
    if (p.R2 == 0.0) return std::sqrt(2.0 * kPi * p.s);
    if (p.s == 0.0) return std::sqrt(p.diff2);

    const double xn = p.xnorm;
    const bool antipodal = std::sqrt(p.sum2) <= kAntipodalBand * (1.0 + xn);
    if (antipodal && 2.0 * p.s >= kPi * xn * xn) return std::sqrt(2.0 * kPi * p.s);

    const double b = std::clamp(p.sum2 / p.R2, 0.0, 2.0);
    const double m = 2.0 * p.s / p.R2;
    Angle ang;
    try {
        ang = solve_angle(b, m);
    } catch (const OutOfRange&) {
        // b so small that mu(b; .) cannot reach m in double precision; the
        // distance has already converged to the antipodal value.
        return std::sqrt(2.0 * kPi * p.s);
    }
    const double d2 = profile_at(p.R2, p.diff2, p.sum2, p.xdot, ang);
    return std::sqrt(std::max(d2, 0.0));
}

double d_CC(const Point& g, const Point& gp) { return d_CC(pair_invariants(g, gp)); }

}  // namespace grushin

#include <grushin/numerics.hpp>

#include <cmath>

namespace grushin {

void QuadratureSpec::validate() const {
    if (!(truncation > 0.0) || !std::isfinite(truncation))
        throw DomainError("QuadratureSpec: truncation must be finite and positive");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw DomainError("QuadratureSpec: tolerances must be positive");
    if (max_refinements < 0) throw DomainError("QuadratureSpec: negative refinement budget");
}

EstimateWithError integrate_1d(const std::function<double(double)>& f, double a, double b,
                               const QuadratureSpec& spec) {
    spec.validate();
    auto r = integrate(f, a, b, spec);
    if (!std::isfinite(r.value)) throw DomainError("integrate_1d: integrand not finite");
    return {r.value, r.error, r.evals, 0, r.converged};
}

double log_gamma(double z) {
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("log_gamma: argument must be positive");
    // Shift up to z >= 10, then Stirling with Bernoulli corrections.
    double shift = 0.0;
    while (z < 10.0) {
        shift += std::log(z);
        z += 1.0;
    }
    const double iz = 1.0 / z;
    const double iz2 = iz * iz;
    const double series =
        iz * (1.0 / 12.0 +
              iz2 * (-1.0 / 360.0 +
                     iz2 * (1.0 / 1260.0 +
                            iz2 * (-1.0 / 1680.0 +
                                   iz2 * (1.0 / 1188.0 +
                                          iz2 * (-691.0 / 360360.0 +
                                                 iz2 * (1.0 / 156.0 + iz2 * (-3617.0 / 122400.0))))))));
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift;
}

double log_beta(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw DomainError("log_beta: arguments must be positive");
    return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

double beta(double p, double q) { return std::exp(log_beta(p, q)); }

double log_sphere_area(int n) {
    if (n < 1) throw DomainError("log_sphere_area: n must be >= 1");
    return std::log(2.0) + 0.5 * n * std::log(kPi) - log_gamma(0.5 * n);
}

double sphere_area(int n) { return std::exp(log_sphere_area(n)); }

double x_minus_sin(double x) {
    if (std::abs(x) < 1.0) {
        // x^3/3! - x^5/5! + ...
        const double x2 = x * x;
        double term = x * x2 / 6.0;
        double sum = 0.0;
        for (int k = 1; k < 12; ++k) {
            sum += term;
            term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        }
        return sum;
    }
    return x - std::sin(x);
}

double sin_minus_x_cos(double x) {
    if (std::abs(x) < 1.0) {
        // sum_{k>=1} (-1)^{k+1} 2k x^{2k+1} / (2k+1)!
        const double x2 = x * x;
        double p = x * x2 / 6.0;  // x^{2k+1}/(2k+1)! at k = 1
        double sum = 0.0;
        for (int k = 1; k < 12; ++k) {
            sum += ((k % 2) ? 2.0 : -2.0) * k * p;
            p *= x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        }
        return sum;
    }
    return std::sin(x) - x * std::cos(x);
}

double one_minus_cos(double x) {
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s;
}

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

}  // namespace grushin

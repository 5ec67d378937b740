#pragma once

#include <grushin/geometry.hpp>
#include <grushin/numerics.hpp>

#include <complex>

namespace grushin {

struct KernelConfig {
    int n = 1;
    // truncation bounds the window the envelope search may pick for
    // half-infinite lambda integrals; tolerances are relative to the
    // integrand's value at its peak.
    QuadratureSpec quad{400.0, 2000, 1e-10, 1e-14};
    bool log_space = true;

    int Q() const { return n + 2; }
    void validate() const;
};

KernelConfig kernel_config(int n);

// Heat kernel p_h(g, g') through the lambda-integral representation, with the
// lambda contour moved to the saddle on the imaginary axis.
double heat_kernel(const Point& g, const Point& gp, double h, const KernelConfig& cfg);
double heat_kernel_from(const PairInvariants& p, double h, const KernelConfig& cfg);

// Same integral taken on the real lambda axis; accurate only while the
// oscillation 2 s lambda / 4h is mild. Used as a cross-check.
double heat_kernel_real_line(const PairInvariants& p, double h, const KernelConfig& cfg);

// Imaginary part of the shifted contour.
double heat_saddle(const PairInvariants& p, double h, int n);

// Integral of p_h(g, .) over R x R for n = 1.
EstimateWithError heat_kernel_mass(const Point& g, double h, const KernelConfig& cfg, double tol = 1e-7);

// Green function Gamma(n/2) / pi^{n/2+1} d_K^{-n} Y.
double green_function(const Point& g, const Point& gp, const KernelConfig& cfg);
double green_from(const PairInvariants& p, const KernelConfig& cfg);

// Y = int_0^inf (1 + kappa sinh^2 lambda)^{-n/2} d lambda, kappa = 2 D_K^2 / d_K^2 >= 1.
double green_Y(double kappa, int n, const KernelConfig& cfg);

// Green function over Gamma(n/2)/(4 pi^{n/2+1}) d_K^{-n} n^{-1/2} d_K / D_K.
double green_comparison_ratio(const PairInvariants& p, const KernelConfig& cfg);
double green_comparison_ratio_kappa(double kappa, int n, const KernelConfig& cfg);

// Analytic bounds on that ratio valid for every kappa >= 1:
// [2 int_0^1 e^{-h^2} dh, sqrt(2n) B((n-1)/2, 1/2)].
struct Bracket {
    double lo;
    double hi;
};
Bracket green_ratio_bracket(int n);

// int_0^inf p_h dh, with the h -> inf tail added in closed form.
EstimateWithError green_by_heat(const PairInvariants& p, const KernelConfig& cfg);

struct ComplexIntegral {
    double value = 0.0;         // real part, the kernel value
    double imag_residue = 0.0;  // |imaginary part|, zero up to quadrature error
    double error = 0.0;
    bool converged = true;
};

// Poisson kernel P_h, h > 0, from the contour-shifted integral W.
ComplexIntegral poisson_shifted(const PairInvariants& p, double h, const KernelConfig& cfg);
// Poisson kernel P_h straight from the real-axis lambda integral.
ComplexIntegral poisson_direct(const PairInvariants& p, double h, const KernelConfig& cfg);

// P = P_1.
double poisson_kernel(const Point& g, const Point& gp, const KernelConfig& cfg);
double poisson_kernel_shifted(const Point& g, const Point& gp, const KernelConfig& cfg);
double poisson_kernel_direct(const Point& g, const Point& gp, const KernelConfig& cfg);

// h^{-Q} P(delta_{1/h} g, delta_{1/h} g').
double poisson_h(const PairInvariants& p, double h, const KernelConfig& cfg);

// Main term of the large-d_K expansion of P.
double poisson_asymptotic(const Point& g, const Point& gp, const KernelConfig& cfg);
double poisson_asymptotic_from(const PairInvariants& p, int n);

// (2 sqrt(pi))^{-1} int_0^inf t^{-3/2} e^{-1/(4t)} p_t dt.
EstimateWithError poisson_by_subordination(const PairInvariants& p, const KernelConfig& cfg);

// (1/t) int_0^t P_h(g, g') dh.
double poisson_time_average(const Point& g, const Point& gp, double t, const KernelConfig& cfg);
double poisson_time_average_from(const PairInvariants& p, double t, const KernelConfig& cfg);

// int_0^tau P_h dh / int_0^inf P_h dh with tau = c d_K / sqrt(n).
double half_resolvent_gap(const PairInvariants& p, double c, const KernelConfig& cfg);

// Pair data of (delta_r g, delta_r g').
PairInvariants scale_invariants(const PairInvariants& p, double r);

// Continuous branch of log(z / sinh z) for 0 <= Im z < pi, Re z >= 0.
std::complex<double> log_z_over_sinh(std::complex<double> z);
std::complex<double> cexpm1(std::complex<double> z);

}  // namespace grushin

#pragma once

#include <grushin/geometry.hpp>

namespace grushin {

// mu(a; phi) = phi / sin^2 phi - cot phi + a (1 - phi cot phi) / sin phi, odd in phi.
// Defined for a in [-1, 1], |phi| < pi.
double mu(double a, double phi);
double mu_prime(double a, double phi);

// Same functions parametrized by b = 1 + a = |x + x'|^2 / R^2, which keeps
// precision when x' is nearly antipodal to x.
double mu_b(double b, double phi);
double mu_prime_b(double b, double phi);

// phi with mu(a; phi) = m. For a = -1 the range is (-pi/2, pi/2).
double mu_inverse(double a, double m);
double mu_inverse_b(double b, double m);

// R^2 (theta / sin theta)^2 (1 - a cos theta), written in terms of |x - x'|^2,
// |x + x'|^2 and x.x' so that neither a -> -1 nor a -> 1 loses digits.
double cc_profile(double R2, double diff2, double sum2, double xdot, double theta);

// Carnot-Caratheodory distance.
double d_CC(const Point& g, const Point& gp);
double d_CC(const PairInvariants& p);

}  // namespace grushin

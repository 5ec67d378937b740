#pragma once

#include <grushin/errors.hpp>

#include <vector>

namespace grushin {

// A point g = (x, u) of R^n x R.
struct Point {
    std::vector<double> x;
    double u = 0.0;

    Point() = default;
    Point(std::vector<double> x_, double u_) : x(std::move(x_)), u(u_) {}

    int dim() const { return static_cast<int>(x.size()); }
    void validate() const;
};

// Scalars of a pair (g, g') that every formula downstream is written in.
struct PairInvariants {
    int n = 0;
    double R2 = 0.0;     // |x|^2 + |x'|^2
    double s = 0.0;      // |u - u'|
    double a = 0.0;      // 2 x.x' / R2, 0 when R2 = 0
    double DK = 0.0;     // (R2^2 + 4 s^2)^{1/4}
    double dK = 0.0;     // (DK^2 - a R2)^{1/2}
    double phi = 0.0;    // atan2(2s, R2), in [0, pi/2]
    double xdot = 0.0;   // x.x'
    double diff2 = 0.0;  // |x - x'|^2
    double sum2 = 0.0;   // |x + x'|^2
    double xnorm = 0.0;  // |x|
    double xpnorm = 0.0; // |x'|

    double DK2() const { return DK * DK; }
};

PairInvariants pair_invariants(const Point& g, const Point& gp);

// Korányi-type gauge (sqrt(R^4 + 4s^2) - 2 x.x')^{1/2}.
double d_K(const Point& g, const Point& gp);

// Same quantity from |x - x'|^2, R2 and s, in cancellation-free form.
double d_K_from(double diff2, double R2, double s);

// delta_r(x, u) = (r x, r^2 u).
Point dilate(const Point& g, double r);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

}  // namespace grushin

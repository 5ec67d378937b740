#include <grushin/geometry.hpp>

#include <algorithm>
#include <cmath>

namespace grushin {

void Point::validate() const {
    if (x.empty()) throw DomainError("Point: dimension must be >= 1");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("Point: non-finite coordinate");
    if (!std::isfinite(u)) throw DomainError("Point: non-finite u");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const std::vector<double>& a) { return dot(a, a); }

double d_K_from(double diff2, double R2, double s) {
    if (s == 0.0) return std::sqrt(diff2);
    const double DK2 = std::hypot(R2, 2.0 * s);
    // DK^2 - R2 = 4 s^2 / (DK^2 + R2)
    return std::sqrt(diff2 + 4.0 * s * s / (DK2 + R2));
}

PairInvariants pair_invariants(const Point& g, const Point& gp) {
    if (g.dim() != gp.dim()) throw DimensionMismatch("pair_invariants: points live in different dimensions");
    if (g.dim() < 1) throw DomainError("pair_invariants: dimension must be >= 1");
    PairInvariants p;
    p.n = g.dim();
    double xx = 0.0, yy = 0.0, xy = 0.0, d2 = 0.0, s2 = 0.0;
    for (int i = 0; i < p.n; ++i) {
        const double xi = g.x[i], yi = gp.x[i];
        xx += xi * xi;
        yy += yi * yi;
        xy += xi * yi;
        d2 += (xi - yi) * (xi - yi);
        s2 += (xi + yi) * (xi + yi);
    }
    p.R2 = xx + yy;
    p.xdot = xy;
    p.diff2 = d2;
    p.sum2 = s2;
    p.xnorm = std::sqrt(xx);
    p.xpnorm = std::sqrt(yy);
    p.s = std::abs(g.u - gp.u);
    p.a = p.R2 > 0.0 ? std::clamp(2.0 * xy / p.R2, -1.0, 1.0) : 0.0;
    const double DK2 = std::hypot(p.R2, 2.0 * p.s);
    p.DK = std::sqrt(DK2);
    p.dK = d_K_from(d2, p.R2, p.s);
    p.phi = (p.R2 == 0.0 && p.s == 0.0) ? 0.0 : std::atan2(2.0 * p.s, p.R2);
    return p;
}

double d_K(const Point& g, const Point& gp) { return pair_invariants(g, gp).dK; }

Point dilate(const Point& g, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw NonpositiveScale("dilate: scale must be positive and finite");
    Point out = g;
    for (double& v : out.x) v *= r;
    out.u *= r * r;
    return out;
}

}  // namespace grushin

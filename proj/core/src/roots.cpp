#include <grushin/numerics.hpp>

#include <cmath>
#include <sstream>

namespace grushin {

// Illinois-modified regula falsi; every third step that fails to halve the
// bracket is replaced by bisection so the worst case is still linear.
double find_root_monotone(const std::function<double(double)>& f, const RootSpec& spec) {
    double lo = spec.lo;
    double hi = spec.hi;
    if (!(lo < hi)) throw DomainError("find_root_monotone: bracket_lo must be < bracket_hi");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::isnan(flo) || std::isnan(fhi)) throw DomainError("find_root_monotone: f is NaN at bracket");
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream os;
        os << "find_root_monotone: no sign change on [" << lo << ", " << hi << "] (f = " << flo << ", "
           << fhi << ")";
        throw NoSignChange(os.str());
    }

    const double scale = std::max(std::abs(spec.lo), std::abs(spec.hi));
    const double width_tol = std::max(spec.tol * scale, spec.abs_tol);
    int side = 0;  // which endpoint was retained last step
    double last_width = hi - lo;
    for (int it = 0; it < spec.max_iter; ++it) {
        const double width = hi - lo;
        const double mid = lo + 0.5 * width;
        if (width <= width_tol || !(mid > lo && mid < hi)) return std::abs(flo) < std::abs(fhi) ? lo : hi;

        double x;
        if (it % 3 == 2 && width > 0.5 * last_width) {
            x = mid;
        } else {
            x = (lo * fhi - hi * flo) / (fhi - flo);
            if (!(x > lo && x < hi)) x = mid;
        }
        if (it % 3 == 2) last_width = width;

        const double fx = f(x);
        if (fx == 0.0) return x;
        if (std::isnan(fx)) throw DomainError("find_root_monotone: f returned NaN");
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
    }
    std::ostringstream os;
    os << "find_root_monotone: no convergence after " << spec.max_iter << " iterations, bracket [" << lo
       << ", " << hi << "]";
    throw NoConvergence(os.str());
}

}  // namespace grushin

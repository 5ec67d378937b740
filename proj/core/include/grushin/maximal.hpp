#pragma once

#include <grushin/balls.hpp>
#include <grushin/kernels.hpp>
#include <grushin/numerics.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace grushin {

// Uniform cell-centered axis: `count` cells of width (hi - lo) / count.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    int count = 1;

    double step() const { return (hi - lo) / count; }
    double center(int i) const { return lo + (i + 0.5) * step(); }
    void validate() const;
};

// Nonnegative function on a product grid over R^n x R. Values are stored with
// the u index fastest: values[xcell * u.count + j].
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::vector<Axis> x_axes, Axis u_axis);

    // [-xhalf, xhalf]^n x [-uhalf, uhalf]
    static GridFunction cube(int n, double xhalf, int xcount, double uhalf, int ucount);

    int n() const { return static_cast<int>(x_axes_.size()); }
    const std::vector<Axis>& x_axes() const { return x_axes_; }
    const Axis& u_axis() const { return u_axis_; }
    std::size_t x_cells() const { return x_cells_; }
    int u_cells() const { return u_axis_.count; }
    std::size_t size() const { return values_.size(); }
    double cell_measure() const;

    std::size_t index(std::size_t xcell, int j) const { return xcell * static_cast<std::size_t>(u_axis_.count) + j; }
    std::vector<double> x_center(std::size_t xcell) const;
    double u_center(int j) const { return u_axis_.center(j); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    void fill(double v);
    double mass() const;  // sum of values times cell measure
    double max_value() const;
    bool same_grid(const GridFunction& other) const;
    void validate() const;  // values finite and >= 0

private:
    std::vector<Axis> x_axes_;
    Axis u_axis_;
    std::size_t x_cells_ = 0;
    std::vector<double> values_;
};

enum class MaximalMetric { K, CC, EuclideanX, Euclidean1D };

const char* maximal_metric_name(MaximalMetric m);

struct RadiiSet {
    std::vector<double> values;

    static RadiiSet geometric(double lo, double hi, double ratio);
    void validate() const;  // nonempty, positive, strictly increasing
};

// Geometric radii with ratio 2^{1/4} from two cell widths up to the domain diameter.
RadiiSet default_radii(const GridFunction& f, MaximalMetric metric);

// Cells (flat indices) whose centers lie in the ball of radius r about the center of cell (xcell, j).
std::vector<std::size_t> ball_cells(const GridFunction& f, MaximalMetric metric, std::size_t xcell, int j, double r);

// Centered discrete maximal function: at each cell, the sup over radii of the
// average of f over the cells whose centers lie in the ball.
GridFunction maximal(const GridFunction& f, MaximalMetric metric, const RadiiSet& radii, int jobs = 1);

// Average of f over the ball of radius r about every cell (one term of the sup).
GridFunction ball_average(const GridFunction& f, MaximalMetric metric, double r, int jobs = 1);

// max over lambda of lambda |{Mf > lambda}| / ||f||_1. With no lambdas the
// supremum over all lambda > 0 is taken exactly (it is approached from below
// each distinct value of Mf).
double weak_type_ratio(const GridFunction& Mf, const GridFunction& f, const std::vector<double>& lambdas = {});

struct CompositionReport {
    GridFunction lhs;  // M_K f
    GridFunction rhs;  // 8 M_{R^n}(M_R f)
    double max_ratio = 0.0;
    std::size_t argmax = 0;
};

// Compares M_K f with 8 M_{R^n}(M_R f(., u)). The Euclidean sups run over every
// radius that changes the discrete ball; M_K uses a fine geometric set.
CompositionReport composition_check(const GridFunction& f, int jobs = 1, double k_radius_ratio = 1.0905077326652577);

// sqrt(1 - |x|^2) on the unit ball, normalized to unit integral.
double phi_kernel(const std::vector<double>& x);
double phi_kernel_normalizer(int n);  // int_{|x|<1} sqrt(1 - |x|^2) dx

// |B_K(g, 1)|^{-1} / [ (n / t) int_0^t P_h(g, g') dh ] with t = 1 / (U sqrt n).
double hds_ratio(const Point& g, const Point& gp, double U, double volume, const KernelConfig& cfg);

struct HDSReport {
    int n = 0;
    double U = 0.0;
    double t = 0.0;
    double volume = 0.0;  // |B_K(g, 1)|
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    double dK_at_max = 0.0;
    std::int64_t samples = 0;
};

// Samples g' uniformly in B_K(g, 1) \ {g} and reports the extreme ratios.
HDSReport hds_comparison(const Point& g, double U, std::int64_t samples, std::uint64_t seed, int jobs = 1);

}  // namespace grushin

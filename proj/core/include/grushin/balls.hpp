#pragma once

#include <grushin/geometry.hpp>
#include <grushin/numerics.hpp>

#include <cstdint>

namespace grushin {

enum class Metric { K, CC };

const char* metric_name(Metric m);

struct BallSpec {
    Metric metric = Metric::K;
    Point center;
    double radius = 1.0;

    void validate() const;
};

bool in_ball(const BallSpec& spec, const Point& gp);

// 2|u' - u| < sqrt(r^2 - |x' - x|^2) sqrt(r^2 + |x' + x|^2) with |x' - x| < r.
bool in_ball_K_closed_form(const Point& center, double r, const Point& gp);

// Half the u-extent of B_K((x, u), r) above x': 0.5 sqrt((r^2 - |x-x'|^2)(r^2 + |x+x'|^2)),
// or 0 when |x - x'| >= r.
double k_half_width(double diff2, double sum2, double r);

// Half the u-extent of B_CC((x, u), r) above x', given the pair data of (x, x').
double cc_half_width(double R2, double diff2, double sum2, double xdot, double r);

// theta_0 in [0, pi) solving |z|^2 + 2 p (1 - cos t) = r^2 (sin t / t)^2 with
// p = x.x' = |x|^2 + x.z, i.e. the CC profile of (x, x + z) equals r^2.
double theta0_from(double z2, double p, double r = 1.0);
double theta0(const std::vector<double>& x, const std::vector<double>& z);

// Left side of the theta_0 equation minus its right side, for residual checks.
double theta0_residual(double z2, double p, double theta);

// (2 t - sin 2t) / (2 t^2) + 2 p sin t at t = theta_0(x, z).
double J_value(const std::vector<double>& x, const std::vector<double>& z);
double J_from(double z2, double p);

struct VolumeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-13;
    int max_refinements = 400;
};

// |B_K((x, 0), r)| for |x| = xnorm, evaluated directly at radius r.
EstimateWithError volume_BK_exact(double xnorm, int n, double r, const VolumeOptions& opt = {});

// Closed form of the x = 0 case: |S^{n-1}| r^{n+2} B(n/4, 3/2) / 4.
double volume_BK_origin(int n, double r);

// Lower and upper bounds (1/8) U and U, U = r^{n+1} (r + |x|) B(n/2, 3/2) |S^{n-1}|.
struct VolumeBracket {
    double lower;
    double upper;
};
VolumeBracket volume_BK_bracket(double xnorm, int n, double r);

// |B_CC((x, 0), 1)| through the theta_0 parametrization.
EstimateWithError volume_BCC_exact(double xnorm, int n, const VolumeOptions& opt = {});

struct MonteCarloOptions {
    std::int64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::int64_t batch = 1 << 15;  // one RNG stream per batch
};

// Uniform rejection sampling in the envelope {|x' - x| < r} x {|u' - u| < H},
// H = (r/2) sqrt(r^2 + (2|x| + r)^2).
EstimateWithError volume_monte_carlo(const BallSpec& spec, const MonteCarloOptions& opt);

struct SharedSampleReport {
    EstimateWithError k;
    EstimateWithError cc;
    std::int64_t cc_not_k = 0;  // CC hits that are not K hits
    double envelope_volume = 0.0;
};

// Both metrics on the same draws.
SharedSampleReport volume_monte_carlo_shared(const Point& center, double r, const MonteCarloOptions& opt);

double envelope_half_height(double xnorm, double r);
double envelope_volume(double xnorm, int n, double r);

// Draw a uniform point of the envelope around `center`.
Point sample_envelope(const Point& center, double r, Rng& rng);

// min over sampled g' in B_K(g, 1) of n^{3/2} |B_K(g, 1)| / (D_K(g, g') |S^{n-1}|).
struct EF1Report {
    double min_ratio = 0.0;
    double volume = 0.0;
    std::int64_t samples = 0;
};
EF1Report check_EF1(const Point& g, std::int64_t samples, std::uint64_t seed);

}  // namespace grushin

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace grushin::lemma {

// r in [-1, 1], omega in [0, pi).
double Psi(double r, double omega);  // (omega / sin omega)^2 (1 - r cos omega)
double Phi(double r, double omega);  // Psi + r
double G1(double r, double omega);   // Phi - mu(r; omega)
double G2(double r, double omega);   // Phi + mu(r; omega)
double G(double r, double omega);    // G1 * G2
double G_direct(double r, double omega);  // Phi^2 - mu^2, cancels badly near pi

// G is affine in r through Phi and mu, so these depend on omega only.
double dG1_dr(double omega);
double dG2_dr(double omega);

double Z1(double y);  // y in [0, pi/2), equals G(-1, 2y)
double Z2(double y);  // y in [0, pi/4), equals G(1, 2y)
double Xi(double omega);  // (2 omega - sin 2 omega) / (2 omega^2 sin omega), omega in (0, pi)

double K_fn(double omega);  // sin^2 - sin - cos (omega^2 - omega); sin^2 * dG1/dr
double T(double omega);     // omega^2 + (omega/2) sin 2 omega - 2 sin^2 omega
double V(double h);         // h^3 + h cos h - sin h
double z_star(double y);    // numerator of Z1' * sin^5 y
double z_star_prime(double y);
double z_star_prime_direct(double y);  // unsimplified derivative, for cross-checks

double taylor_ratio(double omega);  // (omega - sin omega) / omega^3, 1/6 at 0

struct Grid1D {
    double lo = 0.0;
    double hi = 1.0;
    int count = 0;
    bool open_lo = false;  // exclude the endpoint itself
    bool open_hi = false;

    double at(int i) const;
    std::string describe() const;
};

struct SweepReport {
    std::string name;
    std::string domain;
    std::vector<int> grid_sizes;
    double min_value = 0.0;
    std::vector<double> argmin;
    long violations = 0;
    long evaluated = 0;
    double threshold = 0.0;
    double slack = 0.0;
    bool strict = false;  // violation when value <= threshold - slack rather than <
    bool valid = true;    // false for an empty grid

    bool passed() const { return valid && violations == 0; }
};

SweepReport sweep_1d(const std::string& name, const std::function<double(double)>& f, const Grid1D& grid,
                     double threshold, double slack, bool strict, int jobs = 1);
SweepReport sweep_2d(const std::string& name, const std::function<double(double, double)>& f,
                     const Grid1D& g0, const Grid1D& g1, double threshold, double slack, bool strict,
                     int jobs = 1);

enum class SweepId { G, Z1, Z2, Chain, K, T, V, ZStarPrime, Xi };

struct SweepOptions {
    int r_points = 201;
    int omega_points = 2000;
    int points_1d = 2000;
    int xi_points = 10000;
    double slack = 1e-9;
    int jobs = 1;
};

SweepReport sweep(SweepId id, const SweepOptions& opt = {});
std::vector<SweepReport> run_all_sweeps(const SweepOptions& opt = {});
const char* sweep_name(SweepId id);

// The chain 1 > sin y / y > (sin y / y)^2 > cos y: smallest of the three gaps.
double chain_gap(double y);

}  // namespace grushin::lemma

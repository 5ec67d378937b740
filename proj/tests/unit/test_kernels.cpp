#include <grushin/kernels.hpp>

#include <gtest/gtest.h>

#include "generators.hpp"

#include <cmath>
#include <functional>

using namespace grushin;

namespace {

// Grushin sublaplacian Delta_x + |x'|^2 d_u^2 of f at g' by central differences.
double sublaplacian(const std::function<double(const Point&)>& f, const Point& gp, double d) {
    const double f0 = f(gp);
    double lap = 0.0;
    for (int i = 0; i < gp.dim(); ++i) {
        Point a = gp, b = gp;
        a.x[i] += d;
        b.x[i] -= d;
        lap += (f(a) - 2 * f0 + f(b)) / (d * d);
    }
    Point a = gp, b = gp;
    a.u += d;
    b.u -= d;
    return lap + norm2(gp.x) * (f(a) - 2 * f0 + f(b)) / (d * d);
}

}  // namespace

TEST(ComplexHelpers, LogZOverSinh) {
    for (double re : {1e-6, 0.01, 0.5, 2.0, 10.0})
        for (double im : {0.0, 0.3, 1.5, 3.0}) {
            const std::complex<double> z(re, im);
            const auto ref = std::log(z / std::sinh(z));
            const auto v = log_z_over_sinh(z);
            EXPECT_NEAR(v.real(), ref.real(), 1e-12 * (1 + std::abs(ref)));
            EXPECT_NEAR(v.imag(), ref.imag(), 1e-12 * (1 + std::abs(ref)));
        }
    // Large |z| where sinh overflows: log z - z + log 2.
    const auto big = log_z_over_sinh({800.0, 0.5});
    EXPECT_NEAR(big.real(), std::log(std::abs(std::complex<double>(800.0, 0.5))) - 800 + std::log(2.0), 1e-9);
}

TEST(ComplexHelpers, Expm1) {
    for (double re : {-3.0, -1e-9, 0.0, 1e-7, 0.7})
        for (double im : {0.0, 1e-8, 0.4, 2.5}) {
            const std::complex<double> z(re, im);
            const auto v = cexpm1(z);
            const auto ref = std::abs(z) > 1e-2 ? std::exp(z) - 1.0 : z + z * z / 2.0 + z * z * z / 6.0;
            EXPECT_NEAR(std::abs(v - ref), 0.0, 1e-14 * std::max(std::abs(ref), 1e-300) + 1e-300);
        }
}

TEST(Heat, SolvesTheHeatEquation) {
    for (int n : {1, 2}) {
        const auto cfg = kernel_config(n);
        const Point g(std::vector<double>(n, 0.4), 0.1);
        Point gp(std::vector<double>(n, -0.3), 0.6);
        gp.x[0] = 0.9;
        const double h = 0.5;
        auto p = [&](const Point& q) { return heat_kernel(g, q, h, cfg); };
        const double dh = 1e-3;
        const double dt = (heat_kernel(g, gp, h + dh, cfg) - heat_kernel(g, gp, h - dh, cfg)) / (2 * dh);
        const double lap = sublaplacian(p, gp, 2e-3);
        EXPECT_NEAR(dt, lap, 1e-4 * (std::abs(dt) + std::abs(lap) + p(gp))) << n;
    }
}

TEST(Heat, SaddleContourMatchesRealLine) {
    Rng rng(501);
    for (int i = 0; i < 40; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        auto [g, gp] = gen::pair(rng, n, gen::PairKind::Generic);
        const auto p = pair_invariants(g, gp);
        const double h = gen::log_uniform(rng, 0.5, 4) * (1 + p.s);
        const auto cfg = kernel_config(n);
        const double a = heat_kernel_from(p, h, cfg), b = heat_kernel_real_line(p, h, cfg);
        EXPECT_NEAR(a, b, 1e-7 * a) << "s=" << p.s << " h=" << h;
    }
}

TEST(Heat, ScalingAndSymmetry) {
    Rng rng(502);
    for (int i = 0; i < 40; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 3);
        auto [g, gp] = gen::any_pair(rng, n);
        const auto cfg = kernel_config(n);
        const double h = gen::log_uniform(rng, 0.05, 5);
        const double r = gen::log_uniform(rng, 0.25, 4);
        const double v = heat_kernel(g, gp, h, cfg);
        EXPECT_GT(v, 0.0);
        EXPECT_NEAR(heat_kernel(gp, g, h, cfg), v, 1e-9 * v);
        const double w = heat_kernel(dilate(g, r), dilate(gp, r), r * r * h, cfg) * std::pow(r, n + 2);
        EXPECT_NEAR(w, v, 1e-8 * v);
    }
}

TEST(Heat, UnitMass) {
    const auto cfg = kernel_config(1);
    for (auto [x, h] : {std::pair{0.0, 1.0}, std::pair{1.5, 0.3}}) {
        const auto m = heat_kernel_mass(Point({x}, 0.0), h, cfg, 1e-5);
        EXPECT_NEAR(m.value, 1.0, 5e-5) << x << " " << h;
    }
}

TEST(Green, YClosedForms) {
    const auto cfg = kernel_config(1);
    EXPECT_NEAR(green_Y(1.0, 1, cfg), kPi / 2, 1e-10);
    EXPECT_NEAR(green_Y(1.0, 2, cfg), 1.0, 1e-10);
    EXPECT_NEAR(green_Y(1.0, 3, cfg), kPi / 4, 1e-10);
    // n = 2: int (1 + k sinh^2)^{-1} = atanh(sqrt(1 - 1/k)) / sqrt(k (k - 1)) ... checked against quadrature.
    for (double k : {2.0, 10.0, 1e4}) {
        const double ref = integrate_1d([&](double l) { return 1.0 / (1 + k * std::sinh(l) * std::sinh(l)); }, 0, 60,
                                        QuadratureSpec{60, 4000, 1e-13, 1e-300})
                               .value;
        EXPECT_NEAR(green_Y(k, 2, cfg), ref, 1e-9 * ref) << k;
    }
}

TEST(Green, IsHarmonicAwayFromThePole) {
    for (int n : {1, 3}) {
        const auto cfg = kernel_config(n);
        const Point g(std::vector<double>(n, 0.2), 0.0);
        Point gp(std::vector<double>(n, 0.5), 0.8);
        auto G = [&](const Point& q) { return green_function(g, q, cfg); };
        const double v = G(gp);
        EXPECT_NEAR(sublaplacian(G, gp, 3e-3) / v, 0.0, 1e-4) << n;
    }
}

TEST(Green, EqualsIntegratedHeatKernel) {
    Rng rng(503);
    for (int i = 0; i < 10; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        auto [g, gp] = gen::pair(rng, n, gen::PairKind::Generic);
        const auto p = pair_invariants(g, gp);
        const auto cfg = kernel_config(n);
        const double G = green_from(p, cfg);
        const auto H = green_by_heat(p, cfg);
        EXPECT_NEAR(H.value, G, 1e-7 * G) << n;
    }
}

TEST(GreenProperty, ComparisonRatioInsideBracket) {
    Rng rng(504);
    const auto cfg = kernel_config(2);
    for (int i = 0; i < 300; ++i) {
        const int n = 2 + static_cast<int>(rng.next() % 30);
        const double k = gen::log_uniform(rng, 1.0, 1e10);
        const auto b = green_ratio_bracket(n);
        const double r = green_comparison_ratio_kappa(k, n, cfg);
        EXPECT_GE(r, b.lo * (1 - 1e-10)) << n << " " << k;
        EXPECT_LE(r, b.hi * (1 + 1e-9)) << n << " " << k;
    }
    EXPECT_NEAR(green_ratio_bracket(2).hi, 2 * kPi, 1e-12);
    EXPECT_NEAR(green_ratio_bracket(5).lo, std::sqrt(kPi) * std::erf(1.0), 1e-15);
}

TEST(Poisson, DirectShiftedAndSubordinatedAgree) {
    Rng rng(505);
    for (int i = 0; i < 12; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 5);
        auto [g, gp] = gen::pair(rng, n, gen::PairKind::Generic);
        const auto p = pair_invariants(g, gp);
        const auto cfg = kernel_config(n);
        const auto sh = poisson_shifted(p, 1.0, cfg);
        const auto di = poisson_direct(p, 1.0, cfg);
        const auto sub = poisson_by_subordination(p, cfg);
        EXPECT_GT(sh.value, 0.0);
        EXPECT_NEAR(di.value, sh.value, 1e-8 * sh.value);
        EXPECT_NEAR(sub.value, sh.value, 1e-6 * sh.value);
        EXPECT_LT(sh.imag_residue, 1e-8 * sh.value);
        EXPECT_NEAR(poisson_kernel(gp, g, cfg), sh.value, 1e-9 * sh.value);
    }
}

TEST(Poisson, HarmonicInTheUpperHalfSpace) {
    for (int n : {1, 2}) {
        const auto cfg = kernel_config(n);
        const Point g(std::vector<double>(n, 0.3), 0.0);
        Point gp(std::vector<double>(n, -0.2), 0.5);
        const double h = 0.7, d = 3e-3;
        auto P = [&](const Point& q, double hh) { return poisson_h(pair_invariants(g, q), hh, cfg); };
        const double v = P(gp, h);
        const double dhh = (P(gp, h + d) - 2 * v + P(gp, h - d)) / (d * d);
        const double lap = sublaplacian([&](const Point& q) { return P(q, h); }, gp, d);
        EXPECT_NEAR((dhh + lap) / v, 0.0, 1e-4) << n;
    }
}

TEST(Poisson, ScalingIdentity) {
    const auto cfg = kernel_config(3);
    const Point g({0.2, -0.1, 0.5}, 0.3), gp({1.0, 0.4, -0.2}, -0.9);
    const auto p = pair_invariants(g, gp);
    for (double h : {0.1, 0.5, 2.0, 8.0}) {
        const double lhs = poisson_h(p, h, cfg);
        const double rhs = std::pow(h, -5.0) * poisson_kernel(dilate(g, 1 / h), dilate(gp, 1 / h), cfg);
        EXPECT_NEAR(lhs, rhs, 1e-9 * lhs) << h;
    }
}

TEST(Poisson, AsymptoticRegime) {
    const int n = 40;
    const auto cfg = kernel_config(n);
    Point g(std::vector<double>(n, 0.0), 0.0);
    std::vector<double> err;
    for (double U : {5.0, 10.0, 20.0}) {
        Point gp(std::vector<double>(n, 0.0), 0.0);
        gp.x[0] = U;
        err.push_back(std::abs(poisson_kernel(g, gp, cfg) / poisson_asymptotic(g, gp, cfg) - 1));
    }
    EXPECT_LT(err[1], 0.2);
    EXPECT_GT(err[0], err[1]);
    EXPECT_GT(err[1], err[2]);
}

TEST(Poisson, TimeAverageDecaysAtZero) {
    const auto cfg = kernel_config(2);
    const auto p = pair_invariants(Point({0.5, 0.0}, 0.0), Point({-0.2, 0.4}, 0.7));
    const double a2 = poisson_time_average_from(p, 1e-2, cfg);
    const double a3 = poisson_time_average_from(p, 1e-3, cfg);
    EXPECT_GT(a2, 0.0);
    EXPECT_LT(a3, a2 / 5);
    const double gap = half_resolvent_gap(p, 1.0, cfg);
    EXPECT_GT(gap, 0.0);
    EXPECT_LT(gap, 1.0);
}

TEST(KernelErrors, Rejected) {
    const auto cfg = kernel_config(2);
    const Point g({0.0, 0.0}, 0.0);
    EXPECT_THROW(heat_kernel(g, g, 0.0, cfg), NonpositiveScale);
    EXPECT_THROW(heat_kernel(Point({0.0}, 0.0), Point({1.0}, 0.0), 1.0, cfg), DimensionMismatch);
    EXPECT_THROW(poisson_asymptotic(g, g, cfg), SingularPoint);
    EXPECT_THROW(kernel_config(0).validate(), DomainError);
}

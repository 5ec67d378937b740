#include <grushin/balls.hpp>
#include <grushin/mu.hpp>

#include <gtest/gtest.h>

#include "generators.hpp"

#include <cmath>

using namespace grushin;

namespace {

double kw(double diff2, double sum2, double r) {
    return diff2 < r * r ? 0.5 * std::sqrt((r * r - diff2) * (r * r + sum2)) : 0.0;
}

QuadratureSpec tight(double rel) {
    QuadratureSpec q;
    q.rel_tol = rel;
    q.abs_tol = 1e-15;
    return q;
}

// |B_K((x, 0), r)| for n = 2 in polar coordinates around x.
double bk_polar_2d(double xn, double r) {
    auto ring = [&](double rho) {
        return integrate_1d(
                   [&](double t) {
                       const double sum2 = 4 * xn * xn + 4 * xn * rho * std::cos(t) + rho * rho;
                       return 2 * kw(rho * rho, sum2, r);
                   },
                   0.0, 2 * kPi, tight(1e-11))
                   .value *
               rho;
    };
    return integrate_1d(ring, 0.0, r, tight(1e-10)).value;
}

// Half height of the CC ball over x', found by bisection on d_CC itself.
double cc_height_by_bisection(double x, double xp, double r) {
    const Point c({x}, 0.0);
    if (std::abs(xp - x) >= r) return 0.0;
    double lo = 0.0, hi = r * r;
    while (d_CC(c, Point({xp}, hi)) < r) hi *= 2;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (d_CC(c, Point({xp}, mid)) < r ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

TEST(Membership, KMatchesClosedForm) {
    Rng rng(401);
    for (int i = 0; i < 5000; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 5);
        auto [g, gp] = gen::any_pair(rng, n);
        const double r = gen::log_uniform(rng, 0.1, 10);
        BallSpec b{Metric::K, g, r};
        EXPECT_EQ(in_ball(b, gp), in_ball_K_closed_form(g, r, gp)) << "dK=" << d_K(g, gp) << " r=" << r;
    }
}

TEST(Membership, CCBallInsideKBall) {
    Rng rng(402);
    for (int i = 0; i < 3000; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        auto [g, gp] = gen::any_pair(rng, n);
        const double r = gen::log_uniform(rng, 0.1, 10);
        if (in_ball(BallSpec{Metric::CC, g, r}, gp)) EXPECT_TRUE(in_ball(BallSpec{Metric::K, g, r}, gp));
    }
}

TEST(Membership, HalfWidthsBoundTheBalls) {
    Rng rng(403);
    for (int i = 0; i < 1000; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        Point g(gen::vec(rng, n, rng.uniform(0, 2)), 0.0);
        Point gp(gen::in_ball(rng, n, 0.99), 0.0);
        for (int k = 0; k < n; ++k) gp.x[k] += g.x[k];
        const auto p = pair_invariants(g, gp);
        const double hk = k_half_width(p.diff2, p.sum2, 1.0);
        const double hc = cc_half_width(p.R2, p.diff2, p.sum2, p.xdot, 1.0);
        EXPECT_LE(hc, hk * (1 + 1e-12));
        gp.u = hk * (1 - 1e-9);
        EXPECT_LT(d_K(g, gp), 1.0);
        gp.u = hk * (1 + 1e-9);
        EXPECT_GT(d_K(g, gp), 1.0);
        gp.u = hc;
        EXPECT_NEAR(d_CC(g, gp), 1.0, 1e-9);
    }
}

TEST(Volume, OriginClosedForm) {
    for (int n = 1; n <= 12; ++n)
        for (double r : {0.5, 1.0, 3.0}) {
            const auto v = volume_BK_exact(0.0, n, r);
            EXPECT_NEAR(v.value / volume_BK_origin(n, r), 1.0, 1e-8) << n << " " << r;
            EXPECT_TRUE(v.converged);
        }
    // n = 1: |S^0| B(1/4, 3/2) / 4.
    EXPECT_NEAR(volume_BK_origin(1, 1.0), 2 * std::exp(log_beta(0.25, 1.5)) / 4, 1e-14);
}

TEST(Volume, OneDimensionalOracle) {
    for (double x : {0.0, 0.3, 1.0, 4.0})
        for (double r : {0.5, 1.0, 2.0}) {
            const double ref = integrate_1d([&](double xp) { return 2 * kw((xp - x) * (xp - x), (xp + x) * (xp + x), r); },
                                            x - r, x + r, tight(1e-12))
                                   .value;
            EXPECT_NEAR(volume_BK_exact(x, 1, r).value / ref, 1.0, 1e-8) << x << " " << r;
        }
}

TEST(Volume, TwoDimensionalPolarOracle) {
    for (double x : {0.0, 0.4, 2.5}) {
        const double ref = bk_polar_2d(x, 1.0);
        EXPECT_NEAR(volume_BK_exact(x, 2, 1.0).value / ref, 1.0, 1e-7) << x;
    }
}

TEST(Volume, CCOneDimensionalOracle) {
    for (double x : {0.0, 0.5, 2.0}) {
        const double ref =
            integrate_1d([&](double xp) { return 2 * cc_height_by_bisection(x, xp, 1.0); }, x - 1, x + 1, tight(1e-8))
                .value;
        EXPECT_NEAR(volume_BCC_exact(x, 1).value / ref, 1.0, 1e-6) << x;
    }
}

TEST(VolumeProperty, DilationAndBracket) {
    Rng rng(404);
    for (int i = 0; i < 60; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 10);
        const double x = gen::log_uniform(rng, 1e-3, 10);
        const double r = gen::log_uniform(rng, 0.05, 20);
        const double v = volume_BK_exact(x, n, r).value;
        const double v1 = volume_BK_exact(x / r, n, 1.0).value;
        EXPECT_NEAR(v / (std::pow(r, n + 2) * v1), 1.0, 1e-8);
        const auto br = volume_BK_bracket(x, n, r);
        EXPECT_LE(br.lower, v);
        EXPECT_GE(br.upper, v);
    }
}

TEST(VolumeProperty, CCBelowK) {
    Rng rng(405);
    for (int i = 0; i < 30; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 6);
        const double x = rng.uniform() < 0.2 ? 0.0 : gen::log_uniform(rng, 1e-2, 5);
        const double cc = volume_BCC_exact(x, n).value;
        const double k = volume_BK_exact(x, n, 1.0).value;
        EXPECT_LE(cc, k * (1 + 1e-9));
        EXPECT_GE(cc, 0.5 * k);
    }
}

TEST(MonteCarlo, AgreesWithQuadrature) {
    for (auto [n, x] : {std::pair{1, 0.0}, std::pair{2, 0.7}, std::pair{4, 1.5}}) {
        Point c(std::vector<double>(n, 0.0), 0.3);
        c.x[0] = x;
        MonteCarloOptions opt;
        opt.samples = 200000;
        opt.seed = 17;
        const auto shared = volume_monte_carlo_shared(c, 1.0, opt);
        const double k = volume_BK_exact(x, n, 1.0).value;
        const double cc = volume_BCC_exact(x, n).value;
        EXPECT_LT(std::abs(shared.k.value - k), 4 * shared.k.error) << n;
        EXPECT_LT(std::abs(shared.cc.value - cc), 4 * shared.cc.error) << n;
        EXPECT_EQ(shared.cc_not_k, 0);
    }
}

TEST(MonteCarlo, ReproducibleAndJobIndependent) {
    BallSpec b{Metric::K, Point({0.5, -0.2}, 1.0), 1.0};
    MonteCarloOptions a;
    a.samples = 100000;
    a.seed = 9;
    MonteCarloOptions c = a;
    c.jobs = 3;
    const auto ra = volume_monte_carlo(b, a), rb = volume_monte_carlo(b, a), rc = volume_monte_carlo(b, c);
    EXPECT_EQ(ra.value, rb.value);
    EXPECT_EQ(ra.value, rc.value);
    MonteCarloOptions d = a;
    d.seed = 10;
    EXPECT_NE(ra.value, volume_monte_carlo(b, d).value);
}

TEST(MonteCarlo, EnvelopeContainsKBall) {
    Rng rng(406);
    for (int i = 0; i < 2000; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        Point c(gen::vec(rng, n, 2.0), rng.normal());
        Point gp(gen::in_ball(rng, n, 1.0), 0.0);
        for (int k = 0; k < n; ++k) gp.x[k] += c.x[k];
        const auto p = pair_invariants(c, gp);
        EXPECT_LE(k_half_width(p.diff2, p.sum2, 1.0), envelope_half_height(std::sqrt(norm2(c.x)), 1.0) * (1 + 1e-12));
    }
}

TEST(Theta0, ResidualAndJ) {
    Rng rng(407);
    for (int i = 0; i < 2000; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 5);
        const auto x = gen::vec(rng, n, gen::log_uniform(rng, 1e-2, 5));
        const auto z = gen::in_ball(rng, n, 0.999);
        const double z2 = norm2(z), p = norm2(x) + dot(x, z);
        if (z2 + 2 * p <= 1e-12) continue;
        double t;
        try {
            t = theta0(x, z);
        } catch (const OutOfRange&) {
            continue;
        }
        EXPECT_NEAR(theta0_residual(z2, p, t), 0.0, 1e-12);
        EXPECT_GT(J_value(x, z), 0.2 * (1 + std::sqrt(norm2(x))) * std::sqrt(1 - z2));
    }
}

TEST(EF1, PositiveMinimum) {
    for (int n : {1, 3, 8}) {
        Point g(std::vector<double>(n, 0.0), 0.0);
        const auto rep = check_EF1(g, 2000, 5);
        EXPECT_EQ(rep.samples, 2000);
        EXPECT_GT(rep.min_ratio, 0.01);
    }
}

TEST(BallErrors, Rejected) {
    EXPECT_THROW(volume_BK_exact(0.0, 0, 1.0), DomainError);
    EXPECT_THROW(volume_BK_exact(0.0, 2, 0.0), NonpositiveScale);
    EXPECT_THROW(volume_BK_exact(-1.0, 2, 1.0), DomainError);
    EXPECT_THROW(in_ball(BallSpec{Metric::K, Point({0.0}, 0.0), 1.0}, Point({0.0, 1.0}, 0.0)), DimensionMismatch);
    EXPECT_THROW((BallSpec{Metric::K, Point({0.0}, 0.0), -1.0}.validate()), DomainError);
    EXPECT_THROW(theta0({0.0}, {1.5}), DomainError);
    MonteCarloOptions o;
    o.samples = 0;
    EXPECT_THROW(volume_monte_carlo(BallSpec{Metric::K, Point({0.0}, 0.0), 1.0}, o), DomainError);
}

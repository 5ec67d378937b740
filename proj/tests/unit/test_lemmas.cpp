#include <grushin/lemmas.hpp>
#include <grushin/numerics.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace grushin;
using namespace grushin::lemma;

namespace {

double mu_direct(double r, double w) {
    const double s = std::sin(w), c = std::cos(w);
    return w / (s * s) - c / s + r * (1 - w * c / s) / s;
}

double psi_direct(double r, double w) {
    const double q = w / std::sin(w);
    return q * q * (1 - r * std::cos(w));
}

}  // namespace

TEST(Lemmas, BuildingBlocksMatchDefinitions) {
    for (double r : {-1.0, -0.4, 0.0, 0.6, 1.0})
        for (double w = 0.1; w < 3.0; w += 0.05) {
            EXPECT_NEAR(Psi(r, w), psi_direct(r, w), 1e-12 * std::abs(psi_direct(r, w)));
            EXPECT_NEAR(Phi(r, w), psi_direct(r, w) + r, 1e-11 * (1 + std::abs(Phi(r, w))));
            const double g1 = psi_direct(r, w) + r - mu_direct(r, w);
            const double g2 = psi_direct(r, w) + r + mu_direct(r, w);
            const double tol = 1e-10 * (1 + std::abs(g1 * g2)) * (w > 2.5 ? 1e3 : 1.0);
            EXPECT_NEAR(G(r, w), g1 * g2, tol) << r << " " << w;
            EXPECT_NEAR(G(r, w), G_direct(r, w), tol);
            EXPECT_NEAR(G1(r, w) * G2(r, w), G(r, w), 1e-12 * G(r, w));
        }
}

TEST(Lemmas, ValuesAtZero) {
    for (double r : {-1.0, 0.0, 0.5, 1.0}) {
        EXPECT_NEAR(Psi(r, 0.0), 1 - r, 1e-15);
        EXPECT_NEAR(Phi(r, 0.0), 1.0, 1e-15);
        EXPECT_NEAR(G(r, 0.0), 1.0, 1e-15);
    }
    EXPECT_NEAR(taylor_ratio(0.0), 1.0 / 6.0, 1e-16);
    EXPECT_NEAR(Z2(0.0), 1.0, 1e-15);
}

TEST(Lemmas, ZFunctionsAreGOnTheEdges) {
    for (double y = 0.01; y < kPi / 4; y += 0.01) {
        EXPECT_NEAR(Z1(y), G(-1.0, 2 * y), 1e-11 * G(-1.0, 2 * y));
        EXPECT_NEAR(Z2(y), G(1.0, 2 * y), 1e-11 * G(1.0, 2 * y));
    }
    for (double y = kPi / 4; y < kPi / 2 - 0.01; y += 0.01) EXPECT_NEAR(Z1(y), G(-1.0, 2 * y), 1e-10 * G(-1.0, 2 * y));
}

TEST(Lemmas, RDerivativesAreSlopes) {
    for (double w = 0.05; w < 3.1; w += 0.05) {
        EXPECT_NEAR(dG1_dr(w), (G1(1.0, w) - G1(-1.0, w)) / 2, 1e-10 * (1 + std::abs(dG1_dr(w))));
        EXPECT_NEAR(dG2_dr(w), (G2(1.0, w) - G2(-1.0, w)) / 2, 1e-10 * (1 + std::abs(dG2_dr(w))));
        const double s = std::sin(w);
        EXPECT_NEAR(K_fn(w), s * s * dG1_dr(w), 1e-12 * (1 + std::abs(K_fn(w))));
    }
    EXPECT_LT(dG1_dr(1.0), 0.0);
    EXPECT_GT(dG1_dr(2.0), 0.0);
}

TEST(Lemmas, XiAtHalfPi) { EXPECT_NEAR(Xi(kPi / 2), 2.0 / kPi, 1e-15); }

TEST(Lemmas, TSeriesAndDirectAgree) {
    auto direct = [](double w) { return w * w + 0.5 * w * std::sin(2 * w) - 2 * std::sin(w) * std::sin(w); };
    for (double w = 0.3; w < 3.1; w += 0.1) EXPECT_NEAR(T(w), direct(w), 1e-13 * (1 + direct(w)));
    // Leading term 2 w^6 / 45.
    for (double w : {1e-3, 1e-2, 0.05}) EXPECT_NEAR(T(w) / (2 * std::pow(w, 6) / 45), 1.0, w * w);
    // Just either side of the series switch.
    EXPECT_NEAR(T(0.2999999) / T(0.3000001), 1.0, 1e-5);
}

TEST(Lemmas, VMatchesDefinition) {
    for (double h = 0.0; h < 1.6; h += 0.1)
        EXPECT_NEAR(V(h), h * h * h + h * std::cos(h) - std::sin(h), 1e-15);
}

TEST(Lemmas, ZStarDerivative) {
    for (double y = 0.05; y < 1.55; y += 0.05) {
        const double h = 1e-5;
        const double fd = (z_star(y + h) - z_star(y - h)) / (2 * h);
        EXPECT_NEAR(z_star_prime(y), fd, 1e-6 * (1 + std::abs(fd))) << y;
        EXPECT_NEAR(z_star_prime(y), z_star_prime_direct(y), 1e-9 * (1 + std::abs(fd))) << y;
    }
}

TEST(LemmaProperty, GAtLeastOne) {
    Rng rng(301);
    for (int i = 0; i < 20000; ++i) {
        const double r = rng.uniform(-1, 1);
        const double w = rng.uniform(0, kPi - 1e-3);
        EXPECT_GE(G(r, w), 1.0 - 1e-9) << r << " " << w;
    }
}

TEST(LemmaProperty, ChainAndTaylorRatio) {
    Rng rng(302);
    for (int i = 0; i < 5000; ++i) {
        const double y = rng.uniform(1e-6, kPi - 1e-6);
        EXPECT_GT(chain_gap(y), 0.0);
        const double t = taylor_ratio(y);
        EXPECT_LT(t, 1.0 / 6.0);
        EXPECT_GT(t, 1.0 / kPi / kPi / kPi * (kPi - std::sin(kPi)) - 1e-15);
    }
}

TEST(Sweeps, AllPassAtDefaultResolution) {
    for (const auto& rep : run_all_sweeps()) {
        EXPECT_TRUE(rep.passed()) << rep.name << " violations=" << rep.violations << " min=" << rep.min_value;
        EXPECT_GT(rep.evaluated, 0);
    }
}

TEST(Sweeps, DetectsViolationsAndEmptyGrids) {
    const auto bad = sweep_1d("neg", [](double x) { return x - 0.5; }, Grid1D{0.0, 1.0, 11}, 0.0, 0.0, true);
    EXPECT_EQ(bad.violations, 6);  // 0.0 .. 0.5 inclusive
    EXPECT_FALSE(bad.passed());
    EXPECT_NEAR(bad.min_value, -0.5, 1e-15);

    const auto open = sweep_1d("open", [](double x) { return x; }, Grid1D{0.0, 1.0, 10, true, true}, 0.0, 0.0, true);
    EXPECT_TRUE(open.passed());

    const auto empty = sweep_1d("empty", [](double x) { return x; }, Grid1D{0.0, 1.0, 0}, 0.0, 0.0, false);
    EXPECT_FALSE(empty.valid);
    EXPECT_FALSE(empty.passed());
}

TEST(Sweeps, SameResultForAnyJobCount) {
    SweepOptions a, b;
    a.jobs = 1;
    b.jobs = 3;
    const auto ra = sweep(SweepId::G, a), rb = sweep(SweepId::G, b);
    EXPECT_EQ(ra.min_value, rb.min_value);
    EXPECT_EQ(ra.argmin, rb.argmin);
    EXPECT_EQ(ra.violations, rb.violations);
}

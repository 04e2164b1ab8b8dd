#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "suites.hpp"
#include "wsv/error.hpp"
#include "wsv/gronwall.hpp"
#include "wsv/special.hpp"

using namespace wsv;

namespace {

GronwallProblem constant_problem(double t_end, std::size_t n, double h, double l, double theta,
                                 double nu, double q) {
    const GridSpec spec(t_end, n, h);
    return GronwallProblem{GridFunction::constant(spec, l), GridFunction::constant(spec, theta), nu, q};
}

}  // namespace

TEST(StepConstantK1, UnitL) {
    const GridFunction one = GridFunction::constant(GridSpec(1.0, 100), 1.0);
    EXPECT_NEAR(step_constant_k1(one, 0.75, 2.0), std::sqrt(M_PI), 1e-10 * std::sqrt(M_PI));
    EXPECT_EQ(step_constant_k1(GridFunction(GridSpec(1.0, 100)), 0.75, 2.0), 0.0);
}

TEST(StepConstantK1, LinearLAgainstQuadrature) {
    const GridSpec spec(1.0, 4096);
    const GridFunction s = GridFunction::sample(spec, [](double t) { return t; });
    const double q = 3.0;
    const double nu = 0.6;
    const double a = (nu * q - 1.0) / (q - 1.0);
    const double norm = std::cbrt(oracle::smooth_integral([](double t) { return t * t * t; }, 0.0, 1.0));
    const double ref = norm * std::pow(oracle::beta_integral(a, a), (q - 1.0) / q);
    EXPECT_NEAR(step_constant_k1(s, nu, q), ref, 1e-6 * ref);
}

TEST(StepConstantK1, RequiresQAboveOneOverNu) {
    const GridFunction one = GridFunction::constant(GridSpec(1.0, 10), 1.0);
    try {
        step_constant_k1(one, 0.5, 2.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Hypothesis);
    }
}

TEST(ComparisonConstant, Examples) {
    EXPECT_EQ(comparison_constant(0.5, 0.75, 1.0), 1.0);
    EXPECT_NEAR(comparison_constant(0.5, 0.75, 4.0), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(comparison_constant(0.5, 0.5, 1.0), Error);
}

TEST(ComparisonConstant, DominatesOnSamples) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double nu = 0.05 + 0.9 * u(rng);
        const double nu1 = nu + (1.0 - nu) * u(rng) + 1e-3;
        const double t_end = 0.1 + 5.0 * u(rng);
        const double c = comparison_constant(nu, nu1, t_end);
        for (int k = 0; k < 1000; ++k) {
            const double d = t_end * (k + 1) / 1000.0;
            EXPECT_GE(c * std::pow(d, nu - 1.0) - std::pow(d, nu1 - 1.0), -1e-12 * std::pow(d, nu - 1.0));
        }
    }
}

TEST(ImprovedExponent, ExceedsNu) {
    for (double nu : {0.3, 0.5, 0.9}) {
        EXPECT_GT(improved_exponent(nu, 1.01 / nu), nu);
    }
}

TEST(ResolventMajorant, ZeroKernel) {
    const GronwallProblem p = constant_problem(1.0, 50, 0.5, 0.0, 1.5, 0.5, 3.0);
    const GridFunction m = resolvent_majorant(p);
    for (std::size_t i = 0; i <= 50; ++i) {
        EXPECT_EQ(m.at(i), 1.5);
    }
}

TEST(ResolventMajorant, AbelCase) {
    const GronwallProblem p = constant_problem(1.0, 2000, 1.0, 1.0, 1.0, 0.5, 3.0);
    const GridFunction m = resolvent_majorant(p);
    const double ref = mittag_leffler_half(std::sqrt(M_PI));
    EXPECT_NEAR(m.at(2000), ref, 1e-3 * ref);
    EXPECT_NEAR(m.at(2000), oracle::abel_solution(1.0), 1e-3 * ref);
}

TEST(ResolventMajorant, DelayInactiveBeforeH) {
    const GridFunction a = resolvent_majorant(constant_problem(1.0, 400, 0.5, 1.0, 1.0, 0.5, 3.0));
    const GridFunction b = resolvent_majorant(constant_problem(1.0, 400, 1.0, 1.0, 1.0, 0.5, 3.0));
    for (std::size_t i = 0; i <= 200; ++i) {
        EXPECT_NEAR(a.at(i), b.at(i), 1e-10 * b.at(i));
    }
}

TEST(ResolventMajorant, MonotoneInL) {
    GronwallProblem p = suites::random_gronwall(1, 128);
    const GridFunction m1 = resolvent_majorant(p);
    p.L = p.L + GridFunction::constant(p.spec(), 0.1);
    const GridFunction m2 = resolvent_majorant(p);
    for (std::size_t i = 0; i <= 128; ++i) {
        EXPECT_GE(m2.at(i), m1.at(i));
    }
}

TEST(Lemma1Constant, ZeroKernel) {
    const GridSpec spec(1.0, 40);
    EXPECT_EQ(lemma1_constant(GridFunction(spec), 0.5, 3.0, spec), 0.0);
}

TEST(Lemma1Constant, StableUnderRefinement) {
    const GridSpec coarse(1.0, 200);
    const GridSpec fine(1.0, 400);
    const double k200 = lemma1_constant(GridFunction::constant(coarse, 1.0), 0.5, 3.0, coarse);
    const double k400 = lemma1_constant(GridFunction::constant(fine, 1.0), 0.5, 3.0, fine);
    EXPECT_GT(k200, 0.0);
    EXPECT_LT(std::abs(k400 - k200) / k200, 0.05);
}

TEST(Lemma1Constant, NondecreasingInScale) {
    const GridSpec spec(1.0, 150);
    double prev = 0.0;
    for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
        const double k = lemma1_constant(GridFunction::constant(spec, lambda), 0.6, 2.0, spec);
        EXPECT_GE(k, prev);
        prev = k;
    }
}

TEST(Lemma1Constant, MatchesTruncatedNeumannSeries) {
    // Dense oracle: R = sum_{m>=1} A^m summed until the terms vanish.
    const std::size_t n = 24;
    const GridSpec spec(1.0, n);
    std::mt19937_64 rng(17);
    const GridFunction L = suites::random_piecewise_linear(spec, rng, 0.2, 1.5);
    const SingularWeights w(spec, 0.5);
    std::vector<std::vector<double>> A(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            A[i][j] = w.weight(i, j) * L.at(j);
        }
    }
    auto R = A;
    auto power = A;
    for (int m = 2; m < 200; ++m) {
        std::vector<std::vector<double>> next(n + 1, std::vector<double>(n + 1, 0.0));
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t k = 0; k <= i; ++k) {
                for (std::size_t j = 0; j <= k; ++j) {
                    next[i][j] += power[i][k] * A[k][j];
                }
            }
        }
        power = next;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                R[i][j] += power[i][j];
            }
        }
    }
    double ratio = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            ratio = std::max(ratio, R[i][j] / A[i][j]);
        }
    }
    EXPECT_NEAR(lemma1_constant(L, 0.5, 3.0, spec), ratio, 1e-12 * ratio);
}

TEST(Lemma1Constant, DivergentDiagonal) {
    const GridSpec spec(1.0, 4);
    try {
        lemma1_constant(GridFunction::constant(spec, 1e3), 0.5, 3.0, spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Divergence);
    }
}

TEST(ThetaN, ReducesToThetaBeforeH) {
    for (std::size_t k = 0; k < 6; ++k) {
        const GronwallProblem p = suites::random_gronwall(k, 128);
        const GridFunction tn = theta_n(p, 3.7);
        const std::size_t m = p.spec().delay_steps();
        for (std::size_t i = 0; i <= m; ++i) {
            EXPECT_EQ(tn.at(i), p.theta.at(i));
        }
    }
}

TEST(ThetaN, ZeroKernel) {
    const GronwallProblem p = constant_problem(1.0, 64, 0.25, 0.0, 0.7, 0.5, 3.0);
    const GridFunction tn = theta_n(p, 10.0);
    for (std::size_t i = 0; i <= 64; ++i) {
        EXPECT_EQ(tn.at(i), 0.7);
    }
}

TEST(ThetaN, HandIntegratedExample) {
    const GronwallProblem p = constant_problem(1.0, 256, 0.5, 1.0, 1.0, 0.5, 3.0);
    const GridFunction tn = theta_n(p, 1.0);
    for (std::size_t i = 129; i <= 256; ++i) {
        const double t = p.spec().horizon_time(i);
        EXPECT_NEAR(tn.at(i), 1.0 + 4.0 * std::sqrt(t - 0.5), 1e-12);
    }
    EXPECT_NEAR(tn.at(256), 1.0 + 4.0 * std::sqrt(0.5), 1e-12);
}

TEST(GronwallBound, ZeroKernelMarginVanishes) {
    const GronwallProblem p = constant_problem(1.0, 64, 0.25, 0.0, 1.0, 0.5, 3.0);
    const BoundReport r = gronwall_bound(p, 0.0);
    for (std::size_t i = 0; i <= 64; ++i) {
        EXPECT_EQ(r.bound.at(i), 1.0);
        EXPECT_EQ(r.majorant.at(i), 1.0);
        EXPECT_EQ(r.margin.at(i), 0.0);
    }
    EXPECT_TRUE(certify(p).pass);
}

TEST(GronwallBound, DominatesMittagLeffler) {
    const GronwallProblem p = constant_problem(1.0, 400, 1.0, 1.0, 1.0, 0.5, 3.0);
    const BoundReport r = gronwall_bound(p, 0.0);
    for (std::size_t i = 0; i <= 400; ++i) {
        const double t = p.spec().horizon_time(i);
        EXPECT_GE(r.bound.at(i), oracle::abel_solution(t) * (1.0 - 1e-3));
    }
    EXPECT_EQ(r.n, 1u);
    EXPECT_GE(r.k, r.k0);
}

TEST(GronwallBound, ConstantsConsistent) {
    const GronwallProblem p = suites::random_gronwall(4, 128);
    const BoundReport r = gronwall_bound(p, 0.0);
    EXPECT_GT(r.nu1, p.nu);
    EXPECT_GE(r.k, r.k1);
    EXPECT_EQ(r.n, static_cast<std::size_t>(std::floor(1.0 / p.delay() + 1e-12)));
    EXPECT_EQ(r.k_steps.size(), r.n + 2);
    EXPECT_EQ(r.k, *std::max_element(r.k_steps.begin(), r.k_steps.end()));
}

TEST(GronwallBound, MonotoneInTheta) {
    GronwallProblem p = suites::random_gronwall(2, 128);
    const BoundReport a = gronwall_bound(p, 0.0);
    p.theta = p.theta + GridFunction::constant(p.spec(), 0.3);
    const BoundReport b = gronwall_bound(p, a.k, KPolicy::Exact);
    for (std::size_t i = 0; i <= 128; ++i) {
        EXPECT_GE(b.bound.at(i), a.bound.at(i));
    }
}

TEST(Certify, RandomSuitePasses) {
    for (std::size_t k = 0; k < 6; ++k) {
        const Certification c = certify(suites::random_gronwall(k, 128));
        EXPECT_TRUE(c.pass) << "problem " << k << " min margin " << c.report.min_margin();
    }
}

TEST(Certify, AdversarialSpike) {
    GronwallProblem p = suites::random_gronwall(3, 128);
    std::vector<double> v(p.theta.values().begin(), p.theta.values().end());
    v[p.spec().origin() + 77] = 500.0;
    p.theta = GridFunction(p.spec(), v);
    EXPECT_TRUE(certify(p).pass);
}

TEST(Certify, ForcedZeroConstantFails) {
    const GronwallProblem p = constant_problem(1.0, 64, 0.5, 1.0, 1.0, 0.5, 3.0);
    const Certification c = certify_with(p, 0.0, KPolicy::Exact);
    EXPECT_FALSE(c.pass);
    EXPECT_EQ(c.report.k, 0.0);
}

TEST(GronwallProblem, Validation) {
    EXPECT_THROW(resolvent_majorant(constant_problem(1.0, 8, 0.0, 1.0, 1.0, 0.5, 3.0)), Error);
    EXPECT_THROW(resolvent_majorant(constant_problem(1.0, 8, 0.5, -1.0, 1.0, 0.5, 3.0)), Error);
    try {
        certify(constant_problem(1.0, 8, 0.5, 1.0, 1.0, 0.5, 2.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Hypothesis);
    }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wsv/cases.hpp"
#include "wsv/error.hpp"

using namespace wsv;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected wsv::Error";
    return ErrorKind::Evaluation;
}

// Offset grid on [0, T] with 1 strictly between nodes.
GridSpec offset_grid(std::size_t n, double h) {
    const double t_end = 1.0 + 0.5 / static_cast<double>(n);
    const double dt = t_end / static_cast<double>(n);
    return GridSpec(t_end, n, std::round(h / dt) * dt);
}

}  // namespace

TEST(Rational, Parse) {
    EXPECT_EQ(Rational::parse("2/3"), Rational(2, 3));
    EXPECT_EQ(Rational::parse("-4/6"), Rational(-2, 3));
    EXPECT_EQ(Rational::parse("0.75"), Rational(3, 4));
    EXPECT_EQ(Rational::parse("-1.5e-2"), Rational(-3, 200));
    EXPECT_EQ(Rational::parse("7"), Rational(7));
    EXPECT_EQ(Rational::parse("1/3").str(), "1/3");
    EXPECT_EQ(Rational(6, -4).str(), "-3/2");
    EXPECT_EQ(kind_of([] { Rational::parse("abc"); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { Rational::parse("1/0"); }), ErrorKind::Parameter);
}

TEST(Rational, Arithmetic) {
    EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
    EXPECT_EQ(Rational(1, 2) - Rational(1, 3), Rational(1, 6));
    EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
    EXPECT_EQ(Rational(1) / Rational(2, 3), Rational(3, 2));
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
    EXPECT_EQ(kind_of([] { (void)(Rational(1) / Rational(0)); }), ErrorKind::Parameter);
}

TEST(AdmissibleP, DefaultParameters) {
    const PInterval iv = admissible_p_interval(ExampleParams{});
    EXPECT_EQ(iv.lo, Rational(3, 2));
    EXPECT_EQ(iv.hi, Rational(3));
    EXPECT_FALSE(iv.hi_infinite);
    EXPECT_EQ(iv.lo_value(), 1.5);
    EXPECT_EQ(iv.hi_value(), 3.0);
}

TEST(AdmissibleP, SigmaLimitsUpperEnd) {
    ExampleParams p;
    p.nu_e = Rational(4, 5);
    p.sigma_e = Rational(1, 2);
    const PInterval iv = admissible_p_interval(p);
    EXPECT_EQ(iv.lo, Rational(5, 4));
    EXPECT_EQ(iv.hi, Rational(2));
}

TEST(AdmissibleP, UnboundedAbove) {
    ExampleParams p;
    p.beta_e = Rational(2, 3);
    p.delta_e = Rational(2, 3);
    const PInterval iv = admissible_p_interval(p);
    EXPECT_TRUE(iv.hi_infinite);
    EXPECT_TRUE(std::isinf(iv.hi_value()));
}

TEST(AdmissibleP, Errors) {
    ExampleParams p;
    p.nu_e = Rational(1, 3);
    EXPECT_EQ(kind_of([&] { admissible_p_interval(p); }), ErrorKind::Hypothesis);
    p = ExampleParams{};
    p.beta_e = Rational(3, 2);
    EXPECT_EQ(kind_of([&] { admissible_p_interval(p); }), ErrorKind::Parameter);
}

TEST(LowerBound, ClosedForm) {
    const ExampleParams p;
    EXPECT_NEAR(lower_bound_integral(p, 1e-3), 27.0, 1e-12);
    EXPECT_NEAR(lower_bound_integral(p, 1.0), 0.0, 1e-15);
    ExampleParams log_case;
    log_case.delta_e = Rational(5, 6);
    EXPECT_NEAR(lower_bound_integral(log_case, 1e-2), std::log(100.0), 1e-14);
    EXPECT_EQ(kind_of([&] { lower_bound_integral(p, 0.0); }), ErrorKind::Domain);
}

TEST(Example, RejectsGridThroughSingularity) {
    EXPECT_EQ(kind_of([] { example_problem(ExampleParams{}, GridSpec(2.0, 8), 2.0); }),
              ErrorKind::Parameter);
}

TEST(Example, EnvelopeHolds) {
    const GridSpec spec = offset_grid(100, 0.25);
    for (double gamma : {1.0, 0.5}) {
        ExampleParams params;
        params.gamma_e = gamma;
        const VolterraProblem prob = example_problem(params, spec, 2.0);
        const double zero[1] = {0.0};
        double out[1];
        for (std::size_t i = 0; i <= 100; ++i) {
            for (std::size_t j = 0; j <= 100; ++j) {
                const double t = spec.horizon_time(i);
                const double s = spec.horizon_time(j);
                prob.kernel.kappa(t, s, zero, zero, zero, out);
                EXPECT_LE(out[0], prob.kernel.L0.at(j) * (1.0 + 1e-12));
            }
        }
        const HypothesisSample h = sample_hypotheses(prob.kernel, 4000, 21);
        EXPECT_LE(h.growth_ratio, 1.0 + 1e-12);
        EXPECT_LE(h.lipschitz_ratio, 1.0 + 1e-12);
        EXPECT_LE(h.combined_ratio, 1.0 + 1e-12);
    }
}

TEST(Example, ContinuousFreeTerm) {
    const GridSpec spec = offset_grid(64, 0.25);
    const VolterraProblem prob = example_problem(ExampleParams{}, spec, 2.0);
    for (std::size_t i = 0; i <= 64; ++i) {
        EXPECT_EQ(prob.zeta.at(i)[0], 1.0);
    }
    ExampleParams rough;
    rough.sigma_e = Rational(1, 2);
    const VolterraProblem q = example_problem(rough, spec, 2.0);
    EXPECT_GT(q.zeta.at(64)[0], 10.0);
}

TEST(Example, SolutionStaysAboveFreeTerm) {
    const double dt = 0.9 / 512.0;
    const GridSpec spec(0.9, 512, std::round(0.25 / dt) * dt);
    const Solution sol = picard_solve(example_problem(ExampleParams{}, spec, 2.0));
    for (std::size_t i = 0; i <= 512; ++i) {
        EXPECT_GE(sol.xi.at(i)[0], 1.0);
    }
}

namespace {

// xi(1 - eps) for eps = 0.1, 0.01, 0.001: returns the ratio of successive increments.
double decade_increment_ratio(const ExampleParams& params) {
    double v[3];
    const double cutoffs[3] = {0.1, 0.01, 0.001};
    for (int k = 0; k < 3; ++k) {
        const double t_end = 1.0 - cutoffs[k];
        const double dt = t_end / 4096.0;
        const GridSpec spec(t_end, 4096, std::round(0.25 / dt) * dt);
        v[k] = picard_solve(example_problem(params, spec, 2.0)).xi.at(4096)[0];
    }
    return (v[2] - v[1]) / (v[1] - v[0]);
}

}  // namespace

TEST(Example, IncrementsContractWhenLowerBoundConverges) {
    // nu_e + beta_e + delta_e > 2: the tail behaves like eps^{1/6}, ratio about 10^{-1/6}.
    ExampleParams params;
    params.delta_e = Rational(1);
    EXPECT_LT(decade_increment_ratio(params), 0.8);
    EXPECT_GT(decade_increment_ratio(ExampleParams{}), 1.5);
    EXPECT_EQ(kind_of([&] { blowup_diagnostic(params, default_cutoffs(2), 64); }),
              ErrorKind::Hypothesis);
}

TEST(Blowup, DefaultParameters) {
    const BlowupReport r = blowup_diagnostic(ExampleParams{}, default_cutoffs(), 1024);
    ASSERT_EQ(r.rows.size(), 6u);
    EXPECT_NEAR(r.exponent, 4.0 / 3.0, 1e-15);
    EXPECT_TRUE(r.lower_bound_diverges);
    EXPECT_TRUE(r.monotone);
    EXPECT_TRUE(r.dominated);
    for (const BlowupRow& row : r.rows) {
        EXPECT_GE(row.xi_near_1, 1.0 + row.lower_bound);
    }
    EXPECT_EQ(r.verdict.rfind("discontinuous", 0), 0u);
}

TEST(Blowup, WorkersDoNotChangeRows) {
    const auto cutoffs = default_cutoffs(3);
    const BlowupReport a = blowup_diagnostic(ExampleParams{}, cutoffs, 256);
    const BlowupReport b = blowup_diagnostic(ExampleParams{}, cutoffs, 256, 2.0, 3);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(a.rows[k].xi_near_1, b.rows[k].xi_near_1);
    }
}

TEST(Blowup, Preconditions) {
    ExampleParams rough;
    rough.sigma_e = Rational(1, 2);
    EXPECT_EQ(kind_of([&] { blowup_diagnostic(rough, default_cutoffs(2), 64); }),
              ErrorKind::Hypothesis);
    EXPECT_EQ(kind_of([] { blowup_diagnostic(ExampleParams{}, {}, 64); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { blowup_diagnostic(ExampleParams{}, {0.01, 0.1}, 64); }),
              ErrorKind::Parameter);
}

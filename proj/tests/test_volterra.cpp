#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "wsv/error.hpp"
#include "wsv/volterra.hpp"

using namespace wsv;

namespace {

VolterraProblem scalar_problem(const GridSpec& spec, GeneratorKernel kernel, double zeta,
                               double nu = 0.5, double p = 2.0, double control = 0.0) {
    return VolterraProblem{VectorGridFunction(GridFunction::constant(spec, zeta)), std::move(kernel),
                           VectorGridFunction(GridFunction::constant(spec, control)), nu, p};
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected wsv::Error";
    return ErrorKind::Evaluation;
}

}  // namespace

TEST(ContractionWindow, ZeroKernelCoversHorizon) {
    const GridSpec spec(2.0, 16);
    EXPECT_EQ(contraction_window(GridFunction(spec), 0.5, 4.0, 0.5, 2.0), 2.0);
}

TEST(ContractionWindow, ClosedForm) {
    // nu = 1/2, p = 4, eps = 1/2: 2 (4 delta^{1/4})^{2/3} = 0.99.
    const GridSpec spec(1.0, 64);
    const double delta = contraction_window(GridFunction::constant(spec, 1.0), 0.5, 4.0, 0.5, 1.0);
    const double ref = std::pow(std::pow(0.495, 1.5) / 4.0, 4.0);
    EXPECT_NEAR(delta, ref, 1e-10 * ref);
    EXPECT_NEAR(contraction_factor(delta, 0.5, 0.5, 1.0), 0.99, 1e-9);
}

TEST(ContractionWindow, ShrinksWithLargerL) {
    const GridSpec spec(1.0, 64);
    const double d1 = contraction_window(GridFunction::constant(spec, 1.0), 0.6, 2.0, 0.3, 1.0);
    const double d2 = contraction_window(GridFunction::constant(spec, 2.0), 0.6, 2.0, 0.3, 1.0);
    EXPECT_LT(d2, d1);
}

TEST(ContractionWindow, Cases) {
    EXPECT_EQ(classify_exponent(0.5, 3.0), ExponentCase::LargeP);
    EXPECT_EQ(classify_exponent(0.5, 2.0), ExponentCase::ModerateP);
    EXPECT_EQ(classify_exponent(0.5, 1.0), ExponentCase::UnitP);
    const GridFunction one = GridFunction::constant(GridSpec(1.0, 8), 1.0);
    EXPECT_EQ(kind_of([&] { contraction_window(one, 0.5, 3.0, 1.0, 1.0); }), ErrorKind::Hypothesis);
    EXPECT_EQ(kind_of([&] { contraction_window(one, 0.5, 2.0, 0.0, 1.0); }), ErrorKind::Hypothesis);
    EXPECT_EQ(kind_of([&] { contraction_window(one, 0.5, 2.0, 1.0, 1.0); }), ErrorKind::Hypothesis);
    EXPECT_EQ(kind_of([&] { contraction_window(one, 0.5, 1.0, 0.1, 1.0); }), ErrorKind::Hypothesis);
    const ContractionWindow unit = select_contraction_window(one, 0.5, 1.0, 1.0);
    EXPECT_EQ(unit.epsilon, 0.0);
    EXPECT_TRUE(std::isinf(unit.norm_exponent));
    const ContractionWindow large = select_contraction_window(one, 0.5, 3.0, 1.0);
    EXPECT_GT(large.delta, 0.0);
    EXPECT_LT(large.epsilon, 1.0);
}

TEST(PicardSolve, ZeroKernelReturnsZeta) {
    const GridSpec spec(1.0, 32, 0.25);
    const VolterraProblem prob{
        VectorGridFunction(GridFunction::sample(spec, [](double t) { return std::sin(t); })),
        zero_kernel(spec), VectorGridFunction(GridFunction(spec)), 0.5, 2.0};
    const Solution sol = picard_solve(prob);
    for (std::size_t i = 0; i <= 32; ++i) {
        EXPECT_EQ(sol.xi.at(i)[0], prob.zeta.at(i)[0]);
    }
    EXPECT_EQ(sol.delta, 1.0);
}

TEST(PicardSolve, AbelEquation) {
    const GridSpec spec(1.0, 1000);
    const VolterraProblem prob = scalar_problem(spec, linear_kernel(spec, 0.0, 1.0, 0.0), 1.0);
    const Solution sol = picard_solve(prob);
    for (std::size_t i : {250u, 500u, 1000u}) {
        const double ref = oracle::abel_solution(spec.horizon_time(i));
        EXPECT_NEAR(sol.xi.at(i)[0], ref, 1e-4 * ref);
    }
}

TEST(PicardSolve, DelayedEquation) {
    const GridSpec spec(1.0, 64, 0.5);
    const VolterraProblem prob = scalar_problem(spec, delayed_linear_kernel(spec), 1.0);
    const Solution sol = picard_solve(prob);
    EXPECT_NEAR(sol.xi.at(64)[0], 1.0 + std::sqrt(2.0), 1e-13);
    for (std::size_t i = 0; i <= 64; ++i) {
        EXPECT_NEAR(sol.xi.at(i)[0], oracle::delayed_half_solution(spec.horizon_time(i)), 1e-13);
    }
}

TEST(PicardSolve, SmallResidual) {
    const GridSpec spec(1.0, 200, 0.25);
    const VolterraProblem prob =
        scalar_problem(spec, linear_kernel(spec, 0.5, -0.7, 0.9), 1.0, 0.4, 3.0);
    SolverConfig cfg;
    const Solution sol = picard_solve(prob, cfg);
    const double sup = sol.xi.magnitude().sup_abs();
    EXPECT_LE(fixed_point_residual(prob, sol.xi), 10.0 * cfg.picard_tol * (1.0 + sup));
}

TEST(PicardSolve, IndependentOfWindow) {
    const GridSpec spec(1.0, 200, 0.25);
    const VolterraProblem prob = scalar_problem(spec, linear_kernel(spec, 0.2, 0.8, 0.5), 1.0);
    const Solution a = picard_solve(prob);
    SolverConfig half;
    half.delta = a.delta / 2.0;
    const Solution b = picard_solve(prob, half);
    EXPECT_LE(b.window_nodes, a.window_nodes);
    const double scale = 1.0 + a.xi.magnitude().sup_abs();
    for (std::size_t i = 0; i <= 200; ++i) {
        EXPECT_NEAR(a.xi.at(i)[0], b.xi.at(i)[0], 1e-8 * scale);
    }
}

TEST(PicardSolve, HistoryBeforeDelayMatchesUndelayedSolve) {
    const GridSpec delayed(1.0, 256, 0.5);
    const GridSpec plain(0.5, 128);
    const Solution a =
        picard_solve(scalar_problem(delayed, linear_kernel(delayed, 0.0, 1.0, 1.0), 1.0));
    const Solution b = picard_solve(scalar_problem(plain, linear_kernel(plain, 0.0, 1.0, 0.0), 1.0));
    for (std::size_t i = 0; i <= 128; ++i) {
        EXPECT_NEAR(a.xi.at(i)[0], b.xi.at(i)[0], 1e-9 * b.xi.at(i)[0]);
    }
}

TEST(PicardSolve, IteratesIncreaseForPositiveKernel) {
    const GridSpec spec(1.0, 100, 0.25);
    const VolterraProblem prob = scalar_problem(spec, linear_kernel(spec, 0.0, 1.0, 1.0), 1.0);
    std::vector<double> last;
    std::size_t last_window = 0;
    bool monotone = true;
    SolverConfig cfg;
    cfg.on_iterate = [&](std::size_t window, int iter, std::span<const double> v) {
        if (iter > 0 && window == last_window) {
            for (std::size_t k = 0; k < v.size(); ++k) {
                monotone = monotone && v[k] >= last[k] - 1e-14;
            }
        }
        last.assign(v.begin(), v.end());
        last_window = window;
    };
    const Solution sol = picard_solve(prob, cfg);
    EXPECT_TRUE(monotone);
    for (std::size_t i = 0; i <= 100; ++i) {
        EXPECT_GE(sol.xi.at(i)[0], 1.0);
    }
}

TEST(PicardSolve, WideWindowNeedsOverride) {
    const GridSpec spec(1.0, 64);
    const VolterraProblem prob = scalar_problem(spec, linear_kernel(spec, 0.0, 5.0, 0.0), 1.0);
    SolverConfig cfg;
    cfg.delta = 1.0;
    EXPECT_EQ(kind_of([&] { picard_solve(prob, cfg); }), ErrorKind::Parameter);
    cfg.delta = 2.0;
    cfg.allow_wide_window = true;
    EXPECT_EQ(kind_of([&] { picard_solve(prob, cfg); }), ErrorKind::Parameter);
}

TEST(PicardSolve, IterationCapIsDivergence) {
    const GridSpec spec(1.0, 64);
    const VolterraProblem prob = scalar_problem(spec, linear_kernel(spec, 0.0, 1.0, 0.0), 1.0);
    SolverConfig cfg;
    cfg.max_iter = 1;
    try {
        picard_solve(prob, cfg);
        FAIL();
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.window(), 0);
        EXPECT_EQ(e.increments().size(), 1u);
    }
}

TEST(PicardSolve, NonFiniteKernelIsEvaluationError) {
    const GridSpec spec(1.0, 16);
    GeneratorKernel k = linear_kernel(spec, 0.0, 1.0, 0.0);
    k.kappa = [](double, double s, std::span<const double>, std::span<const double>,
                 std::span<const double>, std::span<double> out) {
        out[0] = s > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    };
    try {
        picard_solve(scalar_problem(spec, k, 1.0));
        FAIL();
    } catch (const EvaluationError& e) {
        EXPECT_GT(e.s(), 0.5);
    }
}

TEST(PicardSolve, RejectsBadProblems) {
    const GridSpec spec(1.0, 16);
    EXPECT_EQ(kind_of([&] { picard_solve(scalar_problem(spec, zero_kernel(spec), 1.0, 1.2)); }),
              ErrorKind::Parameter);
    EXPECT_EQ(kind_of([&] { picard_solve(scalar_problem(spec, zero_kernel(spec), 1.0, 0.5, 0.5)); }),
              ErrorKind::Parameter);
    const GridSpec other(1.0, 32);
    VolterraProblem mixed = scalar_problem(spec, zero_kernel(other), 1.0);
    EXPECT_EQ(kind_of([&] { picard_solve(mixed); }), ErrorKind::Structural);
}

TEST(Estimates, AprioriBoundHolds) {
    const GridSpec spec(1.0, 200, 0.25);
    const VolterraProblem prob = scalar_problem(spec, linear_kernel(spec, 1.0, 0.5, 0.5), 1.0);
    const Solution sol = picard_solve(prob);
    const double k = derive_apriori_constant(prob, default_gronwall_q(prob.nu));
    const CheckRecord r = apriori_check(prob, sol.xi, k);
    EXPECT_TRUE(r.pass) << r.lhs << " vs " << r.rhs;
    EXPECT_GE(k, 0.0);
}

TEST(Estimates, StabilityUnderDataPerturbation) {
    const GridSpec spec(1.0, 200, 0.25);
    const GeneratorKernel kernel = linear_kernel(spec, 0.0, 0.7, 0.7);
    const VolterraProblem a = scalar_problem(spec, kernel, 1.0);
    const VolterraProblem b = scalar_problem(spec, kernel, 1.1);
    const Solution sa = picard_solve(a);
    const Solution sb = picard_solve(b);
    const double q = default_gronwall_q(0.5);
    const double k = derive_stability_constant(a, b, sa.xi, sb.xi, q);
    EXPECT_GE(k, 1.0);
    EXPECT_TRUE(stability_check(a, b, sa.xi, sb.xi, k).pass);
    const DifferenceLink link = difference_link_check(a, b, sa.xi, sb.xi, q);
    EXPECT_TRUE(link.certified);
    EXPECT_TRUE(link.pass) << link.max_excess;
}

TEST(Estimates, StabilityUnderControlPerturbation) {
    const GridSpec spec(1.0, 200);
    const GeneratorKernel kernel = linear_kernel(spec, 0.0, 1.0, 0.0, 1.0);
    const VolterraProblem a = scalar_problem(spec, kernel, 1.0, 0.5, 2.0, 0.0);
    const VolterraProblem b = scalar_problem(spec, kernel, 1.0, 0.5, 2.0, 0.5);
    const Solution sa = picard_solve(a);
    const Solution sb = picard_solve(b);
    const double q = default_gronwall_q(0.5);
    const double k = derive_stability_constant(a, b, sa.xi, sb.xi, q);
    const CheckRecord r = stability_check(a, b, sa.xi, sb.xi, k);
    EXPECT_TRUE(r.pass) << r.lhs << " vs " << r.rhs;
    EXPECT_GT(r.lhs, 0.0);
    EXPECT_TRUE(difference_link_check(a, b, sa.xi, sb.xi, q).pass);
}

TEST(Estimates, StabilityRejectsMismatchedProblems) {
    const GridSpec spec(1.0, 16);
    const VolterraProblem a = scalar_problem(spec, linear_kernel(spec, 0.0, 1.0, 0.0), 1.0);
    const VolterraProblem b = scalar_problem(spec, linear_kernel(spec, 0.0, 1.0, 0.0), 1.0, 0.6);
    const Solution s = picard_solve(a);
    EXPECT_EQ(kind_of([&] { stability_check(a, b, s.xi, s.xi, 1.0); }), ErrorKind::Structural);
}

TEST(Hypotheses, LinearKernelEnvelope) {
    const GridSpec spec(1.0, 64, 0.25);
    const HypothesisSample s = sample_hypotheses(linear_kernel(spec, 0.5, -1.0, 2.0, 0.3), 2000, 9);
    EXPECT_LE(s.growth_ratio, 1.0 + 1e-12);
    EXPECT_LE(s.lipschitz_ratio, 1.0 + 1e-12);
    EXPECT_LE(s.combined_ratio, 1.0 + 1e-12);
}

TEST(Hypotheses, DetectsUnderstatedLipschitzConstant) {
    const GridSpec spec(1.0, 64);
    GeneratorKernel k = linear_kernel(spec, 0.0, 3.0, 0.0);
    k.L = GridFunction::constant(spec, 1.0);
    EXPECT_GT(sample_hypotheses(k, 500, 1).lipschitz_ratio, 2.0);
}

TEST(VectorGridFunction, Shapes) {
    const GridSpec spec(1.0, 4);
    const VectorGridFunction v(spec, 2, {3, 4, 0, 0, 1, 0, 0, 1, 6, 8});
    EXPECT_EQ(v.magnitude().at(0), 5.0);
    EXPECT_EQ(v.magnitude().at(4), 10.0);
    EXPECT_EQ(v.component(1).at(3), 1.0);
    EXPECT_EQ(kind_of([&] { VectorGridFunction(spec, 2, {1, 2, 3}); }), ErrorKind::Structural);
    EXPECT_EQ(kind_of([&] { (void)v.component(2); }), ErrorKind::Structural);
}

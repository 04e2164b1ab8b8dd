#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wsv/check.hpp"
#include "wsv/grid.hpp"
#include "wsv/gronwall.hpp"

namespace wsv {

/// Vector-valued function on the nodes of a GridSpec, node-major, zero on [-h, 0).
class VectorGridFunction {
public:
    VectorGridFunction(GridSpec spec, std::size_t dim);
    /// `horizon_values` holds dim entries per horizon node (node-major).
    VectorGridFunction(GridSpec spec, std::size_t dim, std::vector<double> horizon_values);
    explicit VectorGridFunction(const GridFunction& scalar);

    const GridSpec& spec() const noexcept { return spec_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> at(std::size_t horizon_index) const {
        return std::span<const double>(values_).subspan(horizon_index * dim_, dim_);
    }
    std::span<double> at(std::size_t horizon_index) {
        return std::span<double>(values_).subspan(horizon_index * dim_, dim_);
    }
    std::span<const double> data() const noexcept { return values_; }

    GridFunction component(std::size_t c) const;
    /// Pointwise Euclidean norm.
    GridFunction magnitude() const;

private:
    GridSpec spec_;
    std::size_t dim_;
    std::vector<double> values_;  // horizon only; prehistory is implicitly zero
};

VectorGridFunction operator-(const VectorGridFunction& a, const VectorGridFunction& b);

/// kappa(t, s, xi, xi_h, u) -> out (length dim_state).
using GeneratorFn = std::function<void(double t, double s, std::span<const double> xi,
                                       std::span<const double> xi_h, std::span<const double> u,
                                       std::span<double> out)>;

/**
 * Generator of the state equation with its growth/Lipschitz envelope:
 *   |kappa(t,s,0,0,u0)| <= L0(s),
 *   |kappa(t,s,x,y,u) - kappa(t,s,x',y',u')| <= L(s) (|x-x'| + |y-y'| + d(u,u')),
 *   |kappa(t,s,...) - kappa(t',s,...)| <= K omega(|t-t'|) (1 + |x| + |y|).
 * The control set is a subset of R^dim_control with the Euclidean metric.
 */
struct GeneratorKernel {
    GeneratorFn kappa;
    GridFunction L0;
    GridFunction L;
    std::vector<double> u0;
    std::function<double(double)> omega;
    std::size_t dim_state = 1;
    std::size_t dim_control = 1;
    /// When false, kappa ignores t and the solver evaluates it once per node and sweep.
    bool time_dependent = true;
};

/// xi(t) = zeta(t) + int_0^t kappa(t, s, xi(s), xi(s-h), u(s)) (t-s)^{nu-1} ds, xi = 0 on [-h, 0).
struct VolterraProblem {
    VectorGridFunction zeta;
    GeneratorKernel kernel;
    VectorGridFunction control;
    double nu;
    double p;

    const GridSpec& spec() const noexcept { return zeta.spec(); }
    void validate() const;
    /// d(u(t), u0) on the horizon.
    GridFunction control_distance() const;
};

struct SolverConfig {
    /// Contraction parameter; negative selects it automatically.
    double epsilon = -1.0;
    /// Window length; nonpositive selects the contraction window.
    double delta = 0.0;
    double picard_tol = 1e-10;
    int max_iter = 500;
    /// Permit delta beyond the certified contraction window.
    bool allow_wide_window = false;
    /// Optional observer of every Picard iterate on a window (window, iteration, values).
    std::function<void(std::size_t, int, std::span<const double>)> on_iterate;

    /// q from 1/p + 1 = 1/q + 1/(1 + epsilon).
    double q_aux(double p) const;
};

/// Which branch of the exponent analysis a declared p falls into.
enum class ExponentCase { LargeP = 1, ModerateP = 2, UnitP = 3 };

struct ContractionWindow {
    ExponentCase which;
    double epsilon;
    double norm_exponent;  // (1 + eps) / eps, infinite for eps = 0
    double l_norm;
    double delta;
};

/**
 * Largest delta <= T with
 *   2 (delta^{1-(1+eps)(1-nu)} / (1-(1+eps)(1-nu)))^{1/(1+eps)} ||L||_{r} <= 0.99,
 * r = pq/(p-q) = (1+eps)/eps, found by bisection.
 */
double contraction_window(const GridFunction& L, double nu, double p, double epsilon, double t_end);

/// Left side of the contraction condition.
double contraction_factor(double delta, double nu, double epsilon, double l_norm);

ExponentCase classify_exponent(double nu, double p);

/// Picks epsilon per case (20-point scan maximising delta; eps = 0 when p = 1).
ContractionWindow select_contraction_window(const GridFunction& L, double nu, double p,
                                            double t_end);

struct Solution {
    VectorGridFunction xi;
    double epsilon;
    double delta;
    std::size_t window_nodes;
    std::vector<int> iterations;  // per window
};

/// Windowed Picard solve; each window freezes the already solved history.
Solution picard_solve(const VolterraProblem& prob, const SolverConfig& cfg = {});

/// zeta + int kappa(...) (t-s)^{nu-1} ds evaluated along a given trajectory.
VectorGridFunction apply_solution_operator(const VolterraProblem& prob, const VectorGridFunction& xi);

/// sup over nodes of |xi - apply_solution_operator(xi)|.
double fixed_point_residual(const VolterraProblem& prob, const VectorGridFunction& xi);

/// ||xi||_p <= ||zeta||_p + K (1 + ||d(u, u0)||_p).
CheckRecord apriori_check(const VolterraProblem& prob, const VectorGridFunction& xi, double k);

/// ||xi1 - xi2||_p <= K { ||zeta1 - zeta2||_p + || int |kappa1 - kappa2| (t-s)^{nu-1} ds ||_p }.
CheckRecord stability_check(const VolterraProblem& prob1, const VolterraProblem& prob2,
                            const VectorGridFunction& xi1, const VectorGridFunction& xi2,
                            double k);

/**
 * theta = |zeta| + int (L0 + L d(u, u0)) (t-s)^{nu-1} ds turns the growth bound
 * into the delayed Gronwall inequality for |xi|. With h = 0 the delayed term
 * coincides with the direct one, so L is doubled and the delay moved past T.
 */
GronwallProblem growth_inequality(const VolterraProblem& prob, double q);

/**
 * theta = |zeta1 - zeta2| + int |kappa(.., xi1, u1) - kappa(.., xi2, u2)| (t-s)^{nu-1} ds,
 * the brace content of stability_check. |xi1 - xi2| satisfies the delayed
 * Gronwall inequality with this theta and the kernel's L.
 */
GronwallProblem difference_inequality(const VolterraProblem& prob1, const VolterraProblem& prob2,
                                      const VectorGridFunction& xi1, const VectorGridFunction& xi2,
                                      double q);

/// K for apriori_check: (||bound||_p - ||zeta||_p) / (1 + ||d(u, u0)||_p), clamped at 0.
double derive_apriori_constant(const VolterraProblem& prob, double q);

/// K for stability_check: max(1, ||bound||_p / ||theta||_p) for difference_inequality.
double derive_stability_constant(const VolterraProblem& prob1, const VolterraProblem& prob2,
                                 const VectorGridFunction& xi1, const VectorGridFunction& xi2,
                                 double q);

struct DifferenceLink {
    bool certified;     // the Gronwall bound dominates the resolvent majorant
    double max_excess;  // max over nodes of |xi1 - xi2| - bound (<= tolerance expected)
    double tolerance;
    bool pass;
};

/// Feeds |xi1 - xi2| through the Gronwall certification of difference_inequality.
DifferenceLink difference_link_check(const VolterraProblem& prob1, const VolterraProblem& prob2,
                                     const VectorGridFunction& xi1, const VectorGridFunction& xi2,
                                     double q);

/// Default integrability exponent for L when building Gronwall problems: 2/nu.
inline double default_gronwall_q(double nu) { return 2.0 / nu; }

struct HypothesisSample {
    double growth_ratio;      // max |kappa(t,s,0,0,u0)| / L0(s)
    double lipschitz_ratio;   // max |dkappa| / (L(s)(|dx| + |dy| + d(u,u')))
    double combined_ratio;    // max |kappa| / (L0 + L(|x| + |y| + d(u,u0)))
    double modulus_constant;  // max |kappa(t) - kappa(t')| / (omega(|t-t'|)(1 + |x| + |y|))
};

/// Samples the envelope inequalities at random grid tuples (s < t, state in [-radius, radius]).
HypothesisSample sample_hypotheses(const GeneratorKernel& kernel, std::size_t samples,
                                   std::uint64_t seed, double radius = 10.0);

// Built-in scalar generators.
GeneratorKernel zero_kernel(const GridSpec& spec);
/// kappa = c0 + c1 xi + c2 xi_h + c3 u, u0 = 0.
GeneratorKernel linear_kernel(const GridSpec& spec, double c0, double c1, double c2,
                              double c3 = 0.0);
/// kappa = c xi_h.
GeneratorKernel delayed_linear_kernel(const GridSpec& spec, double c = 1.0);

}  // namespace wsv

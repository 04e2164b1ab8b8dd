#pragma once

#include <cstddef>
#include <vector>

#include "wsv/grid.hpp"
#include "wsv/quadrature.hpp"

namespace wsv {

/**
 * Data of the delayed integral inequality
 *
 *   xi(t) <= theta(t) + int_0^t L(s) xi(s) (t-s)^{nu-1} ds
 *                     + int_0^t L(s) xi(s-h) (t-s)^{nu-1} ds,   xi = 0 on [-h, 0).
 *
 * L and theta live on the same grid, whose delay is h > 0. q is the declared
 * integrability exponent of L and must satisfy q > 1/nu.
 */
struct GronwallProblem {
    GridFunction L;
    GridFunction theta;
    double nu;
    double q;

    const GridSpec& spec() const noexcept { return L.spec(); }
    double delay() const noexcept { return L.spec().delay(); }

    /// Throws on q*nu <= 1, nu outside (0,1), h == 0, negative data or mismatched grids.
    void validate() const;
};

struct BoundReport {
    /// [K0, K1, K(window 1), ..., K(window n)]; see gronwall_bound.
    std::vector<double> k_steps;
    double k = 0.0;
    double k0 = 0.0;   // Lemma-type resolvent constant
    double k1 = 0.0;   // Hoelder/Beta step constant
    double nu1 = 0.0;  // improved exponent nu + (nu - 1/q)
    double c = 0.0;    // comparison constant
    std::size_t n = 0; // whole delay intervals in [0, T]

    GridFunction theta;
    GridFunction theta_n;
    GridFunction bound;
    GridFunction majorant;
    GridFunction margin;

    double min_margin() const;
};

struct Certification {
    BoundReport report;
    double tolerance;  // absolute tolerance applied to the margin
    bool pass;
};

/// K1 = ||L||_q * B(a, a)^{(q-1)/q}, a = (nu q - 1)/(q - 1).
double step_constant_k1(const GridFunction& L, double nu, double q);

/// Smallest C with (t-s)^{nu1-1} <= C (t-s)^{nu-1} on 0 < t-s <= T.
double comparison_constant(double nu, double nu1, double t_end);

/// nu1 = nu + (nu - 1/q).
double improved_exponent(double nu, double q);

/**
 * Sharp majorant: the grid solution of the equality version of the inequality,
 * by Picard iteration from theta. Every grid function satisfying the discrete
 * inequality lies below it.
 */
GridFunction resolvent_majorant(const GronwallProblem& p);

/**
 * Constant of the non-delayed singular Gronwall lemma, witnessed on the grid:
 * the largest ratio R[i][j] / A[i][j] between the discrete resolvent
 * R = sum_{m>=1} A^m and the discrete kernel A[i][j] = w[i][j] L(t_j), over
 * pairs with L(t_j) > 0. Zero when L vanishes.
 */
double lemma1_constant(const GridFunction& L, double nu, double q, const GridSpec& spec);

/// The delayed majorant curve theta_n with constant K (empty integrals are 0).
GridFunction theta_n(const GronwallProblem& p, double k);

enum class KPolicy {
    AtLeastDerived,  // K = max(supplied, all step constants)
    Exact,           // K = supplied, step constants only reported
};

/**
 * bound = theta_n + K * int_0^t L theta (t-s)^{nu-1} ds, compared against the
 * resolvent majorant.
 *
 * The step constants follow the method of steps: K0 (lemma constant) on
 * [0, h]; each later interval substitutes the previous bound into the delayed
 * term, uses K1*C for the nested singular integrals and applies the lemma
 * again. With g = K1 C (1 + K0 K1 C) the coefficients on interval i are
 * K0 g^k on the k-th shifted kernel term and (1 + K0 K1 C) g^k on the k-th
 * shifted delayed term; K(window i) is their maximum.
 */
BoundReport gronwall_bound(const GronwallProblem& p, double k,
                           KPolicy policy = KPolicy::AtLeastDerived);

inline constexpr double kDefaultCertifyTolerance = 1e-8;

/// Runs gronwall_bound with the derived K and checks margin >= -tol * (1 + sup majorant).
Certification certify(const GronwallProblem& p, double relative_tol = kDefaultCertifyTolerance);

/// Same check with an explicit K and policy (used to force failing runs).
Certification certify_with(const GronwallProblem& p, double k, KPolicy policy,
                           double relative_tol = kDefaultCertifyTolerance);

}  // namespace wsv

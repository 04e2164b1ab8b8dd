#pragma once

namespace wsv {

/// ln Gamma(x) for x > 0 (Lanczos approximation, ~1e-15 relative).
double log_gamma(double x);

/// Euler Beta B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), symmetric in its arguments.
double beta(double a, double b);

/**
 * Mittag-Leffler function of order 1/2, E_{1/2}(z) = sum_k z^k / Gamma(k/2 + 1).
 *
 * Identical to exp(z^2) erfc(-z). For z >= 0 the series is summed directly
 * (all terms positive). For z < 0 the alternating series cancels badly, so
 * E(z) = 2 exp(z^2) - E(-z) is used for |z| < 2 and the Laplace continued
 * fraction of exp(x^2) erfc(x) beyond that.
 *
 * Accepted range is [-30, 26]; above 26 the value overflows a double.
 */
double mittag_leffler_half(double z);

inline constexpr double kMittagLefflerHalfMax = 26.0;
inline constexpr double kMittagLefflerHalfMin = -30.0;

}  // namespace wsv

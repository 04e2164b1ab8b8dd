#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wsv/check.hpp"
#include "wsv/grid.hpp"

namespace wsv {

/**
 * Young's inequality ||f * g||_p <= ||f||_q ||g||_r with 1/p + 1 = 1/q + 1/r.
 *
 * f and g are extended by zero outside [0, T]; the convolution of their
 * piecewise-linear interpolants is evaluated exactly at the nodes of [0, 2T].
 * pass = lhs <= rhs (1 + 1e-6).
 */
CheckRecord young_check(const GridFunction& f, const GridFunction& g, double p, double q,
                        double r);

/// Nodal values of the zero-extended convolution f * g on [0, 2T] (2N + 1 nodes).
GridFunction zero_extended_convolution(const GridFunction& f, const GridFunction& g);

/**
 * (int_a^{a+delta} |int_a^t phi(s)(t-s)^{beta-1} ds|^p dt)^{1/p}
 *     <= (delta^{1-r(1-beta)} / (1 - r(1-beta)))^{1/r} ||phi||_{L^q(a,b)}
 * with 1 <= r < 1/(1-beta), 1/p + 1 = 1/q + 1/r. a, a + delta and b must be grid nodes.
 */
CheckRecord corollary_check(const GridFunction& phi, double a, double b, double delta, double beta,
                            double r, double p, double q);

/// (delta^{1-r(1-beta)} / (1 - r(1-beta)))^{1/r}.
double corollary_constant(double delta, double beta, double r);

inline constexpr std::uint64_t kDefaultSeed = 0x5eed2024ULL;

struct SuiteOptions {
    std::size_t cases = 50;
    std::uint64_t seed = kDefaultSeed;
    std::size_t n_points = 512;
    std::size_t workers = 1;
};

/// Random nonnegative piecewise-linear pairs, cycling (p,q,r) through (1,1,1), (2,2,1), (inf,2,2).
std::vector<CheckRecord> young_suite(const SuiteOptions& opt = {});

/// Random phi, cycling (beta, r) through (0.5, 1) and (0.7, 1.5).
std::vector<CheckRecord> corollary_suite(const SuiteOptions& opt = {});

}  // namespace wsv

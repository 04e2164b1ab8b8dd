#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wsv/grid.hpp"

namespace wsv {

/// Moments of the hat-function halves on one cell against (k - y)^{nu-1}, y in [0, 1].
/// `left` weights the node farther from the evaluation point, `right` the nearer one.
struct CellMoments {
    double left;
    double right;
};

/// Unscaled product-integration moments for lag k >= 1 (multiply by dt^nu).
CellMoments cell_moments(double nu, std::size_t k);

/**
 * Product-integration weights for f -> int_0^t f(s) (t - s)^{nu-1} ds.
 *
 * The integrand is replaced by its piecewise-linear interpolant and every
 * cell is integrated exactly against the kernel, so the diagonal s = t is
 * never evaluated. On a uniform grid the weights only depend on the lag i - j
 * (plus a boundary column), so they are stored per lag: O(N) memory for the
 * conceptual lower-triangular matrix w[i][j].
 */
class SingularWeights {
public:
    SingularWeights(const GridSpec& spec, double nu);

    const GridSpec& spec() const noexcept { return spec_; }
    double nu() const noexcept { return nu_; }

    /// w[i][j] for horizon indices 0 <= j <= i <= N (lower limit of integration 0).
    double weight(std::size_t i, std::size_t j) const;

    /// dt^nu * left moment at lag k: weight of the far node of the cell [t_{i-k}, t_{i-k+1}].
    double left(std::size_t k) const { return left_[k]; }
    /// dt^nu * right moment at lag k: weight of the near node of that cell.
    double right(std::size_t k) const { return right_[k]; }
    /// left(k) + right(k + 1): weight of an interior node at lag k.
    double interior(std::size_t k) const { return interior_[k]; }

    /**
     * int_{t_start}^{t_i} F(s) (t_i - s)^{nu-1} ds with F linear between the
     * horizon samples `values[start..i]`. Returns 0 when i <= start.
     */
    double integrate(std::span<const double> values, std::size_t i, std::size_t start = 0) const;

    /// The full sweep of integrate() over every horizon node.
    std::vector<double> convolve(std::span<const double> values, std::size_t start = 0) const;

private:
    GridSpec spec_;
    double nu_;
    std::vector<double> left_;
    std::vector<double> right_;
    std::vector<double> interior_;
};

/// g(t_i) = sum_j w[i][j] f(t_j); zero prehistory.
GridFunction singular_convolution(const GridFunction& f, const SingularWeights& w);

/**
 * int_0^t f(s - h) (t - s)^{nu-1} ds. The shifted integrand vanishes on [0, h)
 * and equals f(s - h) on [h, T]; its jump at s = h is integrated exactly by
 * starting the product rule at t = h with the right-limit value f(0).
 */
GridFunction delayed_singular_convolution(const GridFunction& f, const SingularWeights& w);

}  // namespace wsv

#include "wsv/quadrature.hpp"

#include <cmath>

#include "wsv/error.hpp"

namespace wsv {

namespace {

// Below this lag the closed forms lose at most ~k^2 ulps; above it the
// binomial series in 1/k converges at least as fast as 8^-m.
constexpr std::size_t kSeriesLag = 8;

CellMoments closed_form(double nu, double k) {
    const double km = k - 1.0;
    const double d0 = std::pow(k, nu) - std::pow(km, nu);
    const double d1 = std::pow(k, nu + 1.0) - std::pow(km, nu + 1.0);
    return {d1 / (nu + 1.0) - km * d0 / nu, k * d0 / nu - d1 / (nu + 1.0)};
}

// (k - y)^{nu-1} = k^{nu-1} sum_m c_m (y/k)^m with c_m = prod_{l=1..m} (l - nu) / l > 0.
CellMoments series(double nu, double k) {
    double c = 1.0;
    double inv_k_pow = 1.0;
    double left = 0.0;
    double right = 0.0;
    for (int m = 0; m < 200; ++m) {
        const double term = c * inv_k_pow;
        const double r = term / (m + 2.0);
        const double l = r / (m + 1.0);
        right += r;
        left += l;
        if (r < 1e-18 * right) {
            break;
        }
        c *= (m + 1.0 - nu) / (m + 1.0);
        inv_k_pow /= k;
    }
    const double scale = std::pow(k, nu - 1.0);
    return {left * scale, right * scale};
}

}  // namespace

CellMoments cell_moments(double nu, std::size_t k) {
    if (!(nu > 0.0 && nu < 1.0)) {
        fail(ErrorKind::Parameter, "cell_moments: nu must lie in (0, 1)");
    }
    if (k == 0) {
        fail(ErrorKind::Parameter, "cell_moments: lag must be at least 1");
    }
    return k < kSeriesLag ? closed_form(nu, static_cast<double>(k))
                          : series(nu, static_cast<double>(k));
}

SingularWeights::SingularWeights(const GridSpec& spec, double nu) : spec_(spec), nu_(nu) {
    if (!(nu > 0.0 && nu < 1.0)) {
        fail(ErrorKind::Parameter, "singular weights: nu must lie in (0, 1)");
    }
    const std::size_t n = spec.n_points();
    const double scale = std::pow(spec.step(), nu);
    left_.assign(n + 2, 0.0);
    right_.assign(n + 2, 0.0);
    for (std::size_t k = 1; k <= n + 1; ++k) {
        const CellMoments mom = cell_moments(nu, k);
        left_[k] = scale * mom.left;
        right_[k] = scale * mom.right;
    }
    interior_.assign(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        interior_[k] = left_[k] + right_[k + 1];
    }
}

double SingularWeights::weight(std::size_t i, std::size_t j) const {
    if (j > i || i > spec_.n_points()) {
        fail(ErrorKind::Domain, "singular weights: index outside the lower triangle");
    }
    if (i == 0) {
        return 0.0;
    }
    if (j == i) {
        return right_[1];
    }
    if (j == 0) {
        return left_[i];
    }
    return interior_[i - j];
}

double SingularWeights::integrate(std::span<const double> values, std::size_t i,
                                  std::size_t start) const {
    if (i <= start) {
        return 0.0;
    }
    double acc = left_[i - start] * values[start];
    for (std::size_t j = start + 1; j < i; ++j) {
        acc += interior_[i - j] * values[j];
    }
    acc += right_[1] * values[i];
    return acc;
}

std::vector<double> SingularWeights::convolve(std::span<const double> values,
                                              std::size_t start) const {
    const std::size_t n = spec_.n_points();
    if (values.size() != n + 1) {
        fail(ErrorKind::Structural, "singular weights: expected one value per horizon node");
    }
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t i = start + 1; i <= n; ++i) {
        out[i] = integrate(values, i, start);
    }
    return out;
}

GridFunction singular_convolution(const GridFunction& f, const SingularWeights& w) {
    require_same_grid(f.spec(), w.spec(), "singular_convolution");
    return GridFunction(f.spec(), w.convolve(f.horizon()));
}

GridFunction delayed_singular_convolution(const GridFunction& f, const SingularWeights& w) {
    require_same_grid(f.spec(), w.spec(), "delayed_singular_convolution");
    const GridSpec& spec = f.spec();
    const std::size_t n = spec.n_points();
    const std::size_t m = spec.delay_steps();
    if (m >= n) {
        return GridFunction(spec);
    }
    std::vector<double> shifted(n + 1, 0.0);
    for (std::size_t j = m; j <= n; ++j) {
        shifted[j] = f.at(j - m);
    }
    return GridFunction(spec, w.convolve(shifted, m));
}

}  // namespace wsv

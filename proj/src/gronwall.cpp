#include "wsv/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wsv/error.hpp"
#include "wsv/special.hpp"

namespace wsv {

namespace {

constexpr double kPicardTol = 1e-12;
constexpr int kPicardMaxIter = 10000;
constexpr int kStallLimit = 50;

void require_hypothesis(double nu, double q, const char* where) {
    if (!(nu > 0.0 && nu < 1.0)) {
        fail(ErrorKind::Parameter, std::string(where) + ": nu must lie in (0, 1)");
    }
    if (!(q * nu > 1.0)) {
        std::ostringstream msg;
        msg << where << ": requires q > 1/nu (q=" << q << ", nu=" << nu << ")";
        fail(ErrorKind::Hypothesis, msg.str());
    }
}

// int_0^t L(s) f(s) (t-s)^{nu-1} ds on every horizon node.
std::vector<double> kernel_apply(std::span<const double> L, std::span<const double> f,
                                 const SingularWeights& w) {
    std::vector<double> lf(L.size());
    for (std::size_t j = 0; j < L.size(); ++j) {
        lf[j] = L[j] * f[j];
    }
    return w.convolve(lf);
}

// int_h^t L(s) f(s-h) (t-s)^{nu-1} ds, right limit f(0) at s = h.
std::vector<double> delayed_apply(std::span<const double> L, std::span<const double> f,
                                  const SingularWeights& w, std::size_t m) {
    const std::size_t n = L.size() - 1;
    if (m >= n) {
        return std::vector<double>(n + 1, 0.0);
    }
    std::vector<double> lf(n + 1, 0.0);
    for (std::size_t j = m; j <= n; ++j) {
        lf[j] = L[j] * f[j - m];
    }
    return w.convolve(lf, m);
}

double sup_abs(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s = std::max(s, std::abs(x));
    }
    return s;
}

}  // namespace

void GronwallProblem::validate() const {
    require_same_grid(L.spec(), theta.spec(), "gronwall problem");
    require_hypothesis(nu, q, "gronwall problem");
    if (!(L.spec().delay() > 0.0)) {
        fail(ErrorKind::Parameter, "gronwall problem: delay h must be positive");
    }
    for (std::size_t k = 0; k < L.spec().node_count(); ++k) {
        if (!(L[k] >= 0.0) || !(theta[k] >= 0.0)) {
            fail(ErrorKind::Parameter, "gronwall problem: L and theta must be nonnegative");
        }
    }
}

double BoundReport::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : margin.horizon()) {
        m = std::min(m, v);
    }
    return m;
}

double improved_exponent(double nu, double q) {
    return nu + (nu - 1.0 / q);
}

double step_constant_k1(const GridFunction& L, double nu, double q) {
    require_hypothesis(nu, q, "step_constant_k1");
    const double a = (nu * q - 1.0) / (q - 1.0);
    return lp_norm(L, q) * std::pow(beta(a, a), (q - 1.0) / q);
}

double comparison_constant(double nu, double nu1, double t_end) {
    if (!(nu1 > nu)) {
        fail(ErrorKind::Hypothesis, "comparison_constant: requires nu1 > nu");
    }
    if (!(t_end > 0.0)) {
        fail(ErrorKind::Parameter, "comparison_constant: T must be positive");
    }
    return std::max(std::pow(t_end, nu1 - nu), 1.0);
}

GridFunction resolvent_majorant(const GronwallProblem& p) {
    p.validate();
    const GridSpec& spec = p.spec();
    const SingularWeights w(spec, p.nu);
    const std::size_t m = spec.delay_steps();
    const auto L = p.L.horizon();
    const auto theta = p.theta.horizon();

    std::vector<double> cur(theta.begin(), theta.end());
    std::vector<double> increments;
    double previous = std::numeric_limits<double>::infinity();
    int stall = 0;  // consecutive sweeps whose increment did not shrink
    for (int it = 0; it < kPicardMaxIter; ++it) {
        const auto direct = kernel_apply(L, cur, w);
        const auto delayed = delayed_apply(L, cur, w, m);
        double inc = 0.0;
        double sup = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const double next = theta[i] + direct[i] + delayed[i];
            inc = std::max(inc, std::abs(next - cur[i]));
            sup = std::max(sup, std::abs(next));
            cur[i] = next;
        }
        increments.push_back(inc);
        if (!std::isfinite(inc)) {
            throw DivergenceError("resolvent_majorant: iterate became non-finite", increments);
        }
        if (inc < kPicardTol * (1.0 + sup)) {
            return GridFunction(spec, std::move(cur));
        }
        if (inc < previous) {
            stall = 0;
        } else if (++stall >= kStallLimit) {
            throw DivergenceError("resolvent_majorant: increment failed to decrease for 50 consecutive sweeps",
                                  increments);
        }
        previous = inc;
    }
    throw DivergenceError("resolvent_majorant: iteration cap reached", increments);
}

double lemma1_constant(const GridFunction& L, double nu, double q, const GridSpec& spec) {
    require_same_grid(L.spec(), spec, "lemma1_constant");
    require_hypothesis(nu, q, "lemma1_constant");
    const SingularWeights w(spec, nu);
    const std::size_t n = spec.n_points();
    const auto l = L.horizon();

    // The Neumann series of a lower-triangular A converges iff every A[i][i] < 1;
    // its sum (I - A)^{-1} - I is then formed exactly by forward substitution.
    for (std::size_t i = 1; i <= n; ++i) {
        if (!(w.weight(i, i) * l[i] < 1.0)) {
            std::ostringstream msg;
            msg << "lemma1_constant: resolvent series diverges (diagonal kernel weight "
                << w.weight(i, i) * l[i] << " >= 1 at node " << i << "); refine the grid";
            throw DivergenceError(msg.str(), {});
        }
    }

    double ratio = 0.0;
    std::vector<double> lr(n + 1);  // L(t_k) * R[k][j] for the current column j
    for (std::size_t j = 0; j <= n; ++j) {
        if (!(l[j] > 0.0)) {
            continue;
        }
        std::fill(lr.begin(), lr.end(), 0.0);
        for (std::size_t i = std::max<std::size_t>(j, 1); i <= n; ++i) {
            const double a_ij = w.weight(i, j) * l[j];
            double acc = a_ij;
            if (j < i) {
                acc += (j == 0 ? w.left(i) : w.interior(i - j)) * lr[j];
                for (std::size_t k = j + 1; k < i; ++k) {
                    acc += w.interior(i - k) * lr[k];
                }
            }
            const double r_ij = acc / (1.0 - w.weight(i, i) * l[i]);
            lr[i] = l[i] * r_ij;
            if (a_ij > 0.0) {
                ratio = std::max(ratio, r_ij / a_ij);
            }
        }
    }
    return ratio;
}

GridFunction theta_n(const GronwallProblem& p, double k) {
    p.validate();
    if (!(k >= 0.0)) {
        fail(ErrorKind::Parameter, "theta_n: K must be nonnegative");
    }
    const GridSpec& spec = p.spec();
    const SingularWeights w(spec, p.nu);
    const std::size_t n_nodes = spec.n_points();
    const std::size_t m = spec.delay_steps();
    const std::size_t n = n_nodes / m;
    const auto L = p.L.horizon();
    const auto theta = p.theta.horizon();
    const auto direct = kernel_apply(L, theta, w);
    const auto delayed = delayed_apply(L, theta, w, m);

    std::vector<double> out(theta.begin(), theta.end());
    for (std::size_t i = 0; i <= n_nodes; ++i) {
        double sum = 0.0;
        // k = 1..n: int_0^{t-kh} L theta (t-kh-s)^{nu-1} ds, evaluated at node i - k m.
        for (std::size_t kk = 1; kk <= n && kk * m < i; ++kk) {
            sum += direct[i - kk * m];
        }
        // k = 0..n-1: int_h^{t-kh} L theta(s-h) (t-kh-s)^{nu-1} ds, empty unless t-kh > h.
        for (std::size_t kk = 0; kk + 1 <= n && kk * m + m < i; ++kk) {
            sum += delayed[i - kk * m];
        }
        if (sum != 0.0) {
            out[i] += k * sum;
        }
    }
    return GridFunction(spec, std::move(out));
}

BoundReport gronwall_bound(const GronwallProblem& p, double k, KPolicy policy) {
    p.validate();
    if (!(k >= 0.0)) {
        fail(ErrorKind::Parameter, "gronwall_bound: K must be nonnegative");
    }
    const GridSpec& spec = p.spec();
    const std::size_t n = spec.n_points() / spec.delay_steps();

    const double k0 = lemma1_constant(p.L, p.nu, p.q, spec);
    const double k1 = step_constant_k1(p.L, p.nu, p.q);
    const double nu1 = improved_exponent(p.nu, p.q);
    const double c = comparison_constant(p.nu, nu1, spec.t_end());

    const double kc = k1 * c;
    const double delayed_coef = 1.0 + k0 * kc;
    const double growth = kc * delayed_coef;

    std::vector<double> k_steps = {k0, k1};
    double window_max = k0;  // interval [0, h]
    double growth_pow = 1.0; // growth^(i-1)
    for (std::size_t i = 1; i <= n; ++i) {
        // Interval i adds the (i-1)-th shifted delayed term and the i-th shifted kernel term.
        window_max = std::max({window_max, delayed_coef * growth_pow, k0 * growth_pow * growth});
        k_steps.push_back(window_max);
        growth_pow *= growth;
    }
    const double derived = *std::max_element(k_steps.begin(), k_steps.end());
    if (!std::isfinite(derived)) {
        fail(ErrorKind::Divergence, "gronwall_bound: step constants overflow");
    }
    const double k_used = policy == KPolicy::Exact ? k : std::max(derived, k);

    GridFunction tn = theta_n(p, k_used);
    const SingularWeights w(spec, p.nu);
    const auto conv = kernel_apply(p.L.horizon(), p.theta.horizon(), w);
    std::vector<double> bound(tn.horizon().begin(), tn.horizon().end());
    for (std::size_t i = 0; i < bound.size(); ++i) {
        if (conv[i] != 0.0) {
            bound[i] += k_used * conv[i];
        }
    }
    GridFunction bound_fn(spec, std::move(bound));
    GridFunction majorant = resolvent_majorant(p);
    GridFunction margin = bound_fn - majorant;

    return BoundReport{
        .k_steps = std::move(k_steps),
        .k = k_used,
        .k0 = k0,
        .k1 = k1,
        .nu1 = nu1,
        .c = c,
        .n = n,
        .theta = p.theta,
        .theta_n = std::move(tn),
        .bound = std::move(bound_fn),
        .majorant = std::move(majorant),
        .margin = std::move(margin),
    };
}

Certification certify_with(const GronwallProblem& p, double k, KPolicy policy,
                           double relative_tol) {
    BoundReport report = gronwall_bound(p, k, policy);
    const double tol = relative_tol * (1.0 + sup_abs(report.majorant.horizon()));
    const bool pass = report.min_margin() >= -tol;
    return Certification{std::move(report), tol, pass};
}

Certification certify(const GronwallProblem& p, double relative_tol) {
    return certify_with(p, 0.0, KPolicy::AtLeastDerived, relative_tol);
}

}  // namespace wsv

#include "wsv/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "wsv/error.hpp"
#include "wsv/quadrature.hpp"

namespace wsv {

// ---------------------------------------------------------------------------
// VectorGridFunction

VectorGridFunction::VectorGridFunction(GridSpec spec, std::size_t dim)
    : spec_(spec), dim_(dim), values_((spec.n_points() + 1) * dim, 0.0) {
    if (dim == 0) {
        fail(ErrorKind::Structural, "vector grid function: dimension must be positive");
    }
}

VectorGridFunction::VectorGridFunction(GridSpec spec, std::size_t dim,
                                       std::vector<double> horizon_values)
    : spec_(spec), dim_(dim), values_(std::move(horizon_values)) {
    if (dim == 0 || values_.size() != (spec.n_points() + 1) * dim) {
        fail(ErrorKind::Structural, "vector grid function: expected dim values per horizon node");
    }
}

VectorGridFunction::VectorGridFunction(const GridFunction& scalar)
    : spec_(scalar.spec()), dim_(1),
      values_(scalar.horizon().begin(), scalar.horizon().end()) {}

GridFunction VectorGridFunction::component(std::size_t c) const {
    if (c >= dim_) {
        fail(ErrorKind::Structural, "vector grid function: component out of range");
    }
    std::vector<double> v(spec_.n_points() + 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = values_[i * dim_ + c];
    }
    return GridFunction(spec_, std::move(v));
}

GridFunction VectorGridFunction::magnitude() const {
    std::vector<double> v(spec_.n_points() + 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) {
            s += values_[i * dim_ + c] * values_[i * dim_ + c];
        }
        v[i] = std::sqrt(s);
    }
    return GridFunction(spec_, std::move(v));
}

VectorGridFunction operator-(const VectorGridFunction& a, const VectorGridFunction& b) {
    require_same_grid(a.spec(), b.spec(), "vector grid -");
    if (a.dim() != b.dim()) {
        fail(ErrorKind::Structural, "vector grid -: dimension mismatch");
    }
    std::vector<double> v(a.data().begin(), a.data().end());
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] -= b.data()[k];
    }
    return VectorGridFunction(a.spec(), a.dim(), std::move(v));
}

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        s += (a[c] - b[c]) * (a[c] - b[c]);
    }
    return std::sqrt(s);
}

double norm(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) {
        s += x * x;
    }
    return std::sqrt(s);
}

/**
 * Evaluates kappa(t_i, s_j, xi_j, xi_h(s_j), u_j) along a trajectory stored
 * node-major on the horizon. The delayed argument jumps at s = h from the zero
 * prehistory to xi(0); `right` selects the right limit there.
 */
class Integrand {
public:
    explicit Integrand(const VolterraProblem& prob)
        : prob_(prob), spec_(prob.spec()), d_(prob.kernel.dim_state),
          m_(spec_.delay_steps()), zero_(d_, 0.0) {}

    std::size_t dim() const noexcept { return d_; }

    void eval(std::size_t i, std::size_t j, bool right, std::span<const double> xi,
              std::span<double> out) const {
        const std::span<const double> x = xi.subspan(j * d_, d_);
        std::span<const double> xh = zero_;
        if (m_ == 0) {
            xh = x;
        } else if (j > m_ || (j == m_ && right)) {
            xh = xi.subspan((j - m_) * d_, d_);
        }
        const double t = spec_.horizon_time(i);
        const double s = spec_.horizon_time(j);
        prob_.kernel.kappa(t, s, x, xh, prob_.control.at(j), out);
        for (double v : out) {
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "kernel evaluation returned a non-finite value at t=" << t << ", s=" << s;
                throw EvaluationError(msg.str(), t, s);
            }
        }
    }

private:
    const VolterraProblem& prob_;
    const GridSpec& spec_;
    std::size_t d_;
    std::size_t m_;
    std::vector<double> zero_;
};

void check_exponents(double nu, double p) {
    if (!(nu > 0.0 && nu < 1.0)) {
        fail(ErrorKind::Parameter, "nu must lie in (0, 1)");
    }
    if (!(p >= 1.0)) {
        fail(ErrorKind::Parameter, "p must satisfy p >= 1");
    }
}

void require_compatible(const VolterraProblem& a, const VolterraProblem& b, const char* where) {
    require_same_grid(a.spec(), b.spec(), where);
    if (a.nu != b.nu || a.p != b.p || a.kernel.dim_state != b.kernel.dim_state ||
        a.kernel.dim_control != b.kernel.dim_control) {
        fail(ErrorKind::Structural, std::string(where) + ": problems do not share nu, p and kernel");
    }
}

}  // namespace

void VolterraProblem::validate() const {
    check_exponents(nu, p);
    const GridSpec& s = spec();
    require_same_grid(s, control.spec(), "volterra problem (control)");
    require_same_grid(s, kernel.L.spec(), "volterra problem (L)");
    require_same_grid(s, kernel.L0.spec(), "volterra problem (L0)");
    if (!kernel.kappa) {
        fail(ErrorKind::Structural, "volterra problem: kernel callable is empty");
    }
    if (zeta.dim() != kernel.dim_state || control.dim() != kernel.dim_control ||
        kernel.u0.size() != kernel.dim_control) {
        fail(ErrorKind::Structural, "volterra problem: state/control dimensions disagree");
    }
    for (std::size_t k = 0; k < s.node_count(); ++k) {
        if (!(kernel.L[k] >= 0.0) || !(kernel.L0[k] >= 0.0) || !std::isfinite(kernel.L[k]) ||
            !std::isfinite(kernel.L0[k])) {
            fail(ErrorKind::Parameter, "volterra problem: L and L0 must be finite and nonnegative");
        }
    }
    if (!std::isfinite(lp_norm(control_distance(), p))) {
        fail(ErrorKind::Parameter, "volterra problem: d(u, u0) is not p-integrable");
    }
}

GridFunction VolterraProblem::control_distance() const {
    std::vector<double> v(spec().n_points() + 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = distance(control.at(i), kernel.u0);
    }
    return GridFunction(spec(), std::move(v));
}

double SolverConfig::q_aux(double p) const {
    const double eps = std::max(epsilon, 0.0);
    return 1.0 / (1.0 / p + 1.0 - 1.0 / (1.0 + eps));
}

// ---------------------------------------------------------------------------
// Contraction window

ExponentCase classify_exponent(double nu, double p) {
    check_exponents(nu, p);
    if (p == 1.0) {
        return ExponentCase::UnitP;
    }
    return p > 1.0 / (1.0 - nu) ? ExponentCase::LargeP : ExponentCase::ModerateP;
}

double contraction_factor(double delta, double nu, double epsilon, double l_norm) {
    const double e = 1.0 - (1.0 + epsilon) * (1.0 - nu);
    return 2.0 * std::pow(std::pow(delta, e) / e, 1.0 / (1.0 + epsilon)) * l_norm;
}

namespace {

constexpr double kContractionMargin = 0.99;

void check_epsilon(double nu, double p, double epsilon) {
    std::ostringstream msg;
    switch (classify_exponent(nu, p)) {
        case ExponentCase::LargeP:
            if (!(epsilon >= 0.0 && epsilon < nu / (1.0 - nu))) {
                msg << "case 1 (p > 1/(1-nu)): epsilon must lie in [0, " << nu / (1.0 - nu)
                    << "), got " << epsilon;
            }
            break;
        case ExponentCase::ModerateP:
            if (!(epsilon > 0.0 && epsilon < p - 1.0)) {
                msg << "case 2 (1 < p <= 1/(1-nu)): epsilon must lie in (0, " << p - 1.0
                    << "), got " << epsilon;
            }
            break;
        case ExponentCase::UnitP:
            if (epsilon != 0.0) {
                msg << "case 3 (p = 1): epsilon must be 0, got " << epsilon;
            }
            break;
    }
    if (msg.tellp() == 0 && !((1.0 + epsilon) * (1.0 - nu) < 1.0)) {
        msg << "(1 + epsilon)(1 - nu) must be < 1";
    }
    if (msg.tellp() != 0) {
        fail(ErrorKind::Hypothesis, "contraction window: " + msg.str());
    }
}

double norm_exponent(double epsilon) {
    return epsilon == 0.0 ? kInfinity : (1.0 + epsilon) / epsilon;
}

double window_for_norm(double l_norm, double nu, double epsilon, double t_end) {
    if (l_norm == 0.0 || contraction_factor(t_end, nu, epsilon, l_norm) <= kContractionMargin) {
        return t_end;
    }
    double lo = 0.0;
    double hi = t_end;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * t_end; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (contraction_factor(mid, nu, epsilon, l_norm) <= kContractionMargin) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace

double contraction_window(const GridFunction& L, double nu, double p, double epsilon,
                          double t_end) {
    check_epsilon(nu, p, epsilon);
    if (!(t_end > 0.0)) {
        fail(ErrorKind::Parameter, "contraction window: T must be positive");
    }
    return window_for_norm(lp_norm(L, norm_exponent(epsilon)), nu, epsilon, t_end);
}

ContractionWindow select_contraction_window(const GridFunction& L, double nu, double p,
                                            double t_end) {
    const ExponentCase which = classify_exponent(nu, p);
    std::vector<double> candidates;
    if (which == ExponentCase::UnitP) {
        candidates.push_back(0.0);
    } else {
        const double upper = which == ExponentCase::LargeP ? nu / (1.0 - nu) : p - 1.0;
        for (int k = 1; k <= 20; ++k) {
            candidates.push_back(upper * k / 21.0);
        }
    }
    ContractionWindow best{which, 0.0, 0.0, 0.0, -1.0};
    for (double eps : candidates) {
        const double r = norm_exponent(eps);
        const double l_norm = lp_norm(L, r);
        const double delta = contraction_window(L, nu, p, eps, t_end);
        if (delta > best.delta) {
            best = ContractionWindow{which, eps, r, l_norm, delta};
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Solver

namespace {

/**
 * Product-integration rows with the integrand's jump at node m handled per
 * cell: cell [c, c+1] uses the right limit at c and the left limit at c+1.
 */
class RowAssembler {
public:
    RowAssembler(const VolterraProblem& prob, const SingularWeights& w)
        : f_(prob), w_(w), td_(prob.kernel.time_dependent), d_(prob.kernel.dim_state),
          n_(prob.spec().n_points()), scratch_(d_) {
        if (!td_) {
            plus_.assign((n_ + 1) * d_, 0.0);
            minus_.assign((n_ + 1) * d_, 0.0);
        }
    }

    /// Refreshes the cached integrand values at nodes [lo, hi] (time-independent kernels).
    void refresh(std::span<const double> xi, std::size_t lo, std::size_t hi) {
        if (td_) {
            return;
        }
        for (std::size_t j = lo; j <= hi; ++j) {
            std::span<double> p(plus_.data() + j * d_, d_);
            std::span<double> m(minus_.data() + j * d_, d_);
            f_.eval(j, j, true, xi, p);
            f_.eval(j, j, false, xi, m);
        }
    }

    /// acc += weight * F(t_i, s_j) with the chosen one-sided limit.
    void add(std::size_t i, std::size_t j, bool right, double weight, std::span<const double> xi,
             std::span<double> acc) {
        const double* v;
        if (td_) {
            f_.eval(i, j, right, xi, scratch_);
            v = scratch_.data();
        } else {
            v = (right ? plus_ : minus_).data() + j * d_;
        }
        for (std::size_t c = 0; c < d_; ++c) {
            acc[c] += weight * v[c];
        }
    }

    /// Cells c in [c_lo, c_hi) of row i.
    void cells(std::size_t i, std::size_t c_lo, std::size_t c_hi, std::span<const double> xi,
               std::span<double> acc) {
        for (std::size_t c = c_lo; c < c_hi; ++c) {
            add(i, c, true, w_.left(i - c), xi, acc);
            add(i, c + 1, false, w_.right(i - c), xi, acc);
        }
    }

private:
    Integrand f_;
    const SingularWeights& w_;
    bool td_;
    std::size_t d_;
    std::size_t n_;
    std::vector<double> plus_;
    std::vector<double> minus_;
    std::vector<double> scratch_;
};

}  // namespace

Solution picard_solve(const VolterraProblem& prob, const SolverConfig& cfg) {
    prob.validate();
    if (!(cfg.picard_tol > 0.0) || cfg.max_iter < 1) {
        fail(ErrorKind::Parameter, "picard_solve: picard_tol must be positive and max_iter >= 1");
    }
    const GridSpec& spec = prob.spec();
    const double t_end = spec.t_end();

    double epsilon;
    double certified;
    if (cfg.epsilon < 0.0) {
        const ContractionWindow cw = select_contraction_window(prob.kernel.L, prob.nu, prob.p, t_end);
        epsilon = cw.epsilon;
        certified = cw.delta;
    } else {
        epsilon = cfg.epsilon;
        certified = contraction_window(prob.kernel.L, prob.nu, prob.p, epsilon, t_end);
    }
    double delta = certified;
    if (cfg.delta > 0.0) {
        if (cfg.delta > t_end * (1.0 + 1e-12)) {
            fail(ErrorKind::Parameter, "picard_solve: window delta exceeds T");
        }
        if (cfg.delta > certified * (1.0 + 1e-12) && !cfg.allow_wide_window) {
            std::ostringstream msg;
            msg << "picard_solve: delta=" << cfg.delta << " exceeds the contraction window "
                << certified << " (set allow_wide_window to override)";
            fail(ErrorKind::Parameter, msg.str());
        }
        delta = cfg.delta;
    }

    const std::size_t n = spec.n_points();
    const std::size_t d = prob.kernel.dim_state;
    const std::size_t window_nodes =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(delta / spec.step() + 1e-9)));

    const SingularWeights w(spec, prob.nu);
    RowAssembler rows(prob, w);
    std::vector<double> xi((n + 1) * d, 0.0);
    std::copy_n(prob.zeta.at(0).begin(), d, xi.begin());
    rows.refresh(xi, 0, 0);

    std::vector<int> iterations;
    std::vector<double> history;
    std::vector<double> next;
    std::size_t window = 0;
    for (std::size_t a = 0; a < n; a = std::min(a + window_nodes, n), ++window) {
        const std::size_t b = std::min(a + window_nodes, n);
        const std::size_t len = b - a;
        history.assign(len * d, 0.0);
        for (std::size_t i = a + 1; i <= b; ++i) {
            std::span<double> acc(history.data() + (i - a - 1) * d, d);
            rows.cells(i, 0, a, xi, acc);
            rows.add(i, a, true, w.left(i - a), xi, acc);
        }
        for (std::size_t i = a + 1; i <= b; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                xi[i * d + c] = prob.zeta.at(i)[c] + history[(i - a - 1) * d + c];
            }
        }
        rows.refresh(xi, a + 1, b);
        const std::span<const double> window_view(xi.data() + (a + 1) * d, len * d);
        if (cfg.on_iterate) {
            cfg.on_iterate(window, 0, window_view);
        }

        std::vector<double> increments;
        bool converged = false;
        int it = 1;
        for (; it <= cfg.max_iter; ++it) {
            next.assign(len * d, 0.0);
            for (std::size_t i = a + 1; i <= b; ++i) {
                std::span<double> acc(next.data() + (i - a - 1) * d, d);
                for (std::size_t c = a; c < i; ++c) {
                    rows.add(i, c + 1, false, w.right(i - c), xi, acc);
                    if (c > a) {
                        rows.add(i, c, true, w.left(i - c), xi, acc);
                    }
                }
            }
            double inc = 0.0;
            double sup = 0.0;
            for (std::size_t i = a + 1; i <= b; ++i) {
                for (std::size_t c = 0; c < d; ++c) {
                    const std::size_t k = (i - a - 1) * d + c;
                    const double v = prob.zeta.at(i)[c] + history[k] + next[k];
                    inc = std::max(inc, std::abs(v - xi[i * d + c]));
                    sup = std::max(sup, std::abs(v));
                    xi[i * d + c] = v;
                }
            }
            increments.push_back(inc);
            rows.refresh(xi, a + 1, b);
            if (cfg.on_iterate) {
                cfg.on_iterate(window, it, window_view);
            }
            if (!std::isfinite(inc)) {
                break;
            }
            if (inc <= cfg.picard_tol * (1.0 + sup)) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            std::ostringstream msg;
            msg << "picard_solve: no convergence on window " << window << " [t="
                << spec.horizon_time(a) << ", " << spec.horizon_time(b) << "] after "
                << increments.size() << " sweeps";
            throw DivergenceError(msg.str(), std::move(increments), static_cast<int>(window));
        }
        iterations.push_back(it);
    }

    return Solution{VectorGridFunction(spec, d, std::move(xi)), epsilon, delta, window_nodes,
                    std::move(iterations)};
}

VectorGridFunction apply_solution_operator(const VolterraProblem& prob,
                                           const VectorGridFunction& xi) {
    prob.validate();
    require_same_grid(prob.spec(), xi.spec(), "apply_solution_operator");
    const std::size_t d = prob.kernel.dim_state;
    if (xi.dim() != d) {
        fail(ErrorKind::Structural, "apply_solution_operator: dimension mismatch");
    }
    const std::size_t n = prob.spec().n_points();
    const SingularWeights w(prob.spec(), prob.nu);
    RowAssembler rows(prob, w);
    rows.refresh(xi.data(), 0, n);
    std::vector<double> out((n + 1) * d, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
        std::span<double> acc(out.data() + i * d, d);
        rows.cells(i, 0, i, xi.data(), acc);
        for (std::size_t c = 0; c < d; ++c) {
            acc[c] += prob.zeta.at(i)[c];
        }
    }
    return VectorGridFunction(prob.spec(), d, std::move(out));
}

double fixed_point_residual(const VolterraProblem& prob, const VectorGridFunction& xi) {
    const VectorGridFunction image = apply_solution_operator(prob, xi);
    double r = 0.0;
    for (std::size_t k = 0; k < image.data().size(); ++k) {
        r = std::max(r, std::abs(image.data()[k] - xi.data()[k]));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Estimates

CheckRecord apriori_check(const VolterraProblem& prob, const VectorGridFunction& xi, double k) {
    require_same_grid(prob.spec(), xi.spec(), "apriori_check");
    const double lhs = lp_norm(xi.magnitude(), prob.p, prob.spec().t_start(), prob.spec().t_end());
    const double zeta_norm = lp_norm(prob.zeta.magnitude(), prob.p);
    const double d_norm = lp_norm(prob.control_distance(), prob.p);
    const double rhs = zeta_norm + k * (1.0 + d_norm);
    return CheckRecord{"apriori",
                       lhs,
                       rhs,
                       lhs <= rhs + 1e-10,
                       {{"K", k}, {"p", prob.p}, {"zeta_norm", zeta_norm}, {"control_norm", d_norm}}};
}

namespace {

// int |kappa(.., xi1, u1) - kappa(.., xi2, u2)| (t-s)^{nu-1} ds on every node.
GridFunction kernel_difference_integral(const VolterraProblem& prob1,
                                        const VolterraProblem& prob2,
                                        const VectorGridFunction& xi1,
                                        const VectorGridFunction& xi2) {
    const GridSpec& spec = prob1.spec();
    const std::size_t n = spec.n_points();
    const std::size_t d = prob1.kernel.dim_state;
    const SingularWeights w(spec, prob1.nu);
    const Integrand f1(prob1);
    const Integrand f2(prob2);
    std::vector<double> a(d);
    std::vector<double> b(d);
    auto diff = [&](std::size_t i, std::size_t j, bool right) {
        f1.eval(i, j, right, xi1.data(), a);
        f2.eval(i, j, right, xi2.data(), b);
        return distance(a, b);
    };
    const bool td = prob1.kernel.time_dependent || prob2.kernel.time_dependent;
    std::vector<double> plus(n + 1);
    std::vector<double> minus(n + 1);
    if (!td) {
        for (std::size_t j = 0; j <= n; ++j) {
            plus[j] = diff(j, j, true);
            minus[j] = diff(j, j, false);
        }
    }
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < i; ++c) {
            const double fp = td ? diff(i, c, true) : plus[c];
            const double fm = td ? diff(i, c + 1, false) : minus[c + 1];
            acc += w.left(i - c) * fp + w.right(i - c) * fm;
        }
        out[i] = acc;
    }
    return GridFunction(spec, std::move(out));
}

GridFunction brace_content(const VolterraProblem& prob1, const VolterraProblem& prob2,
                           const VectorGridFunction& xi1, const VectorGridFunction& xi2) {
    return (prob1.zeta - prob2.zeta).magnitude() +
           kernel_difference_integral(prob1, prob2, xi1, xi2);
}

void require_pair(const VolterraProblem& prob1, const VolterraProblem& prob2,
                  const VectorGridFunction& xi1, const VectorGridFunction& xi2, const char* where) {
    require_compatible(prob1, prob2, where);
    require_same_grid(prob1.spec(), xi1.spec(), where);
    require_same_grid(prob1.spec(), xi2.spec(), where);
    if (xi1.dim() != prob1.kernel.dim_state || xi2.dim() != prob1.kernel.dim_state) {
        fail(ErrorKind::Structural, std::string(where) + ": solution dimension mismatch");
    }
}

// A Gronwall problem on the same horizon. With h = 0 the delayed integral equals
// the direct one, so L is doubled and the delay moved to T where it is inert.
GronwallProblem gronwall_on(const GridSpec& spec, const GridFunction& L, const GridFunction& theta,
                            double nu, double q) {
    if (spec.delay() > 0.0) {
        return GronwallProblem{L, theta, nu, q};
    }
    const GridSpec shifted(spec.t_end(), spec.n_points(), spec.t_end());
    const auto lh = L.horizon();
    const auto th = theta.horizon();
    std::vector<double> l2(lh.begin(), lh.end());
    for (double& v : l2) {
        v *= 2.0;
    }
    return GronwallProblem{GridFunction(shifted, std::move(l2)),
                           GridFunction(shifted, std::vector<double>(th.begin(), th.end())), nu,
                           q};
}

double horizon_norm(std::span<const double> v, const GridSpec& spec, double p) {
    return lp_norm(GridFunction(spec, std::vector<double>(v.begin(), v.end())), p);
}

}  // namespace

CheckRecord stability_check(const VolterraProblem& prob1, const VolterraProblem& prob2,
                            const VectorGridFunction& xi1, const VectorGridFunction& xi2,
                            double k) {
    require_pair(prob1, prob2, xi1, xi2, "stability_check");
    const double p = prob1.p;
    const double lhs = lp_norm((xi1 - xi2).magnitude(), p);
    const double zeta_term = lp_norm((prob1.zeta - prob2.zeta).magnitude(), p);
    const double kernel_term = lp_norm(kernel_difference_integral(prob1, prob2, xi1, xi2), p);
    const double rhs = k * (zeta_term + kernel_term);
    const double tol = 1e-8 * (1.0 + rhs);
    return CheckRecord{"stability",
                       lhs,
                       rhs,
                       lhs <= rhs + tol,
                       {{"K", k}, {"p", p}, {"zeta_term", zeta_term}, {"kernel_term", kernel_term}}};
}

GronwallProblem growth_inequality(const VolterraProblem& prob, double q) {
    prob.validate();
    const GridSpec& spec = prob.spec();
    const SingularWeights w(spec, prob.nu);
    const GridFunction source = prob.kernel.L0 + pointwise_product(prob.kernel.L, prob.control_distance());
    const GridFunction theta = prob.zeta.magnitude() + singular_convolution(source, w);
    return gronwall_on(spec, prob.kernel.L, theta, prob.nu, q);
}

GronwallProblem difference_inequality(const VolterraProblem& prob1, const VolterraProblem& prob2,
                                      const VectorGridFunction& xi1, const VectorGridFunction& xi2,
                                      double q) {
    require_pair(prob1, prob2, xi1, xi2, "difference_inequality");
    return gronwall_on(prob1.spec(), prob1.kernel.L, brace_content(prob1, prob2, xi1, xi2),
                       prob1.nu, q);
}

double derive_apriori_constant(const VolterraProblem& prob, double q) {
    const GronwallProblem g = growth_inequality(prob, q);
    const Certification cert = certify(g);
    if (!cert.pass) {
        fail(ErrorKind::Divergence, "derive_apriori_constant: Gronwall bound failed to certify");
    }
    const double bound_norm = horizon_norm(cert.report.bound.horizon(), prob.spec(), prob.p);
    const double zeta_norm = lp_norm(prob.zeta.magnitude(), prob.p);
    const double d_norm = lp_norm(prob.control_distance(), prob.p);
    return std::max(0.0, (bound_norm - zeta_norm) / (1.0 + d_norm));
}

double derive_stability_constant(const VolterraProblem& prob1, const VolterraProblem& prob2,
                                 const VectorGridFunction& xi1, const VectorGridFunction& xi2,
                                 double q) {
    const GronwallProblem g = difference_inequality(prob1, prob2, xi1, xi2, q);
    const double theta_norm = horizon_norm(g.theta.horizon(), prob1.spec(), prob1.p);
    if (theta_norm == 0.0) {
        return 1.0;
    }
    const Certification cert = certify(g);
    if (!cert.pass) {
        fail(ErrorKind::Divergence, "derive_stability_constant: Gronwall bound failed to certify");
    }
    const double bound_norm = horizon_norm(cert.report.bound.horizon(), prob1.spec(), prob1.p);
    return std::max(1.0, bound_norm / theta_norm);
}

DifferenceLink difference_link_check(const VolterraProblem& prob1, const VolterraProblem& prob2,
                                     const VectorGridFunction& xi1, const VectorGridFunction& xi2,
                                     double q) {
    const GronwallProblem g = difference_inequality(prob1, prob2, xi1, xi2, q);
    const Certification cert = certify(g);
    const GridFunction gap = (xi1 - xi2).magnitude();
    const auto bound = cert.report.bound.horizon();
    double excess = -kInfinity;
    double sup = 0.0;
    for (std::size_t i = 0; i < bound.size(); ++i) {
        excess = std::max(excess, gap.at(i) - bound[i]);
        sup = std::max(sup, std::abs(bound[i]));
    }
    const double tol = kDefaultCertifyTolerance * (1.0 + sup);
    return DifferenceLink{cert.pass, excess, tol, cert.pass && excess <= tol};
}

// ---------------------------------------------------------------------------
// Hypothesis sampling

HypothesisSample sample_hypotheses(const GeneratorKernel& kernel, std::size_t samples,
                                   std::uint64_t seed, double radius) {
    const GridSpec& spec = kernel.L.spec();
    const std::size_t n = spec.n_points();
    const std::size_t d = kernel.dim_state;
    const std::size_t dc = kernel.dim_control;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> node(0, n);
    std::uniform_real_distribution<double> coord(-radius, radius);
    auto draw = [&](std::vector<double>& v) {
        for (double& x : v) {
            x = coord(rng);
        }
    };

    std::vector<double> x(d), y(d), x2(d), y2(d), u(dc), u2(dc), zero(d, 0.0);
    std::vector<double> k1(d), k2(d);
    HypothesisSample out{0.0, 0.0, 0.0, 0.0};
    auto ratio = [](double num, double den) {
        if (num == 0.0) {
            return 0.0;
        }
        return den > 0.0 ? num / den : kInfinity;
    };
    for (std::size_t k = 0; k < samples; ++k) {
        std::size_t js = node(rng);
        std::size_t jt = node(rng);
        if (js > jt) {
            std::swap(js, jt);
        }
        const double s = spec.horizon_time(js);
        const double t = spec.horizon_time(jt);
        const double l0 = kernel.L0.at(js);
        const double l = kernel.L.at(js);
        draw(x);
        draw(y);
        draw(x2);
        draw(y2);
        draw(u);
        draw(u2);

        kernel.kappa(t, s, zero, zero, kernel.u0, k1);
        out.growth_ratio = std::max(out.growth_ratio, ratio(norm(k1), l0));

        kernel.kappa(t, s, x, y, u, k1);
        kernel.kappa(t, s, x2, y2, u2, k2);
        out.lipschitz_ratio = std::max(
            out.lipschitz_ratio,
            ratio(distance(k1, k2), l * (distance(x, x2) + distance(y, y2) + distance(u, u2))));
        out.combined_ratio = std::max(
            out.combined_ratio,
            ratio(norm(k1), l0 + l * (norm(x) + norm(y) + distance(u, kernel.u0))));

        const std::size_t jt2 = std::uniform_int_distribution<std::size_t>(js, n)(rng);
        if (jt2 != jt && kernel.omega) {
            kernel.kappa(spec.horizon_time(jt2), s, x, y, u, k2);
            const double w = kernel.omega(std::abs(spec.horizon_time(jt2) - t));
            out.modulus_constant = std::max(
                out.modulus_constant, ratio(distance(k1, k2), w * (1.0 + norm(x) + norm(y))));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in generators

GeneratorKernel linear_kernel(const GridSpec& spec, double c0, double c1, double c2, double c3) {
    GeneratorKernel k{
        .kappa =
            [c0, c1, c2, c3](double, double, std::span<const double> x, std::span<const double> xh,
                             std::span<const double> u, std::span<double> out) {
                out[0] = c0 + c1 * x[0] + c2 * xh[0] + c3 * u[0];
            },
        .L0 = GridFunction::constant(spec, std::abs(c0)),
        .L = GridFunction::constant(spec, std::max({std::abs(c1), std::abs(c2), std::abs(c3)})),
        .u0 = {0.0},
        .omega = [](double r) { return r; },
        .dim_state = 1,
        .dim_control = 1,
        .time_dependent = false,
    };
    return k;
}

GeneratorKernel zero_kernel(const GridSpec& spec) {
    return linear_kernel(spec, 0.0, 0.0, 0.0, 0.0);
}

GeneratorKernel delayed_linear_kernel(const GridSpec& spec, double c) {
    return linear_kernel(spec, 0.0, 0.0, c, 0.0);
}

}  // namespace wsv

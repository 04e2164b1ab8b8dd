#include "wsv/estimates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "wsv/error.hpp"
#include "wsv/quadrature.hpp"

namespace wsv {

namespace {

constexpr double kRelationTol = 1e-12;
constexpr double kPassSlack = 1e-6;

double reciprocal(double x) {
    return std::isinf(x) ? 0.0 : 1.0 / x;
}

void require_relation(double p, double q, double r, const char* where) {
    for (double e : {p, q, r}) {
        if (!(e >= 1.0)) {
            fail(ErrorKind::Parameter, std::string(where) + ": exponents must be >= 1");
        }
    }
    const double gap = reciprocal(p) + 1.0 - reciprocal(q) - reciprocal(r);
    if (std::abs(gap) > kRelationTol) {
        std::ostringstream msg;
        msg << where << ": exponents violate 1/p + 1 = 1/q + 1/r (p=" << p << ", q=" << q
            << ", r=" << r << ")";
        fail(ErrorKind::Parameter, msg.str());
    }
}

// Results land at their case index, so the output order never depends on scheduling.
std::vector<CheckRecord> run_parallel(std::size_t count, std::size_t workers,
                                      const std::function<CheckRecord(std::size_t)>& job) {
    std::vector<CheckRecord> out(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            out[k] = job(k);
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (n_threads == 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& th : pool) {
        th.join();
    }
    return out;
}

// Piecewise-linear function through `knots` equispaced values on [0, T], sampled on the grid.
GridFunction piecewise_linear(const GridSpec& spec, const std::vector<double>& knots) {
    const double segments = static_cast<double>(knots.size() - 1);
    return GridFunction::sample(spec, [&](double t) {
        const double pos = t / spec.t_end() * segments;
        const std::size_t k = std::min(static_cast<std::size_t>(pos), knots.size() - 2);
        const double frac = pos - static_cast<double>(k);
        return (1.0 - frac) * knots[k] + frac * knots[k + 1];
    });
}

}  // namespace

GridFunction zero_extended_convolution(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.spec(), g.spec(), "zero_extended_convolution");
    const GridSpec& spec = f.spec();
    const std::size_t n = spec.n_points();
    const double dt = spec.step();
    const auto fv = f.horizon();
    const auto gv = g.horizon();
    std::vector<double> out(2 * n + 1, 0.0);
    // Cell [j, j+1] of f meets cell [k-j-1, k-j] of g reversed; both linear there.
    for (std::size_t k = 1; k <= 2 * n; ++k) {
        const std::size_t j_lo = k > n ? k - n : 0;
        const std::size_t j_hi = std::min(k - 1, n - 1);
        double acc = 0.0;
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            const double g0 = gv[k - j];
            const double g1 = gv[k - j - 1];
            acc += 2.0 * fv[j] * g0 + fv[j] * g1 + fv[j + 1] * g0 + 2.0 * fv[j + 1] * g1;
        }
        out[k] = acc * dt / 6.0;
    }
    return GridFunction(GridSpec(2.0 * spec.t_end(), 2 * n), std::move(out));
}

CheckRecord young_check(const GridFunction& f, const GridFunction& g, double p, double q,
                        double r) {
    require_relation(p, q, r, "young_check");
    const GridFunction conv = zero_extended_convolution(f, g);
    const double lhs = lp_norm(conv, p);
    const double fq = lp_norm(f, q);
    const double gr = lp_norm(g, r);
    const double rhs = fq * gr;
    return CheckRecord{"young",
                       lhs,
                       rhs,
                       lhs <= rhs * (1.0 + kPassSlack),
                       {{"p", p}, {"q", q}, {"r", r}, {"f_q", fq}, {"g_r", gr}}};
}

double corollary_constant(double delta, double beta, double r) {
    const double e = 1.0 - r * (1.0 - beta);
    return std::pow(std::pow(delta, e) / e, 1.0 / r);
}

CheckRecord corollary_check(const GridFunction& phi, double a, double b, double delta, double beta,
                            double r, double p, double q) {
    if (!(beta > 0.0 && beta < 1.0)) {
        fail(ErrorKind::Parameter, "corollary_check: beta must lie in (0, 1)");
    }
    if (!(r >= 1.0 && r < 1.0 / (1.0 - beta))) {
        std::ostringstream msg;
        msg << "corollary_check: requires 1 <= r < 1/(1-beta) = " << 1.0 / (1.0 - beta)
            << ", got r=" << r;
        fail(ErrorKind::Hypothesis, msg.str());
    }
    require_relation(p, q, r, "corollary_check");
    const GridSpec& spec = phi.spec();
    if (!(a < b) || !(delta > 0.0) || delta > (b - a) * (1.0 + 1e-12)) {
        fail(ErrorKind::Domain, "corollary_check: requires a < b and 0 < delta <= b - a");
    }
    const std::size_t ia = spec.node_index(a);
    spec.node_index(b);
    const std::size_t ie = spec.node_index(a + delta);

    double lhs = 0.0;
    if (ie - ia >= 2) {
        const GridSpec window(static_cast<double>(ie - ia) * spec.step(), ie - ia);
        std::vector<double> v(phi.values().begin() + static_cast<std::ptrdiff_t>(ia),
                              phi.values().begin() + static_cast<std::ptrdiff_t>(ie) + 1);
        const GridFunction local(window, std::move(v));
        lhs = lp_norm(singular_convolution(local, SingularWeights(window, beta)), p);
    } else {
        // A single cell: integrate its one nontrivial node exactly.
        const SingularWeights w(GridSpec(2.0 * spec.step(), 2), beta);
        const double g1 = w.left(1) * phi[ia] + w.right(1) * phi[ie];
        lhs = std::isinf(p) ? std::abs(g1) : std::pow(0.5 * spec.step() * std::pow(std::abs(g1), p), 1.0 / p);
    }
    const double constant = corollary_constant(delta, beta, r);
    const double phi_q = lp_norm(phi, q, a, b);
    const double rhs = constant * phi_q;
    return CheckRecord{"corollary",
                       lhs,
                       rhs,
                       lhs <= rhs * (1.0 + kPassSlack),
                       {{"beta", beta}, {"r", r}, {"p", p}, {"q", q}, {"delta", delta},
                        {"constant", constant}, {"phi_q", phi_q}}};
}

std::vector<CheckRecord> young_suite(const SuiteOptions& opt) {
    struct Case {
        std::vector<double> f;
        std::vector<double> g;
        double p, q, r;
    };
    const double exps[3][3] = {{1.0, 1.0, 1.0}, {2.0, 2.0, 1.0}, {kInfinity, 2.0, 2.0}};
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Case> cases;
    for (std::size_t k = 0; k < opt.cases; ++k) {
        // Knots vanish at both ends so f * g is C^2 and the trapezoid rule stays O(dt^4).
        std::vector<double> f(9, 0.0);
        std::vector<double> g(9, 0.0);
        for (std::size_t j = 1; j + 1 < f.size(); ++j) {
            f[j] = unit(rng);
            g[j] = unit(rng);
        }
        const auto& e = exps[k % 3];
        cases.push_back({std::move(f), std::move(g), e[0], e[1], e[2]});
    }
    const GridSpec spec(1.0, opt.n_points);
    return run_parallel(cases.size(), opt.workers, [&](std::size_t k) {
        const Case& c = cases[k];
        return young_check(piecewise_linear(spec, c.f), piecewise_linear(spec, c.g), c.p, c.q, c.r);
    });
}

std::vector<CheckRecord> corollary_suite(const SuiteOptions& opt) {
    struct Case {
        std::vector<double> phi;
        std::size_t ia, ib, id;
        double beta, r, p, q;
    };
    const std::size_t n = opt.n_points;
    if (n < 8) {
        fail(ErrorKind::Parameter, "corollary_suite: needs at least 8 grid cells");
    }
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::vector<Case> cases;
    for (std::size_t k = 0; k < opt.cases; ++k) {
        std::vector<double> phi(9);
        for (double& v : phi) {
            v = sym(rng);
        }
        const std::size_t ia = std::uniform_int_distribution<std::size_t>(0, n / 2)(rng);
        const std::size_t ib = std::uniform_int_distribution<std::size_t>(ia + n / 8, n)(rng);
        const std::size_t id = std::uniform_int_distribution<std::size_t>(2, ib - ia)(rng);
        double beta;
        double r;
        double q;
        if (k % 2 == 0) {
            beta = 0.5;
            r = 1.0;
            const double qs[3] = {1.0, 2.0, 3.0};
            q = qs[(k / 2) % 3];
        } else {
            beta = 0.7;
            r = 1.5;
            const double qs[2] = {1.25, 2.0};
            q = qs[(k / 2) % 2];
        }
        const double p = 1.0 / (1.0 / q + 1.0 / r - 1.0);
        cases.push_back({std::move(phi), ia, ib, id, beta, r, p, q});
    }
    const GridSpec spec(1.0, n);
    return run_parallel(cases.size(), opt.workers, [&](std::size_t k) {
        const Case& c = cases[k];
        return corollary_check(piecewise_linear(spec, c.phi), spec.horizon_time(c.ia),
                               spec.horizon_time(c.ib), static_cast<double>(c.id) * spec.step(),
                               c.beta, c.r, c.p, c.q);
    });
}

}  // namespace wsv

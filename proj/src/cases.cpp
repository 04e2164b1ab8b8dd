#include "wsv/cases.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "wsv/error.hpp"

namespace wsv {

// ---------------------------------------------------------------------------
// Rational

namespace {

__extension__ typedef __int128 Wide;

std::int64_t checked(Wide v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
        fail(ErrorKind::Parameter, "rational: overflow");
    }
    return static_cast<std::int64_t>(v);
}

Rational make(Wide num, Wide den) {
    if (den == 0) {
        fail(ErrorKind::Parameter, "rational: zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Wide a = num < 0 ? -num : num;
    Wide b = den;
    while (b != 0) {
        const Wide t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    return Rational(checked(num), checked(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den == 0) {
        fail(ErrorKind::Parameter, "rational: zero denominator");
    }
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational operator+(Rational a, Rational b) {
    return make(static_cast<Wide>(a.num_) * b.den_ + static_cast<Wide>(b.num_) * a.den_,
                static_cast<Wide>(a.den_) * b.den_);
}

Rational operator-(Rational a, Rational b) {
    return a + Rational(-b.num_, b.den_);
}

Rational operator*(Rational a, Rational b) {
    return make(static_cast<Wide>(a.num_) * b.num_, static_cast<Wide>(a.den_) * b.den_);
}

Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) {
        fail(ErrorKind::Parameter, "rational: division by zero");
    }
    return make(static_cast<Wide>(a.num_) * b.den_, static_cast<Wide>(a.den_) * b.num_);
}

bool operator<(Rational a, Rational b) {
    return static_cast<Wide>(a.num_) * b.den_ < static_cast<Wide>(b.num_) * a.den_;
}

std::string Rational::str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
    const auto bad = [&] {
        fail(ErrorKind::Parameter, "rational: cannot parse '" + text + "'");
    };
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const Rational a = parse(text.substr(0, slash));
        const Rational b = parse(text.substr(slash + 1));
        if (b.num() == 0) {
            bad();
        }
        return a / b;
    }
    std::size_t k = 0;
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) {
        ++k;
    }
    bool negative = false;
    if (k < text.size() && (text[k] == '+' || text[k] == '-')) {
        negative = text[k] == '-';
        ++k;
    }
    Wide num = 0;
    Wide den = 1;
    bool digits = false;
    bool point = false;
    for (; k < text.size(); ++k) {
        const char c = text[k];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            num = num * 10 + (c - '0');
            if (point) {
                den *= 10;
            }
            digits = true;
            checked(num);
            checked(den);
        } else if (c == '.' && !point) {
            point = true;
        } else {
            break;
        }
    }
    if (!digits) {
        bad();
    }
    if (k < text.size() && (text[k] == 'e' || text[k] == 'E')) {
        ++k;
        bool exp_negative = false;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) {
            exp_negative = text[k] == '-';
            ++k;
        }
        int exponent = 0;
        bool exp_digits = false;
        for (; k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])); ++k) {
            exponent = exponent * 10 + (text[k] - '0');
            exp_digits = true;
            if (exponent > 18) {
                bad();
            }
        }
        if (!exp_digits) {
            bad();
        }
        for (int e = 0; e < exponent; ++e) {
            (exp_negative ? den : num) *= 10;
            checked(num);
            checked(den);
        }
    }
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) {
        ++k;
    }
    if (k != text.size()) {
        bad();
    }
    return make(negative ? -num : num, den);
}

// ---------------------------------------------------------------------------
// Example

void ExampleParams::validate() const {
    const Rational zero(0);
    const Rational one(1);
    std::ostringstream msg;
    if (!(nu_e > zero && nu_e < one)) {
        msg << "nu_e must lie in (0, 1)";
    } else if (!(beta_e > zero && beta_e < one)) {
        msg << "beta_e must lie in (0, 1)";
    } else if (!(delta_e > zero && delta_e <= one)) {
        msg << "delta_e must lie in (0, 1]";
    } else if (!(sigma_e > zero && sigma_e <= one)) {
        msg << "sigma_e must lie in (0, 1]";
    } else if (!std::isfinite(gamma_e)) {
        msg << "gamma_e must be finite";
    } else if (!(h >= 0.0) || !std::isfinite(h)) {
        msg << "h must be nonnegative";
    }
    if (msg.tellp() != 0) {
        fail(ErrorKind::Parameter, "example parameters: " + msg.str());
    }
}

VolterraProblem example_problem(const ExampleParams& params, const GridSpec& spec, double p) {
    params.validate();
    if (spec.is_node(1.0)) {
        fail(ErrorKind::Parameter,
             "example_problem: s = 1 is a grid node where L and L0 are infinite; "
             "use an offset grid (choose T and N so that 1 is not a multiple of dt)");
    }
    const double nu = params.nu_e.to_double();
    const double de = params.delta_e.to_double();
    const double sigma = params.sigma_e.to_double();
    const double gamma = params.gamma_e;

    const GridFunction zeta = GridFunction::sample(spec, [&](double t) {
        return params.sigma_e == Rational(1) ? 1.0 : std::pow(std::abs(t - 1.0), sigma - 1.0);
    });
    GeneratorKernel kernel{
        .kappa =
            [nu, de, gamma](double t, double s, std::span<const double> x,
                            std::span<const double> xh, std::span<const double>,
                            std::span<double> out) {
                const double as = std::abs(s - 1.0);
                const double at = std::abs(t + 1.0);
                const double inner = std::pow(as, 2.0 * de - 2.0) * std::pow(at, 2.0 - 2.0 * gamma) +
                                     std::abs(x[0]) + std::abs(xh[0]);
                out[0] = std::sqrt(inner) / (std::pow(as, 1.0 - nu) * std::pow(at, 1.0 - gamma));
            },
        .L0 = GridFunction::sample(spec,
                                   [&](double s) { return std::pow(std::abs(s - 1.0), nu + de - 2.0); }),
        .L = GridFunction::sample(spec, [&](double s) { return std::pow(std::abs(s - 1.0), nu - 1.0); }),
        .u0 = {0.0},
        .omega = [](double r) { return r; },
        .dim_state = 1,
        .dim_control = 1,
        .time_dependent = gamma != 1.0,
    };
    VolterraProblem prob{VectorGridFunction(zeta), std::move(kernel), VectorGridFunction(spec, 1),
                         params.beta_e.to_double(), p};
    prob.validate();
    return prob;
}

PInterval admissible_p_interval(const ExampleParams& params) {
    params.validate();
    const Rational one(1);
    const Rational two(2);
    if (!(params.nu_e + params.beta_e > one)) {
        fail(ErrorKind::Hypothesis, "admissible_p_interval: requires nu_e + beta_e > 1");
    }
    if (!(params.nu_e + params.delta_e > one)) {
        fail(ErrorKind::Hypothesis, "admissible_p_interval: requires nu_e + delta_e > 1");
    }
    const Rational excess = two - params.nu_e - params.beta_e - params.delta_e;
    const Rational positive_part = excess > Rational(0) ? excess : Rational(0);
    const Rational denom = std::max(one - params.sigma_e, positive_part);
    const Rational lo = one / params.nu_e;
    if (denom == Rational(0)) {
        return PInterval{lo, Rational(0), true};
    }
    const Rational hi = one / denom;
    if (!(lo < hi)) {
        fail(ErrorKind::Hypothesis, "admissible_p_interval: the interval (" + lo.str() + ", " +
                                        hi.str() + ") is empty");
    }
    return PInterval{lo, hi, false};
}

double lower_bound_integral(const ExampleParams& params, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) {
        fail(ErrorKind::Domain, "lower_bound_integral: epsilon must lie in (0, 1]");
    }
    const Rational e = Rational(3) - params.nu_e - params.beta_e - params.delta_e;
    if (e == Rational(1)) {
        return -std::log(eps);
    }
    const Rational one_minus_e = Rational(1) - e;
    return (std::pow(eps, one_minus_e.to_double()) - 1.0) / (e - Rational(1)).to_double();
}

std::vector<double> default_cutoffs(std::size_t count) {
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(std::ldexp(0.1, -static_cast<int>(k)));
    }
    return out;
}

BlowupReport blowup_diagnostic(const ExampleParams& params, const std::vector<double>& cutoffs,
                               std::size_t n_points, double p, std::size_t workers) {
    params.validate();
    if (!(params.sigma_e == Rational(1))) {
        fail(ErrorKind::Hypothesis, "blowup_diagnostic: requires sigma_e = 1 (continuous free term)");
    }
    const Rational sum = params.nu_e + params.beta_e + params.delta_e;
    if (!(sum < Rational(2))) {
        fail(ErrorKind::Hypothesis, "blowup_diagnostic: nu_e + beta_e + delta_e = " + sum.str() +
                                        " >= 2, the lower bound stays finite");
    }
    if (cutoffs.empty()) {
        fail(ErrorKind::Parameter, "blowup_diagnostic: no cutoffs given");
    }
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
        if (!(cutoffs[k] > 0.0 && cutoffs[k] < 1.0) || (k > 0 && !(cutoffs[k] < cutoffs[k - 1]))) {
            fail(ErrorKind::Parameter, "blowup_diagnostic: cutoffs must decrease inside (0, 1)");
        }
    }

    std::vector<BlowupRow> rows(cutoffs.size());
    auto run = [&](std::size_t k) {
        const double eps = cutoffs[k];
        const double t_end = 1.0 - eps;
        const double dt = t_end / static_cast<double>(n_points);
        const double h = params.h > 0.0 ? std::max(1.0, std::round(params.h / dt)) * dt : 0.0;
        const GridSpec spec(t_end, n_points, h);
        const Solution sol = picard_solve(example_problem(params, spec, p));
        rows[k] = BlowupRow{eps, lower_bound_integral(params, eps), sol.xi.at(n_points)[0], dt,
                            false, false};
    };
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    auto worker = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) {
            try {
                run(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_lock);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, rows.size());
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    BlowupReport report{std::move(rows), (Rational(3) - sum).to_double(), true, true, true, ""};
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        BlowupRow& row = report.rows[k];
        row.increasing = k == 0 || row.xi_near_1 > report.rows[k - 1].xi_near_1;
        row.dominates = row.xi_near_1 >= 1.0 + row.lower_bound - 1e-6 * (1.0 + row.lower_bound);
        report.monotone = report.monotone && row.increasing;
        report.dominated = report.dominated && row.dominates;
        if (k > 0 && !(row.lower_bound > report.rows[k - 1].lower_bound)) {
            report.lower_bound_diverges = false;
        }
    }
    report.lower_bound_diverges = report.lower_bound_diverges && report.exponent > 1.0;
    std::ostringstream verdict;
    if (report.lower_bound_diverges && report.monotone && report.dominated) {
        verdict << "discontinuous at t=1: lower bound exponent " << (Rational(3) - sum).str()
                << " > 1 diverges and xi(1-eps) increases above it";
    } else {
        verdict << "inconclusive: diverges=" << report.lower_bound_diverges
                << " monotone=" << report.monotone << " dominated=" << report.dominated;
    }
    report.verdict = verdict.str();
    return report;
}

}  // namespace wsv

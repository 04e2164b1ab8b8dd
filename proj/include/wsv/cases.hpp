#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wsv/volterra.hpp"

namespace wsv {

/// Exact rational with 64-bit terms, always normalised (den > 0, gcd 1).
class Rational {
public:
    Rational(std::int64_t num = 0, std::int64_t den = 1);

    /// Accepts "a", "a/b" and finite decimals such as "0.75" or "-1.5e-2".
    static Rational parse(const std::string& text);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend Rational operator/(Rational a, Rational b);
    friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator<(Rational a, Rational b);
    friend bool operator<=(Rational a, Rational b) { return !(b < a); }
    friend bool operator>(Rational a, Rational b) { return b < a; }
    friend bool operator>=(Rational a, Rational b) { return !(a < b); }

private:
    std::int64_t num_;
    std::int64_t den_;
};

/**
 * Exponents of the blowup example
 *
 *   xi(t) = |t-1|^{sigma-1}
 *         + int_0^t sqrt(|s-1|^{2 delta_e - 2} |t+1|^{2-2 gamma} + |xi(s)| + |xi(s-h)|)
 *                   / (|s-1|^{1-nu_e} |t+1|^{1-gamma} (t-s)^{1-beta_e}) ds.
 *
 * beta_e is the singular exponent handed to the solver.
 */
struct ExampleParams {
    Rational nu_e{2, 3};
    Rational beta_e{1, 2};
    Rational delta_e{1, 2};
    Rational sigma_e{1};
    double gamma_e = 1.0;
    double h = 0.25;

    /// Exponent ranges: nu_e, beta_e in (0,1), delta_e, sigma_e in (0,1].
    void validate() const;
};

/// The example as a VolterraProblem; the grid must not contain s = 1.
VolterraProblem example_problem(const ExampleParams& params, const GridSpec& spec, double p);

struct PInterval {
    Rational lo;
    Rational hi;
    bool hi_infinite;
    double lo_value() const { return lo.to_double(); }
    double hi_value() const { return hi_infinite ? kInfinity : hi.to_double(); }
};

/// (1/nu_e, 1 / max(1 - sigma_e, (2 - nu_e - beta_e - delta_e)^+)), with 1/0 = infinity.
PInterval admissible_p_interval(const ExampleParams& params);

/// int_0^{1-eps} (1-s)^{-(3 - nu_e - beta_e - delta_e)} ds in closed form.
double lower_bound_integral(const ExampleParams& params, double eps);

struct BlowupRow {
    double epsilon;
    double lower_bound;  // I(epsilon)
    double xi_near_1;    // xi(1 - epsilon)
    double resolution;   // grid step of the run
    bool increasing;     // xi_near_1 above the previous row
    bool dominates;      // xi_near_1 >= 1 + lower_bound
};

struct BlowupReport {
    std::vector<BlowupRow> rows;
    double exponent;  // 3 - nu_e - beta_e - delta_e
    bool lower_bound_diverges;
    bool monotone;
    bool dominated;
    std::string verdict;
};

/// epsilon_k = 0.1 * 2^-k for k = 0..count-1.
std::vector<double> default_cutoffs(std::size_t count = 6);

/**
 * Solves the example once per cutoff on [0, 1 - eps] with n_points cells and
 * reads xi at the final node. Requires sigma_e = 1 and nu_e + beta_e + delta_e < 2.
 * The delay is snapped to the nearest positive multiple of each run's step.
 */
BlowupReport blowup_diagnostic(const ExampleParams& params, const std::vector<double>& cutoffs,
                               std::size_t n_points, double p = 2.0, std::size_t workers = 1);

}  // namespace wsv

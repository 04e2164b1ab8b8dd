#include "wsv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wsv/error.hpp"

namespace wsv {

namespace {

// Relative slack when snapping a time onto the grid.
constexpr double kAlignTol = 1e-9;

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Structural: return "structural";
        case ErrorKind::Hypothesis: return "hypothesis";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Evaluation: return "evaluation";
    }
    return "unknown";
}

GridSpec::GridSpec(double t_end, std::size_t n_points, double h)
    : t_end_(t_end), n_points_(n_points), h_(h), dt_(0.0), delay_steps_(0) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        fail(ErrorKind::Parameter, "grid: T must be positive and finite");
    }
    if (n_points < 2) {
        fail(ErrorKind::Parameter, "grid: n_points must be at least 2");
    }
    if (!(h >= 0.0) || !std::isfinite(h)) {
        fail(ErrorKind::Parameter, "grid: delay h must be nonnegative and finite");
    }
    dt_ = t_end / static_cast<double>(n_points);
    if (h > 0.0) {
        const double ratio = h / dt_;
        const double steps = std::round(ratio);
        if (steps < 1.0 || std::abs(ratio - steps) > kAlignTol * std::max(1.0, ratio)) {
            std::ostringstream msg;
            msg << "grid: delay h=" << h << " is not a whole multiple of dt=" << dt_;
            fail(ErrorKind::Parameter, msg.str());
        }
        delay_steps_ = static_cast<std::size_t>(steps);
    }
}

double GridSpec::node_time(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(delay_steps_)) * dt_;
}

bool GridSpec::is_node(double t) const noexcept {
    const double pos = t / dt_ + static_cast<double>(delay_steps_);
    const double r = std::round(pos);
    return r >= 0.0 && r <= static_cast<double>(node_count() - 1) &&
           std::abs(pos - r) <= kAlignTol * std::max(1.0, std::abs(pos));
}

std::size_t GridSpec::node_index(double t) const {
    if (!is_node(t)) {
        std::ostringstream msg;
        msg << "grid: t=" << t << " is not a node of [" << t_start() << ", " << t_end_ << "]";
        fail(ErrorKind::Domain, msg.str());
    }
    return static_cast<std::size_t>(std::round(t / dt_ + static_cast<double>(delay_steps_)));
}

bool GridSpec::operator==(const GridSpec& other) const noexcept {
    return n_points_ == other.n_points_ && delay_steps_ == other.delay_steps_ &&
           t_end_ == other.t_end_ && h_ == other.h_;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b)) {
        fail(ErrorKind::Structural, std::string(where) + ": grid mismatch");
    }
}

GridFunction::GridFunction(GridSpec spec)
    : spec_(spec), values_(spec.node_count(), 0.0) {}

GridFunction::GridFunction(GridSpec spec, std::vector<double> values) : spec_(spec) {
    const std::size_t full = spec.node_count();
    const std::size_t horizon = spec.n_points() + 1;
    if (values.size() == full) {
        values_ = std::move(values);
        for (std::size_t k = 0; k < spec.origin(); ++k) {
            if (values_[k] != 0.0) {
                fail(ErrorKind::Structural, "grid function: prehistory values must be zero");
            }
        }
    } else if (values.size() == horizon) {
        values_.assign(spec.origin(), 0.0);
        values_.insert(values_.end(), values.begin(), values.end());
    } else {
        std::ostringstream msg;
        msg << "grid function: expected " << full << " or " << horizon << " values, got "
            << values.size();
        fail(ErrorKind::Structural, msg.str());
    }
}

GridFunction GridFunction::sample(const GridSpec& spec, const std::function<double(double)>& f) {
    std::vector<double> v(spec.n_points() + 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f(spec.horizon_time(i));
    }
    return GridFunction(spec, std::move(v));
}

GridFunction GridFunction::constant(const GridSpec& spec, double c) {
    return GridFunction(spec, std::vector<double>(spec.n_points() + 1, c));
}

double GridFunction::interpolate(double t) const {
    if (t < spec_.t_start() || t > spec_.t_end() * (1.0 + 1e-14)) {
        fail(ErrorKind::Domain, "grid function: interpolation point outside [-h, T]");
    }
    if (t < 0.0) {
        return 0.0;
    }
    const double pos = t / spec_.step();
    const std::size_t n = spec_.n_points();
    std::size_t i = std::min(static_cast<std::size_t>(pos), n - 1);
    const double frac = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
    return (1.0 - frac) * at(i) + frac * at(i + 1);
}

double GridFunction::sup_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double lp_norm(const GridFunction& f, double p, double a, double b) {
    if (!(p >= 1.0)) {
        fail(ErrorKind::Parameter, "lp_norm: exponent must satisfy p >= 1");
    }
    const GridSpec& spec = f.spec();
    if (a > b) {
        fail(ErrorKind::Domain, "lp_norm: window must satisfy a <= b");
    }
    const std::size_t ka = spec.node_index(a);
    const std::size_t kb = spec.node_index(b);
    // Prehistory is identically zero and the jump at t = 0 is not smeared.
    const std::size_t lo = std::max(ka, spec.origin());
    if (kb < lo) {
        return 0.0;
    }
    if (kb == lo) {
        return std::isinf(p) ? std::abs(f[kb]) : 0.0;
    }
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t k = lo; k <= kb; ++k) {
            m = std::max(m, std::abs(f[k]));
        }
        return m;
    }
    double sum = 0.0;
    double prev = std::pow(std::abs(f[lo]), p);
    for (std::size_t k = lo + 1; k <= kb; ++k) {
        const double cur = std::pow(std::abs(f[k]), p);
        sum += prev + cur;
        prev = cur;
    }
    return std::pow(0.5 * spec.step() * sum, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) {
    return lp_norm(f, p, 0.0, f.spec().t_end());
}

GridFunction shift_by_delay(const GridFunction& f) {
    const GridSpec& spec = f.spec();
    const std::size_t m = spec.delay_steps();
    if (m == 0) {
        return f;
    }
    const std::size_t n = spec.n_points();
    std::vector<double> v(n + 1, 0.0);
    for (std::size_t i = m + 1; i <= n; ++i) {
        v[i] = f.at(i - m);
    }
    return GridFunction(spec, std::move(v));
}

namespace {

template <typename Op>
GridFunction combine(const GridFunction& a, const GridFunction& b, Op op, const char* where) {
    require_same_grid(a.spec(), b.spec(), where);
    std::vector<double> v(a.spec().n_points() + 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = op(a.at(i), b.at(i));
    }
    return GridFunction(a.spec(), std::move(v));
}

}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return combine(a, b, [](double x, double y) { return x + y; }, "grid +");
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return combine(a, b, [](double x, double y) { return x - y; }, "grid -");
}

GridFunction pointwise_product(const GridFunction& a, const GridFunction& b) {
    return combine(a, b, [](double x, double y) { return x * y; }, "grid product");
}

GridFunction operator*(double s, const GridFunction& a) {
    std::vector<double> v(a.horizon().begin(), a.horizon().end());
    for (double& x : v) {
        x *= s;
    }
    return GridFunction(a.spec(), std::move(v));
}

GridFunction abs(const GridFunction& a) {
    std::vector<double> v(a.horizon().begin(), a.horizon().end());
    for (double& x : v) {
        x = std::abs(x);
    }
    return GridFunction(a.spec(), std::move(v));
}

}  // namespace wsv

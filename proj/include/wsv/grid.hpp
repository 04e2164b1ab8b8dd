#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace wsv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/**
 * Uniform grid on [-h, T].
 *
 * The horizon [0, T] is split into n_points cells of width dt = T / n_points.
 * The delay h must be a whole number of cells so that t - h lands on a node;
 * the prehistory [-h, 0) is stored explicitly as delay_steps() nodes.
 *
 * Node k of the full grid sits at (k - delay_steps()) * dt. Horizon index i
 * (0 <= i <= n_points) refers to t_i = i * dt.
 */
class GridSpec {
public:
    GridSpec(double t_end, std::size_t n_points, double h = 0.0);

    double t_start() const noexcept { return -h_; }
    double t_end() const noexcept { return t_end_; }
    double delay() const noexcept { return h_; }
    double step() const noexcept { return dt_; }
    std::size_t n_points() const noexcept { return n_points_; }

    /// Number of prehistory nodes, h / dt.
    std::size_t delay_steps() const noexcept { return delay_steps_; }
    /// Total nodes on [-h, T].
    std::size_t node_count() const noexcept { return delay_steps_ + n_points_ + 1; }
    /// Full-grid index of t = 0.
    std::size_t origin() const noexcept { return delay_steps_; }

    double node_time(std::size_t k) const noexcept;
    double horizon_time(std::size_t i) const noexcept { return static_cast<double>(i) * dt_; }

    /// Full-grid index of time t; throws when t is off-grid or outside [-h, T].
    std::size_t node_index(double t) const;
    bool is_node(double t) const noexcept;

    /// Same T, N and h (bitwise on the derived step).
    bool operator==(const GridSpec& other) const noexcept;

private:
    double t_end_;
    std::size_t n_points_;
    double h_;
    double dt_;
    std::size_t delay_steps_;
};

/// A real function sampled on every node of a GridSpec, zero on [-h, 0).
class GridFunction {
public:
    explicit GridFunction(GridSpec spec);
    /// `values` covers either every node of the grid or only the horizon [0, T].
    GridFunction(GridSpec spec, std::vector<double> values);

    static GridFunction sample(const GridSpec& spec, const std::function<double(double)>& f);
    static GridFunction constant(const GridSpec& spec, double c);

    const GridSpec& spec() const noexcept { return spec_; }
    std::span<const double> values() const noexcept { return values_; }
    /// Values on [0, T], indexed by horizon index.
    std::span<const double> horizon() const noexcept {
        return std::span<const double>(values_).subspan(spec_.origin());
    }
    double at(std::size_t horizon_index) const { return values_[spec_.origin() + horizon_index]; }
    double operator[](std::size_t node) const { return values_[node]; }

    /// Value at an arbitrary t in [-h, T] by linear interpolation on [0, T].
    double interpolate(double t) const;

    double sup_abs() const noexcept;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

/// Composite-trapezoid (int_a^b |f|^p)^{1/p}; p = kInfinity gives the nodal max.
/// The function is taken as zero on [-h, 0) with its jump at 0 preserved.
double lp_norm(const GridFunction& f, double p, double a, double b);
/// Norm over the horizon [0, T].
double lp_norm(const GridFunction& f, double p);

/// g(t) = f(t - h); zero wherever t - h <= 0 when h > 0 (closed prehistory).
GridFunction shift_by_delay(const GridFunction& f);

// Pointwise helpers. All require matching grids.
GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);
GridFunction pointwise_product(const GridFunction& a, const GridFunction& b);
GridFunction abs(const GridFunction& a);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

}  // namespace wsv

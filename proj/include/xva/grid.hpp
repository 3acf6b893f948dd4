#pragma once

#include <functional>
#include <span>
#include <vector>

#include "xva/errors.hpp"

namespace xva::fd {

/// Uniform rectangular lattice in (time, state). Time runs over [0, t_max]
/// with N = t_max/dt steps, state over [x_min, x_max] with M = span/dx
/// intervals. Both ratios must be integral to 1e-9.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    double dx = 0.0;
    double t_max = 0.0;
    double dt = 0.0;

    int space_intervals() const;  // M
    int time_steps() const;       // N
    int space_nodes() const { return space_intervals() + 1; }
    int time_nodes() const { return time_steps() + 1; }

    double x(int j) const { return x_min + j * dx; }
    double t(int i) const { return i * dt; }

    void validate() const;  // throws InvalidGrid
    bool same_as(const GridSpec& other) const;
    bool operator==(const GridSpec& other) const = default;
};

/// Coefficients of the spatial operator at one node:
///   A u = drift * u_x + 0.5 * diffusion_sq * u_xx - discount * u
struct LocalCoefficients {
    double drift = 0.0;
    double diffusion_sq = 0.0;
    double discount = 0.0;
};

struct TridiagonalSystem {
    std::vector<double> lower;  // size n-1
    std::vector<double> diag;   // size n
    std::vector<double> upper;  // size n-1
    std::vector<double> rhs;    // size n
};

/// Thomas elimination. Throws ZeroPivot if a pivot magnitude drops below 1e-14.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

/// How a boundary row of the implicit system is closed.
enum class BoundaryKind {
    /// Keep only the zeroth-order term: the row reduces to the ODE
    /// u_t - discount * u + source = 0. Meant for boundaries where drift and
    /// diffusion vanish (equity at s = 0).
    Degenerate,
    /// Impose zero second derivative; the drift term uses the one-sided
    /// difference, which equals the second-order one-sided stencil once the
    /// zero-curvature constraint is substituted in.
    LinearExtrapolation,
};

struct BoundaryPolicy {
    BoundaryKind lower = BoundaryKind::LinearExtrapolation;
    BoundaryKind upper = BoundaryKind::LinearExtrapolation;
};

/// Time-space lattice of solution values, row i = time level t_i.
class Surface {
public:
    Surface() = default;
    Surface(const GridSpec& grid, double fill = 0.0);

    const GridSpec& grid() const { return grid_; }

    double& at(int i, int j) { return values_[static_cast<std::size_t>(i) * cols_ + j]; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<double> row(int i) { return {values_.data() + static_cast<std::size_t>(i) * cols_, cols_}; }
    std::span<const double> row(int i) const {
        return {values_.data() + static_cast<std::size_t>(i) * cols_, cols_};
    }

    /// Bilinear interpolation; queries that land on a node (to relative
    /// tolerance 1e-7 of a step) return the stored value exactly.
    double query(double t, double x) const;

    double max_abs() const;
    /// max_ij |a - b|; grids must match.
    static double max_abs_diff(const Surface& a, const Surface& b);

private:
    GridSpec grid_{};
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// One backward Crank-Nicolson step (theta = 1/2) from the known level
/// `next` at t+dt to the returned level at t. Coefficient and source spans
/// hold per-node values at the target level (lo) and the known level (hi).
std::vector<double> crank_nicolson_backstep(std::span<const LocalCoefficients> coeffs_lo,
                                            std::span<const LocalCoefficients> coeffs_hi,
                                            std::span<const double> source_lo,
                                            std::span<const double> source_hi,
                                            std::span<const double> next_values,
                                            const BoundaryPolicy& boundary,
                                            double dx,
                                            double dt);

/// Full backward problem: terminal payoff plus node-wise operator coefficients.
struct PdeProblem {
    GridSpec grid;
    BoundaryPolicy boundary;
    std::function<LocalCoefficients(double t, double x)> coefficients;
    std::function<double(double x)> terminal;
};

using SourceField = std::function<double(double t, double x)>;

/// Solves u_t + drift u_x + 0.5 diffusion_sq u_xx - discount u + source = 0
/// backward from u(t_max, x) = terminal(x); returns the full surface.
Surface backward_solve(const PdeProblem& problem, const SourceField& source);

}  // namespace xva::fd

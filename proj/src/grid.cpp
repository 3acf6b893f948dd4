#include "xva/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xva::fd {

namespace {

int integral_ratio(double span, double step, const char* what) {
    if (!(step > 0.0)) {
        throw InvalidGrid(std::string(what) + " step must be positive");
    }
    const double ratio = span / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
        throw InvalidGrid(std::string(what) + " span is not an integral number of steps");
    }
    return static_cast<int>(rounded);
}

}  // namespace

int GridSpec::space_intervals() const { return integral_ratio(x_max - x_min, dx, "spatial"); }

int GridSpec::time_steps() const { return integral_ratio(t_max, dt, "time"); }

void GridSpec::validate() const {
    if (!(x_max > x_min)) {
        throw InvalidGrid("x_max must exceed x_min");
    }
    if (!(t_max > 0.0)) {
        throw InvalidGrid("t_max must be positive");
    }
    if (space_nodes() < 3) {
        throw InvalidGrid("grid needs at least 3 spatial nodes");
    }
    if (time_steps() < 1) {
        throw InvalidGrid("grid needs at least 1 time step");
    }
}

bool GridSpec::same_as(const GridSpec& other) const {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
    return close(x_min, other.x_min) && close(x_max, other.x_max) && close(dx, other.dx) &&
           close(t_max, other.t_max) && close(dt, other.dt);
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
    const std::size_t n = system.diag.size();
    if (system.rhs.size() != n || system.lower.size() + 1 != n || system.upper.size() + 1 != n) {
        throw ValidationError("tridiagonal system has inconsistent lengths");
    }

    std::vector<double> c_prime(n - 1), d_prime(n);
    double pivot = system.diag[0];
    if (std::abs(pivot) < 1e-14) {
        throw ZeroPivot(0);
    }
    if (n > 1) {
        c_prime[0] = system.upper[0] / pivot;
    }
    d_prime[0] = system.rhs[0] / pivot;

    for (std::size_t i = 1; i < n; ++i) {
        pivot = system.diag[i] - system.lower[i - 1] * c_prime[i - 1];
        if (std::abs(pivot) < 1e-14) {
            throw ZeroPivot(i);
        }
        if (i < n - 1) {
            c_prime[i] = system.upper[i] / pivot;
        }
        d_prime[i] = (system.rhs[i] - system.lower[i - 1] * d_prime[i - 1]) / pivot;
    }

    std::vector<double> x(n);
    x[n - 1] = d_prime[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    return x;
}

Surface::Surface(const GridSpec& grid, double fill)
    : grid_(grid),
      cols_(static_cast<std::size_t>(grid.space_nodes())),
      values_(static_cast<std::size_t>(grid.time_nodes()) * cols_, fill) {}

namespace {

// Index + interpolation weight along one axis, snapping to nodes.
struct AxisHit {
    int index;
    double frac;  // in [0,1); 0 means exactly on node `index`
};

AxisHit locate(double value, double origin, double step, int last_index) {
    double u = (value - origin) / step;
    const double snapped = std::round(u);
    if (std::abs(u - snapped) < 1e-7) {
        u = snapped;
    }
    if (u < 0.0 || u > static_cast<double>(last_index)) {
        throw ValidationError("surface query outside the grid");
    }
    int idx = static_cast<int>(std::floor(u));
    double frac = u - idx;
    if (idx == last_index) {
        idx = last_index - 1;
        frac = 1.0;
    }
    return {idx, frac};
}

}  // namespace

double Surface::query(double t, double x) const {
    const AxisHit ti = locate(t, 0.0, grid_.dt, grid_.time_steps());
    const AxisHit xj = locate(x, grid_.x_min, grid_.dx, grid_.space_intervals());

    const double v00 = at(ti.index, xj.index);
    const double v01 = at(ti.index, xj.index + 1);
    const double v10 = at(ti.index + 1, xj.index);
    const double v11 = at(ti.index + 1, xj.index + 1);

    const double lo = v00 + xj.frac * (v01 - v00);
    const double hi = v10 + xj.frac * (v11 - v10);
    return lo + ti.frac * (hi - lo);
}

double Surface::max_abs() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double Surface::max_abs_diff(const Surface& a, const Surface& b) {
    if (!a.grid_.same_as(b.grid_) || a.values_.size() != b.values_.size()) {
        throw GridMismatch("surfaces live on different grids");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.values_.size(); ++k) {
        m = std::max(m, std::abs(a.values_[k] - b.values_[k]));
    }
    return m;
}

namespace {

// Stencil weights of the spatial operator at node j for one time level.
struct Row {
    double lower = 0.0;
    double center = 0.0;
    double upper = 0.0;
};

Row operator_row(std::span<const LocalCoefficients> coeffs, int j, int last, double dx,
                 const BoundaryPolicy& boundary) {
    const LocalCoefficients& c = coeffs[j];
    Row row;
    if (j == 0) {
        if (boundary.lower == BoundaryKind::Degenerate) {
            row.center = -c.discount;
        } else {
            row.center = -c.drift / dx - c.discount;
            row.upper = c.drift / dx;
        }
    } else if (j == last) {
        if (boundary.upper == BoundaryKind::Degenerate) {
            row.center = -c.discount;
        } else {
            row.center = c.drift / dx - c.discount;
            row.lower = -c.drift / dx;
        }
    } else {
        const double diff = 0.5 * c.diffusion_sq / (dx * dx);
        const double adv = c.drift / (2.0 * dx);
        row.lower = diff - adv;
        row.center = -2.0 * diff - c.discount;
        row.upper = diff + adv;
    }
    return row;
}

}  // namespace

std::vector<double> crank_nicolson_backstep(std::span<const LocalCoefficients> coeffs_lo,
                                            std::span<const LocalCoefficients> coeffs_hi,
                                            std::span<const double> source_lo,
                                            std::span<const double> source_hi,
                                            std::span<const double> next_values,
                                            const BoundaryPolicy& boundary,
                                            double dx,
                                            double dt) {
    const std::size_t n = next_values.size();
    if (coeffs_lo.size() != n || coeffs_hi.size() != n || source_lo.size() != n ||
        source_hi.size() != n) {
        throw ValidationError("crank_nicolson_backstep: mismatched vector lengths");
    }
    if (!(dt > 0.0)) {
        throw ValidationError("crank_nicolson_backstep: dt must be positive");
    }
    const int last = static_cast<int>(n) - 1;
    const double half_dt = 0.5 * dt;

    TridiagonalSystem sys;
    sys.lower.resize(n - 1);
    sys.diag.resize(n);
    sys.upper.resize(n - 1);
    sys.rhs.resize(n);

    for (int j = 0; j <= last; ++j) {
        const Row lo = operator_row(coeffs_lo, j, last, dx, boundary);
        const Row hi = operator_row(coeffs_hi, j, last, dx, boundary);

        sys.diag[j] = 1.0 - half_dt * lo.center;
        if (j > 0) {
            sys.lower[j - 1] = -half_dt * lo.lower;
        }
        if (j < last) {
            sys.upper[j] = -half_dt * lo.upper;
        }

        double explicit_part = hi.center * next_values[j];
        if (j > 0) {
            explicit_part += hi.lower * next_values[j - 1];
        }
        if (j < last) {
            explicit_part += hi.upper * next_values[j + 1];
        }
        sys.rhs[j] = next_values[j] + half_dt * explicit_part +
                     half_dt * (source_lo[j] + source_hi[j]);
    }

    return solve_tridiagonal(sys);
}

Surface backward_solve(const PdeProblem& problem, const SourceField& source) {
    problem.grid.validate();
    const GridSpec& g = problem.grid;
    const int n_space = g.space_nodes();
    const int n_steps = g.time_steps();

    Surface surface(g);
    for (int j = 0; j < n_space; ++j) {
        surface.at(n_steps, j) = problem.terminal(g.x(j));
    }

    std::vector<LocalCoefficients> coeffs_hi(n_space), coeffs_lo(n_space);
    std::vector<double> source_hi(n_space), source_lo(n_space);
    auto fill_level = [&](int i, std::vector<LocalCoefficients>& cs, std::vector<double>& ss) {
        const double t = g.t(i);
        for (int j = 0; j < n_space; ++j) {
            cs[j] = problem.coefficients(t, g.x(j));
            ss[j] = source(t, g.x(j));
        }
    };

    fill_level(n_steps, coeffs_hi, source_hi);
    std::vector<double> next(surface.row(n_steps).begin(), surface.row(n_steps).end());

    for (int i = n_steps - 1; i >= 0; --i) {
        fill_level(i, coeffs_lo, source_lo);
        std::vector<double> current = crank_nicolson_backstep(
            coeffs_lo, coeffs_hi, source_lo, source_hi, next, problem.boundary, g.dx, g.dt);
        std::copy(current.begin(), current.end(), surface.row(i).begin());
        next = std::move(current);
        coeffs_hi.swap(coeffs_lo);
        source_hi.swap(source_lo);
    }
    return surface;
}

}  // namespace xva::fd

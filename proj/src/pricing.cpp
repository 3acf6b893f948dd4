#include "xva/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace xva {

namespace {

double positive_part(double y) { return y > 0.0 ? y : 0.0; }

}  // namespace

XvaCoefficients alpha_beta(const PartyParams& p1, const PartyParams& p2) {
    p1.validate();
    p2.validate();
    const double alpha = p2.loss_rate * p2.intensity * positive_part(1.0 - p2.collateral_ratio) -
                         p1.loss_rate * p1.intensity * positive_part(p2.collateral_ratio - 1.0) +
                         p2.collateral_rate * p2.collateral_ratio;
    const double beta = p1.loss_rate * p1.intensity * positive_part(1.0 - p1.collateral_ratio) -
                        p2.loss_rate * p2.intensity * positive_part(p1.collateral_ratio - 1.0) +
                        p1.collateral_rate * p1.collateral_ratio;
    const double lambda = p1.intensity + p2.intensity;
    return {
        .alpha = alpha,
        .beta = beta,
        .lambda_counterparties = lambda,
        .lipschitz_bound = std::abs(lambda - beta) + std::abs(beta - alpha),
    };
}

double source_f(const XvaCoefficients& coeffs, double h_plus_lambda_l, double y, Side side) {
    double value = h_plus_lambda_l + (coeffs.lambda_counterparties - coeffs.beta) * y;
    if (side == Side::Buyer) {
        value += (coeffs.beta - coeffs.alpha) * positive_part(y);
    } else {
        value -= (coeffs.beta - coeffs.alpha) * positive_part(-y);
    }
    return value;
}

fd::Surface solve_crf(const PricingProblem& problem) {
    fd::PdeProblem pde{
        .grid = problem.grid,
        .boundary = problem.boundary,
        .coefficients = problem.crf_coefficients,
        .terminal = problem.claim.terminal,
    };
    auto source = [&problem](double t, double x) {
        return problem.claim.dividend(x) + problem.crf_default_leg(t, x);
    };
    return fd::backward_solve(pde, source);
}

fd::Surface solve_without_provision(const PricingProblem& problem, const fd::Surface& crf,
                                    Side side) {
    if (!crf.grid().same_as(problem.grid)) {
        throw GridMismatch("CRF surface grid does not match the pricing grid");
    }
    fd::PdeProblem pde{
        .grid = problem.grid,
        .boundary = problem.boundary,
        .coefficients = problem.full_coefficients,
        .terminal = problem.claim.terminal,
    };
    auto source = [&problem, &crf, side](double t, double x) {
        const double base = problem.claim.dividend(x) + problem.default_leg(t, x);
        return source_f(problem.adj, base, crf.query(t, x), side);
    };
    return fd::backward_solve(pde, source);
}

namespace {

// Sup-norm of (current - previous), either over the whole grid or over the
// spatial slice at the requested time.
double iteration_error(const fd::Surface& current, const fd::Surface& previous,
                       const std::optional<double>& slice_time) {
    if (!slice_time) {
        return fd::Surface::max_abs_diff(current, previous);
    }
    const fd::GridSpec& g = current.grid();
    const double steps = *slice_time / g.dt;
    const int row = static_cast<int>(std::round(steps));
    if (row < 0 || row > g.time_steps() ||
        std::abs(steps - row) > 1e-7 * std::max(1.0, std::abs(steps))) {
        throw ValidationError("error slice time does not land on a grid level");
    }
    double m = 0.0;
    for (int j = 0; j < g.space_nodes(); ++j) {
        m = std::max(m, std::abs(current.at(row, j) - previous.at(row, j)));
    }
    return m;
}

}  // namespace

std::pair<fd::Surface, IterationReport> solve_with_provision(const PricingProblem& problem,
                                                             Side side,
                                                             const SolverOptions& options) {
    problem.grid.validate();
    if (options.initial && !options.initial->grid().same_as(problem.grid)) {
        throw GridMismatch("initial surface grid does not match the pricing grid");
    }

    const bool implicit_linear = options.scheme == IterationScheme::ImplicitLinear;
    const double kink = problem.adj.beta - problem.adj.alpha;
    const double linear = problem.adj.lambda_counterparties - problem.adj.beta;

    fd::PdeProblem pde{
        .grid = problem.grid,
        .boundary = problem.boundary,
        .coefficients = problem.full_coefficients,
        .terminal = problem.claim.terminal,
    };
    if (implicit_linear) {
        // Fold the linear exposure term into the discount rate.
        pde.coefficients = [&problem, linear](double t, double x) {
            fd::LocalCoefficients c = problem.full_coefficients(t, x);
            c.discount -= linear;
            return c;
        };
    }

    fd::Surface previous =
        options.initial ? *options.initial : fd::Surface(problem.grid, 0.0);
    IterationReport report;
    report.tolerance = options.tolerance;
    report.lipschitz = problem.adj.lipschitz_bound;

    for (int n = 1; n <= options.max_iter; ++n) {
        auto source = [&](double t, double x) {
            const double base = problem.claim.dividend(x) + problem.default_leg(t, x);
            const double y = previous.query(t, x);
            if (implicit_linear) {
                const double exposure = side == Side::Buyer ? positive_part(y) : -positive_part(-y);
                return base + kink * exposure;
            }
            return source_f(problem.adj, base, y, side);
        };
        fd::Surface current = fd::backward_solve(pde, source);

        const double err = iteration_error(current, previous, options.error_slice_time);
        report.errors.push_back(err);
        if (options.probe) {
            report.probe_values.push_back(current.query(options.probe->first, options.probe->second));
        }
        report.iterations = n;
        previous = std::move(current);
        if (err <= options.tolerance) {
            report.converged = true;
            return {std::move(previous), std::move(report)};
        }
    }
    throw NoConvergence(report.iterations, report.errors.back(), options.tolerance);
}

BidAskResult bid_ask(const PricingProblem& problem, const SolverOptions& options) {
    auto [bid, bid_report] = solve_with_provision(problem, Side::Buyer, options);
    auto [ask, ask_report] = solve_with_provision(problem, Side::Seller, options);

    fd::Surface spread(problem.grid);
    const fd::GridSpec& g = problem.grid;
    for (int i = 0; i < g.time_nodes(); ++i) {
        for (int j = 0; j < g.space_nodes(); ++j) {
            spread.at(i, j) = ask.at(i, j) - bid.at(i, j);
        }
    }
    return {
        .bid = std::move(bid),
        .ask = std::move(ask),
        .spread = std::move(spread),
        .bid_report = std::move(bid_report),
        .ask_report = std::move(ask_report),
    };
}

namespace {

double forward_value_at_spot(const ForwardSetup& setup, Side side, double trial_f0) {
    const ClaimTriplet claim = equity_forward(trial_f0, setup.model.r, setup.maturity);
    const PricingProblem problem =
        make_equity_problem(setup.model, setup.p1, setup.p2, claim, setup.grid, setup.convention);
    auto [surface, report] = solve_with_provision(problem, side, setup.options);
    return surface.query(0.0, setup.spot);
}

}  // namespace

double fair_forward_price(const ForwardSetup& setup, Side side) {
    setup.model.validate();
    if (!(setup.spot > 0.0)) {
        throw ValidationError("fair forward search requires a positive spot");
    }
    const double anchor = setup.spot * std::exp(setup.model.r * setup.maturity);

    double lo = 0.5 * anchor;
    double hi = 1.5 * anchor;
    double v_lo = forward_value_at_spot(setup, side, lo);
    double v_hi = forward_value_at_spot(setup, side, hi);

    // The value decreases in F0; widen the bracket a few times if both
    // endpoints are on the same side of zero.
    for (int attempt = 0; v_lo * v_hi > 0.0; ++attempt) {
        if (attempt >= 4) {
            throw NoBracket("fair forward bisection could not bracket a sign change");
        }
        lo *= 0.5;
        hi *= 2.0;
        v_lo = forward_value_at_spot(setup, side, lo);
        v_hi = forward_value_at_spot(setup, side, hi);
    }

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double v_mid = forward_value_at_spot(setup, side, mid);
        if (std::abs(v_mid) <= 1e-6 || hi - lo <= 1e-8 * anchor) {
            return mid;
        }
        if ((v_mid > 0.0) == (v_lo > 0.0)) {
            lo = mid;
            v_lo = v_mid;
        } else {
            hi = mid;
        }
    }
    throw NoConvergence(200, hi - lo, 1e-8 * anchor);
}

PricingProblem make_equity_problem(const EquityModel& model, const PartyParams& p1,
                                   const PartyParams& p2, const ClaimTriplet& claim,
                                   const fd::GridSpec& grid, JumpConvention convention) {
    model.validate();
    grid.validate();
    const XvaCoefficients adj = alpha_beta(p1, p2);
    const double lambda12 = p1.intensity + p2.intensity;
    const bool compensated = convention == JumpConvention::Compensated;
    auto lambda0 = [intensity = model.ref_intensity](double, double s) {
        return intensity.value(s);
    };
    auto crf_leg = [intensity = model.ref_intensity, at_default = claim.at_default](double t,
                                                                                    double s) {
        return intensity.value(s) * at_default(t, s);
    };
    std::function<double(double, double)> risky_leg = crf_leg;
    if (!compensated) {
        risky_leg = [intensity = model.ref_intensity, at_default = claim.at_default,
                     T = claim.maturity](double t, double s) {
            const double lam = intensity.value(s);
            return lam * at_default(t, s) * std::exp(-lam * (T - t));
        };
    }
    return {
        .grid = grid,
        .boundary = {.lower = fd::BoundaryKind::Degenerate,
                     .upper = fd::BoundaryKind::LinearExtrapolation},
        .claim = claim,
        .adj = adj,
        .ref_intensity = lambda0,
        .crf_coefficients =
            [model](double, double s) {
                const double rate = model.r + model.ref_intensity.value(s);
                return fd::LocalCoefficients{
                    .drift = rate * s,
                    .diffusion_sq = model.sigma * model.sigma * s * s,
                    .discount = rate,
                };
            },
        .full_coefficients =
            [model, lambda12, compensated](double, double s) {
                const double lam0 = model.ref_intensity.value(s);
                return fd::LocalCoefficients{
                    .drift = (model.r + (compensated ? lam0 : 0.0)) * s,
                    .diffusion_sq = model.sigma * model.sigma * s * s,
                    .discount = model.r + lam0 + lambda12,
                };
            },
        .crf_default_leg = crf_leg,
        .default_leg = risky_leg,
    };
}

PricingProblem make_factor_problem(const FactorModel& model, double r, const PartyParams& p1,
                                   const PartyParams& p2, const ClaimTriplet& claim,
                                   const fd::GridSpec& grid) {
    model.validate();
    grid.validate();
    const XvaCoefficients adj = alpha_beta(p1, p2);
    auto lambda0 = [model](double, double x) { return model.ref_intensity(x); };
    return {
        .grid = grid,
        .boundary = {.lower = fd::BoundaryKind::LinearExtrapolation,
                     .upper = fd::BoundaryKind::LinearExtrapolation},
        .claim = claim,
        .adj = adj,
        .ref_intensity = lambda0,
        .crf_coefficients =
            [model, r](double t, double x) {
                fd::LocalCoefficients c = factor_coefficients(model, PartyParams{}, PartyParams{}, r, t, x);
                return c;
            },
        .full_coefficients = [model, p1, p2, r](double t, double x) {
            return factor_coefficients(model, p1, p2, r, t, x);
        },
        .crf_default_leg = [model, at_default = claim.at_default](double t, double x) {
            return model.ref_intensity(x) * at_default(t, x);
        },
        .default_leg = [model, at_default = claim.at_default](double t, double x) {
            return model.ref_intensity(x) * at_default(t, x);
        },
    };
}

}  // namespace xva

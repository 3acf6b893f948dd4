#include "xva/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace xva::analytic {

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    if (!(b > a)) {
        return 0.0;
    }
    if (intervals < 2) {
        intervals = 2;
    }
    if (intervals % 2 != 0) {
        ++intervals;
    }
    const double h = (b - a) / intervals;
    double acc = f(a) + f(b);
    for (int k = 1; k < intervals; ++k) {
        acc += (k % 2 == 1 ? 4.0 : 2.0) * f(a + k * h);
    }
    return acc * h / 3.0;
}

double bs_call(double t, double s, double T, double K, double rate, double sigma) {
    if (!(K > 0.0) || !(sigma > 0.0)) {
        throw ValidationError("bs_call requires K > 0 and sigma > 0");
    }
    const double tau = T - t;
    if (tau <= 0.0) {
        return std::max(s - K, 0.0);
    }
    if (s <= 0.0) {
        return 0.0;
    }
    const double vol = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / K) + (rate + 0.5 * sigma * sigma) * tau) / vol;
    const double d2 = d1 - vol;
    return s * norm_cdf(d1) - K * std::exp(-rate * tau) * norm_cdf(d2);
}

double crf_call_spread(const CallSpreadParams& params, double t, double s, double T, double r,
                       double lambda0, double sigma) {
    params.validate();
    const double rate = r + lambda0;
    const double slope = params.slope();
    const double lo = bs_call(t, s, T, params.strike - params.eps_lo, rate, sigma);
    const double hi = bs_call(t, s, T, params.strike + params.eps_hi, rate, sigma);
    return slope * (lo - hi) - std::exp(-r * (T - t)) * params.m_lo;
}

namespace {

// Per-unit-spot drift and full discount of the engine's equity operator;
// only valid for a constant reference intensity.
struct EquityRates {
    double drift;
    double discount;
    double lambda0;
};

EquityRates equity_rates(const EquityModel& model, const PartyParams& p1, const PartyParams& p2,
                         JumpConvention convention) {
    if (model.ref_intensity.is_local()) {
        throw ValidationError("closed forms require a constant reference intensity");
    }
    const double lambda0 = model.ref_intensity.value(1.0);
    const double drift =
        model.r + (convention == JumpConvention::Compensated ? lambda0 : 0.0);
    return {drift, model.r + lambda0 + p1.intensity + p2.intensity, lambda0};
}

}  // namespace

ForwardQuotes forward_prices_without_provision(double F0, double t, double s, double T,
                                               const EquityModel& model, const PartyParams& p1,
                                               const PartyParams& p2, int intervals,
                                               JumpConvention convention) {
    model.validate();
    if (!(F0 > 0.0) || !(T > t)) {
        throw ValidationError("forward quotes require F0 > 0 and T > t");
    }
    if (intervals <= 0) {
        intervals = 200;
    }
    const EquityRates rates = equity_rates(model, p1, p2, convention);
    const XvaCoefficients adj = alpha_beta(p1, p2);
    const double r = model.r;
    const double a = rates.drift;
    const double full = rates.discount;
    // Survival discount carried by the at-default leg under the
    // uncompensated convention.
    const double leg_rate =
        r + (convention == JumpConvention::Uncompensated ? rates.lambda0 : 0.0);

    ForwardQuotes quotes;
    quotes.crf = s - std::exp(-r * (T - t)) * F0;

    // Terminal leg and the lambda0 default leg, common to both sides.
    const double terminal =
        s * std::exp(-(full - a) * (T - t)) - F0 * std::exp(-full * (T - t));
    auto default_leg = [&](double u) {
        return -rates.lambda0 * F0 * std::exp(-full * (u - t)) * std::exp(-leg_rate * (T - u));
    };

    // Discounted expectations of the CRF exposure and its positive part.
    auto linear_part = [&](double u) {
        const double strike_u = std::exp(-r * (T - u)) * F0;
        return s * std::exp(-(full - a) * (u - t)) -
               strike_u * std::exp(-full * (u - t));
    };
    auto call_part = [&](double u) {
        if (u <= t) {
            return std::max(quotes.crf, 0.0);
        }
        const double strike_u = std::exp(-r * (T - u)) * F0;
        return std::exp(-(full - a) * (u - t)) *
               bs_call(t, s, u, strike_u, a, model.sigma);
    };

    const double lin_coeff = adj.lambda_counterparties - adj.beta;
    const double kink = adj.beta - adj.alpha;
    auto bid_integrand = [&](double u) {
        return default_leg(u) + lin_coeff * linear_part(u) + kink * call_part(u);
    };
    auto ask_integrand = [&](double u) {
        // f-tilde: the kink acts on the negative part (a put), rewritten via
        // put = call - exposure.
        return default_leg(u) + lin_coeff * linear_part(u) -
               kink * (call_part(u) - linear_part(u));
    };

    quotes.bid = terminal + simpson(bid_integrand, t, T, intervals);
    quotes.ask = terminal + simpson(ask_integrand, t, T, intervals);
    return quotes;
}

double positive_payoff_price(const ClaimTriplet& claim, double strike, Side side,
                             bool with_provision, const EquityModel& model, const PartyParams& p1,
                             const PartyParams& p2, double t, double s) {
    model.validate();
    if (!(strike > 0.0)) {
        throw ValidationError("positive payoff closed form requires a positive strike");
    }
    // Certify g, h, l >= 0 on a sample of the state space.
    const double span = 10.0 * std::max(strike, s);
    for (int k = 0; k <= 80; ++k) {
        const double state = span * k / 80.0;
        const double mid_t = t + 0.5 * (claim.maturity - t);
        if (claim.terminal(state) < -1e-12 || claim.dividend(state) < -1e-12 ||
            claim.at_default(mid_t, state) < -1e-12) {
            throw NegativePayoff("claim is not certified nonnegative");
        }
    }

    const EquityRates rates = equity_rates(model, p1, p2, JumpConvention::Compensated);
    const XvaCoefficients coeffs = alpha_beta(p1, p2);
    const double adj = side == Side::Buyer ? coeffs.alpha : coeffs.beta;
    const double tau = claim.maturity - t;
    const double crf = bs_call(t, s, claim.maturity, strike, model.r + rates.lambda0, model.sigma);
    if (with_provision) {
        return std::exp(-adj * tau) * crf;
    }
    const double lam = coeffs.lambda_counterparties;
    const double annuity = lam > 1e-12 ? -std::expm1(-lam * tau) / lam : tau;
    return (1.0 - adj * annuity) * crf;
}

AffineBondTerms ou_bond_terms(const FactorModel& model, double u, int intervals) {
    if (model.kind != FactorKind::OU) {
        throw ValidationError("ou_bond_terms called with a non-OU model");
    }
    if (u <= 0.0) {
        return {0.0, 0.0};
    }
    if (intervals <= 0) {
        intervals = std::max(500, static_cast<int>(std::ceil(u * 100)));
    }
    const double kappa = model.kappa;
    const double w0 = model.w0;
    auto b1 = [kappa](double v) { return -std::expm1(-kappa * v) / kappa; };
    auto integrand = [&](double v) {
        const double b = b1(v);
        return 0.5 * model.sigma * model.sigma * w0 * w0 * b * b -
               model.kappa * model.theta * w0 * b;
    };
    return {simpson(integrand, 0.0, u, intervals), w0 * b1(u)};
}

namespace {

double cir_xi(const FactorModel& model) {
    return std::sqrt(model.kappa * model.kappa + 2.0 * model.sigma * model.sigma * model.w0);
}

}  // namespace

AffineBondTerms cir_bond_terms(const FactorModel& model, double u) {
    if (model.kind != FactorKind::CIR) {
        throw ValidationError("cir_bond_terms called with a non-CIR model");
    }
    model.validate();
    if (u <= 0.0) {
        return {0.0, 0.0};
    }
    const double xi = cir_xi(model);
    const double kappa = model.kappa;
    const double growth = std::expm1(xi * u);  // e^{xi u} - 1
    const double denom = (xi + kappa) * growth + 2.0 * xi;
    const double log_a2 =
        2.0 * kappa * model.theta / (model.sigma * model.sigma) *
        (std::log(2.0 * xi) + 0.5 * u * (xi + kappa) - std::log(denom));
    const double b2 = 2.0 * model.w0 * growth / denom;
    return {log_a2, b2};
}

double cir_b_term_derivative(const FactorModel& model, double u) {
    const double xi = cir_xi(model);
    const double denom = (xi + model.kappa) * std::expm1(xi * u) + 2.0 * xi;
    return 4.0 * model.w0 * xi * xi * std::exp(xi * u) / (denom * denom);
}

double bond_price(const FactorModel& model, double t, double x, double T, double r,
                  int intervals) {
    model.validate();
    if (T < t) {
        throw ValidationError("bond_price requires T >= t");
    }
    const double u = T - t;
    const AffineBondTerms terms = model.kind == FactorKind::OU
                                      ? ou_bond_terms(model, u, intervals)
                                      : cir_bond_terms(model, u);
    if (model.kind == FactorKind::CIR && x < 0.0) {
        throw NegativeState("CIR bond price evaluated at negative state");
    }
    return std::exp(-(r + model.psi0) * u) * std::exp(terms.a_term - terms.b_term * x);
}

namespace {

// Expected reference intensity under the survival-weighted measure at
// horizon v, read off the affine bond exponent.
double twisted_intensity(const FactorModel& model, double v) {
    if (model.kind == FactorKind::CIR) {
        const AffineBondTerms terms = cir_bond_terms(model, v);
        return model.kappa * model.theta * terms.b_term;
    }
    const double b1 = -std::expm1(-model.kappa * v) / model.kappa;
    return model.kappa * model.theta * model.w0 * b1 -
           0.5 * model.sigma * model.sigma * model.w0 * model.w0 * b1 * b1;
}

double twisted_intensity_slope(const FactorModel& model, double v) {
    if (model.kind == FactorKind::CIR) {
        return cir_b_term_derivative(model, v);
    }
    return model.w0 * std::exp(-model.kappa * v);
}

}  // namespace

double cds_upfront(const FactorModel& model, double t, double x, double T, double premium,
                   double r, int intervals) {
    model.validate();
    if (!(T > t)) {
        throw ValidationError("cds_upfront requires T > t");
    }
    if (intervals <= 0) {
        intervals = 500;
    }
    auto integrand = [&](double u) {
        const double v = u - t;
        const double expected_intensity =
            model.psi0 + twisted_intensity(model, v) + twisted_intensity_slope(model, v) * x;
        return bond_price(model, t, x, u, r) * (expected_intensity - premium);
    };
    return simpson(integrand, t, T, intervals);
}

double trs_upfront(const FactorModel& model, double t, double x, double T, double T_prime,
                   double premium, double strike, double r, int intervals) {
    model.validate();
    if (T_prime < T) {
        throw ValidationError("bond TRS requires T' >= T");
    }
    if (intervals <= 0) {
        intervals = 500;
    }
    auto bond = [&](double u) { return bond_price(model, t, x, u, r); };
    return bond(T_prime) - strike * (1.0 + premium * simpson(bond, t, T, intervals));
}

}  // namespace xva::analytic

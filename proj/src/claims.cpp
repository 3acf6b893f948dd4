#include "xva/claims.hpp"

#include <cmath>
#include <utility>

namespace xva {

void CallSpreadParams::validate() const {
    if (!(eps_lo > 0.0) || !(eps_hi > 0.0) || !(m_lo > 0.0) || !(m_hi > 0.0)) {
        throw ValidationError("call spread band widths and payouts must be positive");
    }
    if (std::abs(m_lo / eps_lo - m_hi / eps_hi) > 1e-12 * (m_lo / eps_lo)) {
        throw SlopeMismatch("call spread payoff slopes m1/eps1 and m2/eps2 differ");
    }
}

ClaimTriplet call_spread(const CallSpreadParams& params, double r, double maturity) {
    params.validate();
    const double slope = params.slope();
    const double lo = params.strike - params.eps_lo;
    const double hi = params.strike + params.eps_hi;
    return {
        .terminal =
            [params, slope, lo, hi](double s) {
                if (s < lo) {
                    return -params.m_lo;
                }
                if (s > hi) {
                    return params.m_hi;
                }
                return slope * (s - params.strike);
            },
        .dividend = [](double) { return 0.0; },
        .at_default =
            [m1 = params.m_lo, r, maturity](double t, double) {
                return -m1 * std::exp(-r * (maturity - t));
            },
        .maturity = maturity,
    };
}

ClaimTriplet equity_forward(double F0, double r, double maturity) {
    if (!(F0 > 0.0)) {
        throw ValidationError("forward price F0 must be positive");
    }
    return {
        .terminal = [F0](double s) { return s - F0; },
        .dividend = [](double) { return 0.0; },
        .at_default =
            [F0, r, maturity](double t, double) { return -F0 * std::exp(-r * (maturity - t)); },
        .maturity = maturity,
    };
}

ClaimTriplet equity_trs(double S0, double premium, double r, double maturity) {
    if (!(S0 > 0.0)) {
        throw ValidationError("TRS notional S0 must be positive");
    }
    if (premium < r) {
        throw ValidationError("TRS premium rate must be at least the risk-free rate");
    }
    ClaimTriplet triplet = equity_forward(S0, r, maturity);
    triplet.dividend = [cash = premium * S0](double) { return -cash; };
    return triplet;
}

ClaimTriplet cds(double premium, double maturity) {
    if (premium < 0.0) {
        throw ValidationError("CDS premium must be nonnegative");
    }
    return {
        .terminal = [](double) { return 0.0; },
        .dividend = [premium](double) { return -premium; },
        .at_default = [](double, double) { return 1.0; },
        .maturity = maturity,
    };
}

ClaimTriplet bond_trs(double maturity, double bond_maturity, double premium, double strike,
                      double r, std::function<double(double t, double x, double T)> bond_price) {
    if (bond_maturity < maturity) {
        throw ValidationError("bond TRS requires T' >= T");
    }
    if (!(strike > 0.0)) {
        throw ValidationError("bond TRS strike must be positive");
    }
    return {
        .terminal =
            [pricer = std::move(bond_price), maturity, bond_maturity, strike](double x) {
                return pricer(maturity, x, bond_maturity) - strike;
            },
        .dividend = [cash = strike * (r + premium)](double) { return -cash; },
        .at_default = [strike](double, double) { return -strike; },
        .maturity = maturity,
    };
}

}  // namespace xva

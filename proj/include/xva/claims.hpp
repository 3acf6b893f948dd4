#pragma once

#include <functional>

#include "xva/errors.hpp"
#include "xva/models.hpp"

namespace xva {

/// Contract cash flows: terminal payoff g(state), dividend rate h(state)
/// (per year), and payoff l(t, state) at the reference default.
struct ClaimTriplet {
    std::function<double(double state)> terminal;
    std::function<double(double state)> dividend;
    std::function<double(double t, double state)> at_default;
    double maturity = 0.0;
};

struct CallSpreadParams {
    double strike = 0.0;  // K
    double eps_lo = 0.0;  // band half-width below K
    double eps_hi = 0.0;  // band half-width above K
    double m_lo = 0.0;    // payout floor magnitude
    double m_hi = 0.0;    // payout cap

    double slope() const { return m_lo / eps_lo; }
    void validate() const;  // throws SlopeMismatch

    bool operator==(const CallSpreadParams& other) const = default;
};

/// Call spread: g ramps from -m_lo to +m_hi across [K - eps_lo, K + eps_hi];
/// at the reference default the holder owes the discounted floor.
ClaimTriplet call_spread(const CallSpreadParams& params, double r, double maturity);

/// Long forward struck at F0: (S_T - F0, 0, -F0 e^{-r (T - tau)}).
ClaimTriplet equity_forward(double F0, double r, double maturity);

/// Equity total return swap on notional S0 paying premium rate p. The
/// premium is applied to the notional, so the dividend leg is -p * S0 per
/// year (see README on the rate convention).
ClaimTriplet equity_trs(double S0, double premium, double r, double maturity);

/// Standardized CDS quoted with running premium: (0, -p, 1).
ClaimTriplet cds(double premium, double maturity);

/// TRS on a zero-recovery bond maturing at T' >= T: the buyer receives
/// C(T, x; T') - K at expiry, pays K (r + p) per year, and pays K at the
/// reference default. `bond_price(t, x, maturity)` supplies C.
ClaimTriplet bond_trs(double maturity, double bond_maturity, double premium, double strike,
                      double r, std::function<double(double t, double x, double T)> bond_price);

}  // namespace xva

#pragma once

#include <functional>

#include "xva/claims.hpp"
#include "xva/models.hpp"
#include "xva/party.hpp"
#include "xva/pricing.hpp"

namespace xva::analytic {

double norm_cdf(double z);

/// Composite Simpson rule over [a, b] with an even number of intervals
/// (odd counts are rounded up).
double simpson(const std::function<double(double)>& f, double a, double b, int intervals);

/// Black-Scholes call value at time t, spot s, expiry T, strike K.
double bs_call(double t, double s, double T, double K, double rate, double sigma);

/// Counterparty-risk-free value of the call spread: a long/short call pair
/// at strikes K -/+ eps priced at rate r + lambda0, less the discounted
/// floor payment m1.
double crf_call_spread(const CallSpreadParams& params, double t, double s, double T, double r,
                       double lambda0, double sigma);

struct ForwardQuotes {
    double crf = 0.0;
    double bid = 0.0;
    double ask = 0.0;
};

/// Bid/ask of a stock forward without provision: the CRF value plus the
/// exposure integral, computed by composite Simpson (step <= (T-t)/200 by
/// default). Requires a constant reference intensity. The quotes mirror the
/// PDE engine under the same jump convention.
ForwardQuotes forward_prices_without_provision(double F0, double t, double s, double T,
                                               const EquityModel& model, const PartyParams& p1,
                                               const PartyParams& p2, int intervals = 0,
                                               JumpConvention convention = JumpConvention::Compensated);

/// European call under bilateral risk, closed form. With provision the CRF
/// discount is shifted by alpha (buyer) or beta (seller); without provision
/// the Black-Scholes value is scaled by 1 - adj (1 - e^{-lam t}) / lam.
/// The claim triplet is sampled for nonnegativity; NegativePayoff otherwise.
double positive_payoff_price(const ClaimTriplet& claim, double strike, Side side,
                             bool with_provision, const EquityModel& model, const PartyParams& p1,
                             const PartyParams& p2, double t, double s);

/// Affine exponent pieces of the pre-default bond price at horizon u:
/// bond = e^{-(r+psi0) u} e^{a_term - b_term x}. For OU a_term = A1 and
/// b_term = w0 B1; for CIR a_term = log A2 and b_term = B2.
struct AffineBondTerms {
    double a_term = 0.0;
    double b_term = 0.0;
};

AffineBondTerms ou_bond_terms(const FactorModel& model, double u, int intervals = 0);
AffineBondTerms cir_bond_terms(const FactorModel& model, double u);

/// d/du of the CIR b_term, used in the CDS protection-leg integrand.
double cir_b_term_derivative(const FactorModel& model, double u);

/// Pre-default zero-recovery bond price C(t, x; T).
double bond_price(const FactorModel& model, double t, double x, double T, double r,
                  int intervals = 0);

/// CDS upfront: integral of the bond-discounted expected default intensity
/// net of the running premium, Simpson step <= (T-t)/500 by default.
double cds_upfront(const FactorModel& model, double t, double x, double T, double premium,
                   double r, int intervals = 0);

/// Bond TRS upfront: C(t,x;T') - K (1 + p * integral of C(t,x;u) du).
double trs_upfront(const FactorModel& model, double t, double x, double T, double T_prime,
                   double premium, double strike, double r, int intervals = 0);

}  // namespace xva::analytic

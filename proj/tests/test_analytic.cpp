#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "xva/analytic.hpp"
#include "xva/claims.hpp"
#include "xva/pricing.hpp"

using namespace xva;
namespace an = xva::analytic;

namespace {

// Independent Black-Scholes oracle: direct lognormal quadrature of the
// discounted payoff over the standard normal variable.
double bs_call_quadrature(double t, double s, double T, double K, double rate, double sigma) {
    const double tau = T - t;
    auto integrand = [&](double z) {
        const double st = s * std::exp((rate - 0.5 * sigma * sigma) * tau +
                                       sigma * std::sqrt(tau) * z);
        const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        return (st - K) * density;
    };
    // integrate only over the in-the-money region; the integrand is smooth
    // there, so composite Simpson converges at full order
    const double z_star = (std::log(K / s) - (rate - 0.5 * sigma * sigma) * tau) /
                          (sigma * std::sqrt(tau));
    return std::exp(-rate * tau) * an::simpson(integrand, z_star, 10.0, 4000);
}

// Independent OU bond oracle: the integrated OU process is Gaussian with
// known mean and variance, so the survival expectation is a moment
// generating function evaluation.
double ou_bond_gaussian(const FactorModel& m, double x, double u, double r) {
    const double b1 = -std::expm1(-m.kappa * u) / m.kappa;
    const double mean = m.theta * u + (x - m.theta) * b1;
    const double var = m.sigma * m.sigma / (m.kappa * m.kappa) *
                       (u - 2.0 * b1 - 0.5 * std::expm1(-2.0 * m.kappa * u) / m.kappa);
    return std::exp(-(r + m.psi0) * u) *
           std::exp(-m.w0 * mean + 0.5 * m.w0 * m.w0 * var);
}

const FactorModel kCir{.kind = FactorKind::CIR, .kappa = 0.05, .theta = 0.03, .sigma = 0.05,
                       .psi0 = 0.0, .w0 = 1.0, .x_cap = 0.20};
const FactorModel kOu{.kind = FactorKind::OU, .kappa = 0.05, .theta = 0.03, .sigma = 0.035,
                      .psi0 = 0.0, .w0 = 1.0, .x_cap = 0.20};

// CRF factor solve of a claim triplet on the given grid.
fd::Surface crf_solve(const FactorModel& model, const ClaimTriplet& claim,
                      const fd::GridSpec& grid) {
    const PartyParams none{};
    return solve_crf(make_factor_problem(model, 0.02, none, none, claim, grid));
}

const fd::GridSpec kCirGrid{.x_min = 0.0, .x_max = 0.2, .dx = 0.001, .t_max = 5.0, .dt = 0.002};
// The OU solve uses the same truncated nonnegative domain as the CIR one;
// on it the reference intensity cap/floor is inactive, which is what makes
// the affine closed form comparable.
const fd::GridSpec kOuGrid{.x_min = 0.0, .x_max = 0.2, .dx = 0.001, .t_max = 5.0, .dt = 0.002};

}  // namespace

TEST_CASE("Black-Scholes call against the lognormal quadrature oracle") {
    for (double s : {5.0, 10.0, 15.0}) {
        const double exact = an::bs_call(0.0, s, 1.0, 10.0, 0.05, 0.25);
        CHECK(std::abs(exact - bs_call_quadrature(0.0, s, 1.0, 10.0, 0.05, 0.25)) < 1e-8);
    }
    // degenerate cases
    CHECK(an::bs_call(1.0, 12.0, 1.0, 10.0, 0.05, 0.25) == doctest::Approx(2.0));
    CHECK(an::bs_call(0.0, 0.0, 1.0, 10.0, 0.05, 0.25) == 0.0);
}

TEST_CASE("Simpson integrates cubics exactly and rounds odd counts up") {
    auto cubic = [](double x) { return x * x * x - 2.0 * x + 1.0; };
    CHECK(an::simpson(cubic, 0.0, 2.0, 2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(an::simpson(cubic, 0.0, 2.0, 3) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("CRF call spread closed form") {
    const CallSpreadParams params{.strike = 10.0, .eps_lo = 1.0, .eps_hi = 1.0,
                                  .m_lo = 1.0, .m_hi = 1.0};
    // manual assembly of the same quantity
    const double lo = an::bs_call(0.0, 10.0, 2.0, 9.0, 0.05, 0.25);
    const double hi = an::bs_call(0.0, 10.0, 2.0, 11.0, 0.05, 0.25);
    const double expected = 1.0 * (lo - hi) - std::exp(-0.04) * 1.0;
    CHECK(an::crf_call_spread(params, 0.0, 10.0, 2.0, 0.02, 0.03, 0.25) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("OU bond matches the integrated-Gaussian oracle") {
    for (double x : {-0.05, 0.02, 0.1}) {
        for (double u : {1.0, 5.0}) {
            const double closed = an::bond_price(kOu, 0.0, x, u, 0.02);
            CHECK(closed == doctest::Approx(ou_bond_gaussian(kOu, x, u, 0.02)).epsilon(1e-8));
        }
    }
}

TEST_CASE("CIR bond matches its PDE counterpart") {
    const ClaimTriplet bond{.terminal = [](double) { return 1.0; },
                            .dividend = [](double) { return 0.0; },
                            .at_default = [](double, double) { return 0.0; },
                            .maturity = 5.0};
    const fd::Surface pde = crf_solve(kCir, bond, kCirGrid);
    for (double x : {0.02, 0.05, 0.1}) {
        const double closed = an::bond_price(kCir, 0.0, x, 5.0, 0.02);
        CHECK(std::abs(pde.query(0.0, x) - closed) < 1e-3);
    }
}

TEST_CASE("bond prices lie in (0, 1] and fall with the state") {
    for (const FactorModel* model : {&kCir, &kOu}) {
        double prev = 2.0;
        for (double x : {0.0, 0.02, 0.05, 0.08, 0.12, 0.2}) {
            const double price = an::bond_price(*model, 0.0, x, 5.0, 0.02);
            CHECK(price > 0.0);
            CHECK(price <= 1.0);
            CHECK(price <= prev);
            prev = price;
        }
    }
    CHECK_THROWS_AS(an::bond_price(kCir, 0.0, -0.01, 5.0, 0.02), NegativeState);
}

TEST_CASE("CIR CDS upfront matches its PDE counterpart") {
    const fd::Surface pde = crf_solve(kCir, cds(0.048, 5.0), kCirGrid);
    for (double x : {0.02, 0.1}) {
        const double closed = an::cds_upfront(kCir, 0.0, x, 5.0, 0.048, 0.02);
        CHECK(std::abs(pde.query(0.0, x) - closed) < 2e-3);
    }
}

TEST_CASE("OU CDS upfront matches its PDE counterpart") {
    const fd::Surface pde = crf_solve(kOu, cds(0.048, 5.0), kOuGrid);
    for (double x : {0.02, 0.1}) {
        const double closed = an::cds_upfront(kOu, 0.0, x, 5.0, 0.048, 0.02);
        CHECK(std::abs(pde.query(0.0, x) - closed) < 1e-2);
    }
}

TEST_CASE("CDS upfront rises with the state") {
    for (const FactorModel* model : {&kCir, &kOu}) {
        double prev = -1e9;
        for (double x : {0.02, 0.05, 0.08, 0.12}) {
            const double upfront = an::cds_upfront(*model, 0.0, x, 5.0, 0.01, 0.02);
            CHECK(upfront > prev);
            prev = upfront;
        }
    }
}

TEST_CASE("bond TRS upfront matches its PDE counterpart and falls with the state") {
    const double strike = an::bond_price(kCir, 0.0, 0.02, 10.0, 0.02);
    auto pricer = [](double t, double x, double T) {
        return an::bond_price(kCir, t, x, T, 0.02);
    };
    const ClaimTriplet claim = bond_trs(5.0, 10.0, 0.01, strike, 0.02, pricer);
    const fd::Surface pde = crf_solve(kCir, claim, kCirGrid);
    double prev = 1e9;
    for (double x : {0.02, 0.05, 0.08, 0.12}) {
        const double closed = an::trs_upfront(kCir, 0.0, x, 5.0, 10.0, 0.01, strike, 0.02);
        CHECK(std::abs(pde.query(0.0, x) - closed) < 2e-3);
        CHECK(closed < prev);
        prev = closed;
    }
}

TEST_CASE("quadrature refinement is stable at the default steps") {
    CHECK(std::abs(an::cds_upfront(kCir, 0.0, 0.02, 5.0, 0.048, 0.02, 500) -
                   an::cds_upfront(kCir, 0.0, 0.02, 5.0, 0.048, 0.02, 1000)) < 1e-6);
    CHECK(std::abs(an::cds_upfront(kOu, 0.0, 0.02, 5.0, 0.048, 0.02, 500) -
                   an::cds_upfront(kOu, 0.0, 0.02, 5.0, 0.048, 0.02, 1000)) < 1e-6);
    const double strike = an::bond_price(kCir, 0.0, 0.02, 10.0, 0.02);
    CHECK(std::abs(an::trs_upfront(kCir, 0.0, 0.05, 5.0, 10.0, 0.01, strike, 0.02, 500) -
                   an::trs_upfront(kCir, 0.0, 0.05, 5.0, 10.0, 0.01, strike, 0.02, 1000)) < 1e-6);

    const EquityModel model{.r = 0.02, .sigma = 0.25,
                            .ref_intensity = IntensitySpec::constant(0.03)};
    const PartyParams p1{.intensity = 0.05, .loss_rate = 0.6};
    const PartyParams p2{.intensity = 0.15, .loss_rate = 0.6};
    const an::ForwardQuotes coarse =
        an::forward_prices_without_provision(10.0, 1.0, 20.0, 3.0, model, p1, p2, 400);
    const an::ForwardQuotes fine =
        an::forward_prices_without_provision(10.0, 1.0, 20.0, 3.0, model, p1, p2, 800);
    CHECK(std::abs(coarse.bid - fine.bid) < 1e-6);
    CHECK(std::abs(coarse.ask - fine.ask) < 1e-6);
}

TEST_CASE("forward quotes start from the textbook CRF value") {
    const EquityModel model{.r = 0.02, .sigma = 0.25,
                            .ref_intensity = IntensitySpec::constant(0.03)};
    const PartyParams p1{.intensity = 0.05, .loss_rate = 0.6};
    const PartyParams p2{.intensity = 0.15, .loss_rate = 0.6};
    const an::ForwardQuotes quotes =
        an::forward_prices_without_provision(10.0, 1.0, 20.0, 3.0, model, p1, p2);
    CHECK(quotes.crf == doctest::Approx(20.0 - std::exp(-0.04) * 10.0));
    CHECK(quotes.bid <= quotes.ask);
}

TEST_CASE("positive payoff closed form rejects claims with a negative part") {
    const CallSpreadParams params{.strike = 10.0, .eps_lo = 0.01, .eps_hi = 0.01,
                                  .m_lo = 1.0, .m_hi = 1.0};
    const ClaimTriplet spread = call_spread(params, 0.02, 2.0);
    const EquityModel model{.r = 0.02, .sigma = 0.25,
                            .ref_intensity = IntensitySpec::constant(0.03)};
    const PartyParams p1{.intensity = 0.05, .loss_rate = 0.6};
    const PartyParams p2{.intensity = 0.15, .loss_rate = 0.6};
    CHECK_THROWS_AS(
        an::positive_payoff_price(spread, 10.0, Side::Buyer, true, model, p1, p2, 0.0, 10.0),
        NegativePayoff);
}

TEST_CASE("positive payoff closed form collapses to CRF without counterparties") {
    const ClaimTriplet call{.terminal = [](double s) { return std::max(s - 10.0, 0.0); },
                            .dividend = [](double) { return 0.0; },
                            .at_default = [](double, double) { return 0.0; },
                            .maturity = 1.0};
    const EquityModel model{.r = 0.02, .sigma = 0.25,
                            .ref_intensity = IntensitySpec::constant(0.05)};
    const PartyParams none{};
    const double crf = an::bs_call(0.0, 10.0, 1.0, 10.0, 0.07, 0.25);
    CHECK(an::positive_payoff_price(call, 10.0, Side::Buyer, true, model, none, none, 0.0, 10.0) ==
          doctest::Approx(crf).epsilon(1e-12));
    CHECK(an::positive_payoff_price(call, 10.0, Side::Buyer, false, model, none, none, 0.0,
                                    10.0) == doctest::Approx(crf).epsilon(1e-12));
}

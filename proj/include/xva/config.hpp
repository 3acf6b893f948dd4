#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xva/claims.hpp"
#include "xva/grid.hpp"
#include "xva/models.hpp"
#include "xva/party.hpp"
#include "xva/pricing.hpp"

namespace xva::cli {

enum class ModelKind { Equity, OU, CIR };
enum class ClaimKind { CallSpread, Forward, EquityTrs, Cds, BondTrs };
enum class SideRequest { Buyer, Seller, Both };

/// [model] section. Equity configs use sigma and the intensity fields;
/// factor configs use kappa/theta/sigma/psi0/w0/x_cap. r applies to both.
struct ModelSection {
    ModelKind kind = ModelKind::Equity;
    double r = 0.0;
    double sigma = 0.0;
    // constant reference intensity, or the capped local power law when
    // local_intensity is set
    bool local_intensity = false;
    double lambda0 = 0.0;
    double intensity_scale = 0.0;
    double intensity_power = 0.0;
    double intensity_cap = 0.0;
    JumpConvention convention = JumpConvention::Compensated;
    // factor parameters
    double kappa = 0.0;
    double theta = 0.0;
    double psi0 = 0.0;
    double w0 = 1.0;
    double x_cap = 0.0;

    bool operator==(const ModelSection&) const = default;
};

/// [claim] section; only the fields of the selected kind are read.
struct ClaimSection {
    ClaimKind kind = ClaimKind::CallSpread;
    double maturity = 0.0;
    CallSpreadParams spread{};
    double f0 = 0.0;       // forward strike
    double s0 = 0.0;       // equity TRS notional spot
    double premium = 0.0;  // TRS / CDS running premium
    double bond_maturity = 0.0;       // T' of the bond TRS
    std::optional<double> strike;     // bond TRS strike; defaults to C(0, x0; T')
    double x0 = 0.0;                  // state for the default strike

    bool operator==(const ClaimSection&) const = default;
};

struct SolverSection {
    double tolerance = 1e-5;
    int max_iter = 50;
    IterationScheme scheme = IterationScheme::ImplicitLinear;
    std::optional<double> error_slice_time;
    SideRequest sides = SideRequest::Both;

    bool operator==(const SolverSection&) const = default;
};

/// [output] section: the report time and the probed states. Probes must
/// land on grid nodes; the runner refuses to interpolate.
struct OutputSection {
    double probe_t = 0.0;
    std::vector<double> probes;

    bool operator==(const OutputSection&) const = default;
};

/// [sweep] section, only consumed by the sweep command.
struct SweepSection {
    std::string parameter;  // lambda1|lambda2|delta1|delta2|c1|c2
    std::vector<double> values;

    bool operator==(const SweepSection&) const = default;
};

struct RunSpec {
    ModelSection model;
    ClaimSection claim;
    PartyParams party1;
    PartyParams party2;
    fd::GridSpec grid;
    SolverSection solver;
    OutputSection output;
    std::optional<SweepSection> sweep;

    bool operator==(const RunSpec&) const = default;

    EquityModel equity_model() const;  // requires kind == Equity
    FactorModel factor_model() const;  // requires kind == OU or CIR
    ClaimTriplet build_claim() const;
    void validate() const;
};

/// Parses the sectioned key-value config format: `[section]` headers,
/// `key = value` lines, `#` comments, `%` suffix meaning x0.01. Unknown
/// sections or keys are rejected with their line number; missing required
/// keys raise ValidationError naming the key.
RunSpec parse_config(const std::string& text);

/// Canonical config text for a RunSpec; parse_config(serialize(s)) == s.
std::string serialize(const RunSpec& spec);

}  // namespace xva::cli

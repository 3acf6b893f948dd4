#pragma once

#include "xva/errors.hpp"

namespace xva {

/// Per-party credit and collateral terms. Party 1 is the market participant,
/// party 2 the counterparty dealer.
struct PartyParams {
    double intensity = 0.0;         // default intensity, per year
    double loss_rate = 0.0;         // L = 1 - recovery
    double collateral_ratio = 0.0;  // delta, fraction of MtM posted
    double collateral_rate = 0.0;   // effective collateral rate, may be negative

    double recovery() const { return 1.0 - loss_rate; }

    bool operator==(const PartyParams& other) const = default;

    void validate() const {
        if (intensity < 0.0) {
            throw ValidationError("party intensity must be nonnegative");
        }
        if (loss_rate < 0.0 || loss_rate > 1.0) {
            throw ValidationError("party loss rate must lie in [0, 1]");
        }
        if (collateral_ratio < 0.0 || collateral_ratio > 1.2) {
            throw ValidationError("collateral ratio must lie in [0, 1.2]");
        }
    }
};

}  // namespace xva

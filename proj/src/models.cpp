#include "xva/models.hpp"

#include <algorithm>
#include <cmath>

namespace xva {

IntensitySpec IntensitySpec::constant(double level) {
    if (level < 0.0) {
        throw ValidationError("reference intensity must be nonnegative");
    }
    IntensitySpec spec;
    spec.level_ = level;
    spec.cap_ = level;
    return spec;
}

IntensitySpec IntensitySpec::local_power(double scale, double power, double cap) {
    if (!(scale > 0.0) || !(power > 0.0) || !(cap > 0.0)) {
        throw ValidationError("local intensity requires scale, power and cap > 0");
    }
    IntensitySpec spec;
    spec.local_ = true;
    spec.scale_ = scale;
    spec.power_ = power;
    spec.cap_ = cap;
    return spec;
}

double IntensitySpec::value(double s) const {
    if (!local_) {
        return level_;
    }
    if (s <= 0.0) {
        return cap_;  // the power law explodes at s = 0
    }
    return std::min(scale_ * std::pow(s, -power_), cap_);
}

void EquityModel::validate() const {
    if (r < 0.0) {
        throw ValidationError("risk-free rate must be nonnegative");
    }
    if (!(sigma > 0.0)) {
        throw ValidationError("equity volatility must be positive");
    }
}

void FactorModel::validate() const {
    if (!(kappa > 0.0) || !(theta > 0.0) || !(sigma > 0.0)) {
        throw ValidationError("factor model requires kappa, theta, sigma > 0");
    }
    if (psi0 < 0.0 || w0 < 0.0) {
        throw ValidationError("intensity shift and loading must be nonnegative");
    }
    if (!(x_cap > 0.0)) {
        throw ValidationError("intensity cap must be positive");
    }
    if (kind == FactorKind::CIR && !(2.0 * kappa * theta > sigma * sigma)) {
        throw FellerViolation("CIR parameters violate the Feller condition 2*kappa*theta > sigma^2");
    }
}

double FactorModel::ref_intensity(double x) const {
    return psi0 + w0 * std::min(std::max(x, 0.0), x_cap);
}

fd::LocalCoefficients equity_coefficients(const EquityModel& model, const PartyParams& p1,
                                          const PartyParams& p2, double /*t*/, double s) {
    const double lambda = model.ref_intensity.value(s) + p1.intensity + p2.intensity;
    const double r_tilde = model.r + lambda;
    return {
        .drift = r_tilde * s,
        .diffusion_sq = model.sigma * model.sigma * s * s,
        .discount = r_tilde,
    };
}

fd::LocalCoefficients factor_coefficients(const FactorModel& model, const PartyParams& p1,
                                          const PartyParams& p2, double r, double /*t*/, double x) {
    if (model.kind == FactorKind::CIR && x < 0.0) {
        throw NegativeState("CIR coefficients evaluated at negative state");
    }
    const double diffusion_sq =
        model.kind == FactorKind::CIR ? model.sigma * model.sigma * x : model.sigma * model.sigma;
    return {
        .drift = model.kappa * (model.theta - x),
        .diffusion_sq = diffusion_sq,
        .discount = r + model.ref_intensity(x) + p1.intensity + p2.intensity,
    };
}

}  // namespace xva

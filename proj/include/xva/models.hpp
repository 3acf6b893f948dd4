#pragma once

#include "xva/grid.hpp"
#include "xva/party.hpp"

namespace xva {

/// Reference-entity default intensity for the equity model: either a constant
/// or the capped local power law c * s^(-p) /\ cap. The power law explodes at
/// s = 0, so that node takes the cap.
class IntensitySpec {
public:
    static IntensitySpec constant(double level);
    static IntensitySpec local_power(double scale, double power, double cap);

    double value(double s) const;
    double max_value() const { return local_ ? cap_ : level_; }
    bool is_local() const { return local_; }

    double scale() const { return scale_; }
    double power() const { return power_; }
    double cap() const { return cap_; }
    double level() const { return level_; }

private:
    bool local_ = false;
    double level_ = 0.0;
    double scale_ = 0.0;
    double power_ = 0.0;
    double cap_ = 0.0;
};

/// Jump-to-default equity: dS = (r + lambda0) S dt + sigma S dW pre-default,
/// S drops to zero at the reference default.
struct EquityModel {
    double r = 0.0;
    double sigma = 0.0;
    IntensitySpec ref_intensity = IntensitySpec::constant(0.0);

    void validate() const;
};

enum class FactorKind { OU, CIR };

/// Mean-reverting factor driving the reference intensity
/// lambda0(x) = psi0 + w0 * ((x)^+ /\ x_cap).
struct FactorModel {
    FactorKind kind = FactorKind::OU;
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double psi0 = 0.0;
    double w0 = 1.0;
    double x_cap = 0.0;

    void validate() const;  // Feller check for CIR
    double ref_intensity(double x) const;
};

/// Operator coefficients for the equity PDE at (t, s): drift (r + lambda) s,
/// diffusion sigma^2 s^2, discount r + lambda with
/// lambda = lambda0(s) + lambda1 + lambda2.
fd::LocalCoefficients equity_coefficients(const EquityModel& model, const PartyParams& p1,
                                          const PartyParams& p2, double t, double s);

/// Operator coefficients for the factor PDE at (t, x).
fd::LocalCoefficients factor_coefficients(const FactorModel& model, const PartyParams& p1,
                                          const PartyParams& p2, double r, double t, double x);

}  // namespace xva

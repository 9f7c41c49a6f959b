#pragma once

// Two-layer energy-balance temperature model driven by CO2 forcing.

#include "climkit/errors.hpp"

namespace climkit {

struct EbmParams {
    double heat_capacity_upper = 7.3;   // C, W yr m^-2 K^-1
    double heat_capacity_deep = 106.0;  // C0, same units
    double exchange = 0.73;             // gamma, W m^-2 K^-1
    double feedback = 1.13;             // lambda, W m^-2 K^-1
    double f2x = 3.45;                  // forcing at CO2 doubling, W m^-2
    double kappa = 1.0;                 // non-CO2 forcing multiplier
    double dt = 1.0;                    // years

    // Multi-model means and standard deviations of the coupled-model fits
    // (F2x given as half the 4xCO2 value).
    static EbmParams multi_model_mean();
    static EbmParams multi_model_stddev();

    void validate() const;

    // Spectral radius of the annual update matrix I + dt*B; must be < 1.
    double update_spectral_radius() const;
    bool stable() const { return update_spectral_radius() < 1.0; }

    // Steady state of both layers under constant forcing F: T = F / lambda.
    double equilibrium_warming(double forcing) const { return forcing / feedback; }
};

struct TempState {
    double t_atm = 0.0;    // deg C anomaly
    double t_ocean = 0.0;  // deg C anomaly
    int year = 0;
};

// F = kappa * (F2x / ln 2) * ln(m_atm / m0_atm). Both masses must be positive.
double forcing(double m_atm, double m0_atm, const EbmParams& params);

TempState temp_step(const TempState& state, double forcing_wm2, const EbmParams& params);

}  // namespace climkit

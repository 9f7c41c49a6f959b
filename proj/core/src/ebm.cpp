#include "climkit/ebm.hpp"

#include <cmath>

namespace climkit {

EbmParams EbmParams::multi_model_mean() { return EbmParams{}; }

EbmParams EbmParams::multi_model_stddev() {
    EbmParams sd;
    sd.heat_capacity_upper = 1.1;
    sd.heat_capacity_deep = 62.0;
    sd.exchange = 0.18;
    sd.feedback = 0.31;
    sd.f2x = 0.45;  // half of the 4xCO2 spread
    sd.kappa = 0.0;
    return sd;
}

void EbmParams::validate() const {
    if (heat_capacity_upper <= 0 || heat_capacity_deep <= 0 || exchange <= 0 || feedback <= 0 ||
        f2x <= 0 || kappa <= 0 || dt <= 0) {
        throw ConfigError("energy-balance parameters must all be positive");
    }
    if (!stable()) throw ConfigError("unstable temperature update matrix for these parameters");
}

double EbmParams::update_spectral_radius() const {
    // Eigenvalues of the 2x2 update matrix I + dt*B in closed form.
    const double b11 = -(feedback + exchange) / heat_capacity_upper;
    const double b12 = exchange / heat_capacity_upper;
    const double b21 = exchange / heat_capacity_deep;
    const double b22 = -exchange / heat_capacity_deep;
    const double tr = 2.0 + dt * (b11 + b22);
    const double det = (1.0 + dt * b11) * (1.0 + dt * b22) - dt * dt * b12 * b21;
    const double disc = tr * tr / 4.0 - det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        return std::max(std::abs(tr / 2.0 + root), std::abs(tr / 2.0 - root));
    }
    return std::sqrt(det);
}

double forcing(double m_atm, double m0_atm, const EbmParams& params) {
    if (m_atm <= 0.0 || m0_atm <= 0.0) {
        throw DataError("forcing requires positive atmospheric masses");
    }
    return params.kappa * params.f2x / std::log(2.0) * std::log(m_atm / m0_atm);
}

TempState temp_step(const TempState& state, double forcing_wm2, const EbmParams& params) {
    TempState next;
    next.t_atm = state.t_atm + params.dt / params.heat_capacity_upper *
                                   (forcing_wm2 - params.exchange * (state.t_atm - state.t_ocean) -
                                    params.feedback * state.t_atm);
    next.t_ocean = state.t_ocean + params.dt * params.exchange / params.heat_capacity_deep *
                                       (state.t_atm - state.t_ocean);
    next.year = state.year + 1;
    return next;
}

}  // namespace climkit

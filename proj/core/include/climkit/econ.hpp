#pragma once

// Representative-agent planner coupled to a carbon-cycle emulator and the
// two-layer temperature model: business-as-usual, optimal mitigation, full
// abatement, damages accounting, and the social cost of carbon.

#include <string>
#include <vector>

#include "climkit/carbon.hpp"
#include "climkit/ebm.hpp"

namespace climkit {

// Exogenous annual paths, one entry per model year.
struct EconPaths {
    std::vector<double> labor;   // millions
    std::vector<double> tfp;
    std::vector<double> sigma;   // emission intensity, GtC per trillion USD of gross output
    std::vector<double> e_land;  // GtC/yr
    std::vector<double> theta1;  // abatement cost at full mitigation, output fraction

    int size() const { return static_cast<int>(labor.size()); }
    void validate(int horizon) const;
};

struct EconConfig {
    double beta = 1.0 / 1.015;  // annual discount factor
    // Intertemporal elasticity of substitution. The bundled default matches
    // the standard annual calibration, whose consumption-curvature parameter
    // 1.45 is the inverse elasticity.
    double psi = 1.0 / 1.45;
    double alpha_cap = 0.300;   // capital share
    double delta = 0.100;       // annual depreciation
    double psi1 = 0.0;          // linear damage coefficient, 1/degC
    double psi2 = 0.00236;      // quadratic damage coefficient, 1/degC^2
    double theta2 = 2.6;        // abatement cost exponent

    int start_year = 2015;
    int horizon = 400;  // years
    EconPaths paths;

    double capital0 = 223.0;  // trillion USD
    CycleState climate0;
    TempState temp0;
    double forcing_reference_mass = 589.0;  // pre-industrial atmospheric mass, GtC
    EbmParams ebm;                          // kappa folded in (1.2 for scenario-driven runs)

    // solver controls
    int max_iterations = 20000;
    double grad_tol = 1e-7;  // on the scaled projected gradient
    double consumption_rel_lower = 0.05, consumption_rel_upper = 5.0;

    void validate() const;
};

// Standard annualized DICE-2016 parameterization (2015 anchors, per-year
// recursions for labor, TFP, emission intensity, land emissions, and the
// backstop-driven abatement coefficient). All values overridable after the
// call.
EconConfig dice2016_annual(int start_year = 2015, int horizon = 400);

enum class PolicyMode { bau, optimal, full_abatement };

struct EconTrajectory {
    std::vector<int> years;
    std::vector<double> capital;        // K_t, trillion USD
    std::vector<double> consumption;    // C_t, trillion USD/yr
    std::vector<double> mitigation;     // mu_t in [0, 1]
    std::vector<double> gross_output;   // trillion USD/yr
    std::vector<double> net_output;     // after abatement cost and damages
    std::vector<double> damage_share;   // Omega_t
    std::vector<double> damage_level;   // trillion USD/yr
    std::vector<double> abatement_share;
    std::vector<double> e_industrial;   // GtC/yr
    Matrix masses;                      // (horizon+1) x n
    std::vector<double> t_atm, t_ocean, forcing_wm2;

    double welfare = 0.0;
    double projected_grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    PolicyMode mode = PolicyMode::bau;
};

// Elementary pieces (Cobb-Douglas output, damages, abatement, emissions).
double gross_output(double capital, double tfp, double labor, double alpha_cap);
double damage_share(double t_atm, double psi1, double psi2);
double damage_level(double omega, double capital, double tfp, double labor, double alpha_cap);
double emissions_rule(double sigma, double y_gross, double mu, double e_land);
double abatement_cost(double mu, double theta1, double theta2);

// Optimal investment with mitigation pinned at zero.
EconTrajectory solve_bau(const EconConfig& config, const Emulator& emulator);
// Jointly optimal consumption and mitigation.
EconTrajectory solve_optimal(const EconConfig& config, const Emulator& emulator);
// Mitigation pinned at one from the first period; investment still optimized.
EconTrajectory run_ccs(const EconConfig& config, const Emulator& emulator);

// Welfare of an arbitrary fixed policy (diagnostic; no optimization).
double evaluate_policy(const EconConfig& config, const Emulator& emulator,
                       const std::vector<double>& consumption, const std::vector<double>& mitigation);

// Exact welfare gradient of a fixed feasible policy (reverse sweep). Returns
// the welfare; fills d(welfare)/dC_t and d(welfare)/dmu_t.
double policy_gradient(const EconConfig& config, const Emulator& emulator,
                       const std::vector<double>& consumption,
                       const std::vector<double>& mitigation, std::vector<double>* g_consumption,
                       std::vector<double>* g_mitigation);

// Social cost of carbon in USD per ton of CO2 at a model year, from symmetric
// finite differences of the fixed-policy value in the atmospheric mass and
// the capital stock (envelope evaluation). Throws StepSizeUnstable when the
// halved-step estimate disagrees by more than 5%.
double scc(const EconConfig& config, const Emulator& emulator, const EconTrajectory& trajectory,
           int year);

inline constexpr double kTco2PerGtc = 3.664;  // molecular weight ratio 44/12, in Gt

void write_econ_csv(const std::string& path, const EconTrajectory& traj,
                    const std::vector<std::string>& reservoir_names);

}  // namespace climkit

#pragma once

// Standalone climate experiments: pulse decay, zero-emissions commitment,
// RCP pathways, data ingestion, and present-day spin-up.

#include <optional>
#include <string>
#include <vector>

#include "climkit/calibration.hpp"
#include "climkit/carbon.hpp"
#include "climkit/config.hpp"
#include "climkit/ebm.hpp"

namespace climkit {

struct EmissionSeries {
    std::vector<int> years;  // contiguous calendar years
    std::vector<double> fossil_industrial;  // GtC/yr
    std::vector<double> land_use;           // GtC/yr
    std::string label;

    void validate() const;
    int start_year() const { return years.front(); }
    int end_year() const { return years.back(); }
    int size() const { return static_cast<int>(years.size()); }
    double total_at(int i) const { return fossil_industrial[i] + land_use[i]; }
    std::vector<double> cumulative_total() const;

    // Per-year emission vectors (everything enters the atmosphere) plus the
    // land-use component for capacity-rule runs, covering `horizon` years
    // starting at `from_year`.
    void to_inputs(const Topology& topology, int from_year, int horizon, Matrix* emissions,
                   Vector* land_use_out) const;
};

// `year,fossil_industrial_gtc,land_use_gtc` with a mandatory header row.
EmissionSeries load_emissions(const std::string& path, const std::string& label = "");

// JSON manifest binding the mu / mu_plus / mu_minus curves; each curve is a
// `year,value` CSV. Values are either masses in GtC or pulse fractions
// (value_kind), fractions being rescaled to baseline + pulse * fraction.
BenchmarkSet load_benchmark(const std::string& manifest_path);

struct ScenarioRun {
    std::vector<int> years;
    Matrix masses;  // (horizon+1) x n
    std::vector<double> t_atm, t_ocean;    // deg C anomaly
    std::vector<double> forcing_wm2;
    std::vector<double> land_equilibrium;  // only for capacity-rule runs
    std::vector<MassWarning> warnings;
    Json meta;

    int horizon() const { return static_cast<int>(years.size()) - 1; }
};

struct PulseRun {
    ScenarioRun run;
    std::vector<double> fraction;  // (m_atm - m_eq_atm) / pulse
};

// Instantaneous pulse into the atmosphere at equilibrium; free evolution.
// Temperature is co-evolved with the given EBM parameters (kappa = 1 for
// perturbation tests).
PulseRun run_pulse(const Emulator& emulator, double pulse_gtc, int horizon,
                   const EbmParams& ebm = EbmParams::multi_model_mean());

struct ZecRun {
    ScenarioRun run;
    std::vector<double> implied_emissions;  // GtC/yr during the ramp, 0 after
    int cessation_year = -1;                // first year with zero emissions
    double cumulative_at_cessation = 0.0;
};

// Prescribed-concentration ramp (atmospheric mass growing `growth_rate` per
// year, emissions implied) until the cumulative budget is spent, then free
// evolution. Throws BudgetUnreachable if implied emissions turn negative
// before the budget is met.
ZecRun run_zec(const Emulator& emulator, int horizon, double growth_rate = 0.01,
               double budget_gtc = 1000.0, const EbmParams& ebm = EbmParams::multi_model_mean());

// Full coupled carbon + temperature rollout under an emission scenario. For
// capacity-rule emulators the land-use component both enters the atmosphere
// and shrinks the land equilibrium.
ScenarioRun run_rcp(const Emulator& emulator, const EmissionSeries& series,
                    const EbmParams& ebm, int horizon = -1);

struct SpinUpResult {
    CycleState state;
    TempState temp;
    OperatorParams params;  // land equilibrium updated for capacity-rule runs
    int stop_year = 0;
    double atm_ppm = 0.0;
};

// Standard airborne conversion; the configuration may override it.
inline constexpr double kGtcPerPpm = 2.124;

// Integrates from the pre-industrial equilibrium under a historical emission
// series until the atmospheric concentration reaches target_ppm. Throws
// TargetNotReached when the series ends first.
SpinUpResult spin_up_present_day(const Emulator& emulator, const EmissionSeries& historical,
                                 double target_ppm, const EbmParams& ebm,
                                 double gtc_per_ppm = kGtcPerPpm);

// Per-run directory artifacts: masses.csv, temperature.csv, forcing.csv, meta.json.
void write_run_outputs(const std::string& dir, const ScenarioRun& run,
                       const std::vector<std::string>& reservoir_names);

}  // namespace climkit

#pragma once

// Fits operator parameters to benchmark pulse-decay trajectories with three
// physics-informed penalties, fits extreme scaling factors against the
// envelope curves, and forms the alpha-weighted operator family.

#include <cstdint>
#include <string>
#include <vector>

#include "climkit/carbon.hpp"

namespace climkit {

// Atmospheric-mass decay trajectories after an instantaneous pulse: the
// multi-model mean and its two-standard-deviation envelope, in GtC, indexed
// by years since the pulse (year 0 = mass immediately after injection).
struct BenchmarkSet {
    std::vector<int> years;
    Vector y_mu;
    Vector y_mu_plus;
    Vector y_mu_minus;
    std::string background;  // "PI" | "PD"
    double pulse_gtc = 100.0;

    void validate() const;
    // Benchmark mass at the given year (years must be contiguous from 0).
    double mu_at(int year) const { return y_mu[year]; }
};

struct Hyperparams {
    double rho1 = 1e-2;
    double rho2 = 1e-4;
    double rho3 = 1e-4;
    int fit_horizon = 250;  // years entering the fit error
    double eta = 1.0;       // target ocean/land uptake ratio
    int t_ref = 20;         // evaluation year for the uptake ratio
    Vector m_eq_star;       // reference equilibrium masses, GtC

    // Box bounds; a pinned parameter has lower == upper (the atmosphere mass).
    std::vector<double> rate_lower, rate_upper;
    Vector mass_lower, mass_upper;
    double c_plus_lower = 1e-6, c_plus_upper = 1.0;
    double c_minus_lower = 1.0, c_minus_upper = 5.0;

    // Multi-start protocol: a seeded Latin-hypercube plus one reference start
    // at the reference masses and mid-range rates.
    int n_starts = 16;
    std::uint64_t seed = 0;
    int max_evals_per_start = 5000;
    double param_tol = 1e-10;
    double objective_tol = 1e-12;
    double barrier = 1e6;  // objective value assigned to inadmissible candidates

    // Canonical defaults: search bounds, reference masses, and penalty
    // weights (rho3 = 0 when the topology has no land box).
    static Hyperparams defaults(const Topology& topology);

    void validate(const Topology& topology) const;
};

struct CalibrationResult {
    OperatorParams params;
    double fit_error = 0.0;  // GtC
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;
    double objective = 0.0;  // fit_error + rho1 q1 + rho2 q2 + rho3 q3
    double c_plus = 0.0, c_minus = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Simulates the pulse decay (m0 = m_eq plus the pulse in the atmosphere, no
// further emissions) and returns (1/T) * l2-norm of the atmospheric-mass
// deviation from y over years 1..T.
double fit_error(const OperatorParams& params, const Topology& topology, const BenchmarkSet& bench,
                 const Vector& y, int fit_horizon);

// Mean eigenvalue magnitude, -tr(A)/n.
double penalty_q1(const CarbonOperator& op);

// (1/n) * l2-norm of the relative equilibrium-mass deviations.
double penalty_q2(const Vector& m_eq, const Vector& m_eq_star);

// |ocean uptake / land uptake - eta| at t_ref under the benchmark pulse.
// Requires at least one ocean and one land reservoir.
double penalty_q3(const OperatorParams& params, const Topology& topology, double pulse_gtc,
                  double eta, int t_ref);

double penalized_objective(const OperatorParams& params, const Topology& topology,
                           const BenchmarkSet& bench, const Hyperparams& hyper);

// Box-constrained multi-start minimisation of the penalized objective with
// the atmosphere equilibrium pinned. Throws NoAdmissibleSolution when every
// start ends inadmissible. Deterministic for a fixed seed.
CalibrationResult calibrate_mean(const BenchmarkSet& bench, const Topology& topology,
                                 const Hyperparams& hyper);

// One-dimensional fit of the rate-scaling factor against an envelope curve.
double fit_extreme_scale(const OperatorParams& mean_params, const Topology& topology,
                         const BenchmarkSet& bench, const Vector& y_extreme, int fit_horizon,
                         double c_lower, double c_upper);

// Convex combination toward the extreme operators: (1-a) A_mu + a A_plus for
// a > 0 and (1+a) A_mu - a A_minus for a <= 0. All inputs must share m_eq.
CarbonOperator weighted_operator(const CarbonOperator& a_mu, const CarbonOperator& a_plus,
                                 const CarbonOperator& a_minus, double alpha);

}  // namespace climkit

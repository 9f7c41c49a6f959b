#pragma once

// Linear multi-reservoir carbon-cycle operators: construction from transfer
// rates and equilibrium masses, admissibility validation, annual time
// stepping, and the time-dependent land-capacity variant.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "climkit/errors.hpp"

namespace climkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ReservoirKind { atmosphere, ocean, land };

// Reservoir layout plus the set of strictly lower-triangular transfer
// positions (i,j), i > j, that carry free rate parameters. Index 0 is the
// atmosphere by convention.
struct Topology {
    std::vector<std::string> names;
    std::vector<ReservoirKind> kinds;
    std::vector<std::pair<int, int>> transfers;  // (to, from) with to > from, 0-based

    int size() const { return static_cast<int>(names.size()); }
    int n_transfers() const { return static_cast<int>(transfers.size()); }
    int atmosphere_index() const;
    std::optional<int> land_index() const;
    std::vector<int> ocean_indices() const;

    // Throws TopologyError on: missing/duplicated atmosphere, transfer indices
    // out of range or not strictly lower triangular, duplicated transfers, or
    // reservoirs unreachable from the atmosphere.
    void validate() const;

    // Serial atmosphere -> upper ocean -> deep ocean chain.
    static Topology three_box_serial();
    // Adds a land box exchanging directly with the atmosphere.
    static Topology four_box_parallel();
};

// Free parameters of the operator: one rate per transfer pair (1/yr, each in
// (0, 0.3]) and the equilibrium masses (GtC, positive).
struct OperatorParams {
    std::vector<double> rates;  // aligned with Topology::transfers
    Vector m_eq;

    double rate(const Topology& topo, int to, int from) const;
};

class CarbonOperator;

// Builds the full n x n operator from the lower-triangular rates: the reverse
// flows are rate * m_eq[from]/m_eq[to] and each diagonal entry balances its
// column. Throws TopologyMismatch on shape errors and InadmissibleSpectrum if
// any eigenvalue leaves (-1, 0] or has imaginary magnitude above tolerance.
CarbonOperator build_operator(const OperatorParams& params, const Topology& topology);

struct ValidationReport {
    bool column_sums_zero = false;
    bool equilibrium_null = false;   // A * m_eq == 0
    bool eigenvalues_real = false;
    bool eigenvalues_in_range = false;  // (-1, 0]
    double max_column_sum = 0.0;
    double equilibrium_residual = 0.0;  // ||A m_eq|| / ||m_eq||
    double max_imag = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;

    bool all_passed() const {
        return column_sums_zero && equilibrium_null && eigenvalues_real && eigenvalues_in_range;
    }
};

class CarbonOperator {
public:
    const Matrix& matrix() const { return matrix_; }
    const OperatorParams& params() const { return params_; }
    const Topology& topology() const { return topology_; }
    int size() const { return static_cast<int>(matrix_.rows()); }

    // Real parts of the eigenvalues, ascending.
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

private:
    friend CarbonOperator build_operator(const OperatorParams&, const Topology&);
    CarbonOperator() = default;

    Matrix matrix_;
    OperatorParams params_;
    Topology topology_;
    std::vector<double> eigenvalues_;
};

// Numerical tolerances for operator admissibility. Dense eigensolvers leave
// O(1e-14) imaginary noise on near-symmetric problems, hence the slack.
struct AdmissibilityTolerances {
    double imag_abs = 1e-10;
    double range_slack = 1e-9;  // on the (-1, 0] bounds
};

ValidationReport validate_operator(const Matrix& matrix, const Vector& m_eq,
                                   const AdmissibilityTolerances& tol = {});
ValidationReport validate_operator(const CarbonOperator& op,
                                   const AdmissibilityTolerances& tol = {});

// Dynamic timescales 1/|lambda| in years, descending; the zero eigenvalue
// (equilibrium mode) is excluded.
std::vector<double> timescales(const CarbonOperator& op, double zero_tol = 1e-12);

struct CycleState {
    Vector masses;  // GtC
    int year = 0;
};

struct MassWarning {
    int year = 0;
    int reservoir = 0;
    double mass = 0.0;
};

// m_{t+1} = m_t + A m_t + e. Negative masses are recorded, never clipped;
// clipping would silently violate conservation.
CycleState step(const CycleState& state, const CarbonOperator& op, const Vector& emissions,
                std::vector<MassWarning>* warnings = nullptr);

// Time-dependent land capacity: the land equilibrium mass shrinks by r times
// the land-use emission of the year.
struct LandCapacityRule {
    double r = 1.0;  // deforestation fraction in [0, 1]
    int land_reservoir_index = -1;
};

// Returns params with m_eq[land] reduced by r * land_use_emission; the caller
// rebuilds the operator. Throws CapacityExhausted when the capacity would
// drop to zero or below. Negative land-use emissions (afforestation) are
// accepted; `grew` reports them when non-null.
OperatorParams update_land_equilibrium(const OperatorParams& params, double land_use_emission,
                                       const LandCapacityRule& rule, bool* grew = nullptr);

// A calibrated operator plus, optionally, the rule that makes it
// time-dependent. With a rule attached, simulate() rebuilds the operator each
// year from that year's land-use emission before the mass update.
struct Emulator {
    CarbonOperator op;
    std::optional<LandCapacityRule> land_rule;
};

struct MassTrajectory {
    // (horizon + 1) x n; row 0 is the initial state.
    Matrix masses;
    std::vector<int> years;
    std::vector<MassWarning> warnings;
    // Land equilibrium path, only populated for time-dependent runs.
    std::vector<double> land_equilibrium;
    // Years whose negative land-use emission grew the capacity (flagged,
    // since afforestation-driven equilibrium growth is an extrapolation).
    std::vector<int> capacity_growth_years;

    int horizon() const { return static_cast<int>(masses.rows()) - 1; }
};

// Rolls the cycle forward `horizon` years. `emissions` is horizon x n
// (per-year emission vectors); `land_use` (length horizon) is the component
// consumed by the capacity rule and must already be included in `emissions`.
MassTrajectory simulate(const Emulator& emulator, const CycleState& m0, const Matrix& emissions,
                        const Vector& land_use = Vector(), int horizon = -1);

// CSV export of the operator matrix, 6 significant digits.
std::string operator_to_csv(const CarbonOperator& op, bool absorb_identity = false);

}  // namespace climkit

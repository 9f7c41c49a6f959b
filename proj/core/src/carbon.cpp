#include "climkit/carbon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace climkit {

int Topology::atmosphere_index() const {
    for (int i = 0; i < size(); ++i) {
        if (kinds[i] == ReservoirKind::atmosphere) return i;
    }
    throw TopologyError("topology has no atmosphere reservoir");
}

std::optional<int> Topology::land_index() const {
    for (int i = 0; i < size(); ++i) {
        if (kinds[i] == ReservoirKind::land) return i;
    }
    return std::nullopt;
}

std::vector<int> Topology::ocean_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < size(); ++i) {
        if (kinds[i] == ReservoirKind::ocean) idx.push_back(i);
    }
    return idx;
}

void Topology::validate() const {
    const int n = size();
    if (n < 2) throw TopologyError("need at least two reservoirs");
    if (kinds.size() != names.size()) throw TopologyError("names/kinds size mismatch");

    int n_atm = 0;
    for (auto k : kinds) {
        if (k == ReservoirKind::atmosphere) ++n_atm;
    }
    if (n_atm != 1) throw TopologyError("exactly one atmosphere reservoir required");

    const std::size_t max_pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    if (transfers.empty() || transfers.size() > max_pairs) {
        throw TopologyError("transfer set size must be in [1, n(n-1)/2]");
    }

    std::set<std::pair<int, int>> seen;
    for (auto [to, from] : transfers) {
        if (to < 0 || to >= n || from < 0 || from >= n) {
            throw TopologyError("transfer index out of range");
        }
        if (to <= from) throw TopologyError("transfers must be strictly lower triangular (to > from)");
        if (!seen.insert({to, from}).second) throw TopologyError("duplicate transfer pair");
    }

    // every reservoir reachable from the atmosphere through transfer pairs
    std::vector<std::vector<int>> adj(n);
    for (auto [to, from] : transfers) {
        adj[to].push_back(from);
        adj[from].push_back(to);
    }
    std::vector<char> visited(n, 0);
    std::queue<int> q;
    q.push(atmosphere_index());
    visited[atmosphere_index()] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (!visited[v]) {
                visited[v] = 1;
                q.push(v);
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!visited[i]) throw TopologyError("reservoir '" + names[i] + "' unreachable from atmosphere");
    }
}

Topology Topology::three_box_serial() {
    Topology t;
    t.names = {"A", "O1", "O2"};
    t.kinds = {ReservoirKind::atmosphere, ReservoirKind::ocean, ReservoirKind::ocean};
    t.transfers = {{1, 0}, {2, 1}};
    return t;
}

Topology Topology::four_box_parallel() {
    Topology t;
    t.names = {"A", "O1", "O2", "L"};
    t.kinds = {ReservoirKind::atmosphere, ReservoirKind::ocean, ReservoirKind::ocean,
               ReservoirKind::land};
    t.transfers = {{1, 0}, {2, 1}, {3, 0}};
    return t;
}

double OperatorParams::rate(const Topology& topo, int to, int from) const {
    for (int k = 0; k < topo.n_transfers(); ++k) {
        if (topo.transfers[k] == std::make_pair(to, from)) return rates[k];
    }
    throw TopologyMismatch("no such transfer pair");
}

namespace {

std::vector<double> real_spectrum(const Matrix& a, double imag_tol, double* max_imag) {
    Eigen::EigenSolver<Matrix> solver(a);
    double worst = 0.0;
    std::vector<double> lambdas;
    lambdas.reserve(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        worst = std::max(worst, std::abs(solver.eigenvalues()[i].imag()));
        lambdas.push_back(solver.eigenvalues()[i].real());
    }
    if (max_imag) *max_imag = worst;
    if (worst > imag_tol) return {};
    std::sort(lambdas.begin(), lambdas.end());
    return lambdas;
}

}  // namespace

CarbonOperator build_operator(const OperatorParams& params, const Topology& topology) {
    topology.validate();
    const int n = topology.size();
    if (static_cast<int>(params.rates.size()) != topology.n_transfers()) {
        throw TopologyMismatch("rate count does not match the topology's transfer set");
    }
    if (params.m_eq.size() != n) throw TopologyMismatch("m_eq length does not match reservoir count");
    if ((params.m_eq.array() <= 0.0).any()) {
        throw TopologyMismatch("equilibrium masses must be strictly positive");
    }
    for (double a : params.rates) {
        if (!(a > 0.0) || !std::isfinite(a)) throw TopologyMismatch("rates must be positive and finite");
    }

    Matrix a = Matrix::Zero(n, n);
    for (int k = 0; k < topology.n_transfers(); ++k) {
        auto [to, from] = topology.transfers[k];
        a(to, from) = params.rates[k];
        a(from, to) = params.rates[k] * params.m_eq[from] / params.m_eq[to];
    }
    for (int i = 0; i < n; ++i) {
        double outflow = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) outflow += a(j, i);
        }
        a(i, i) = -outflow;
    }

    AdmissibilityTolerances tol;
    double max_imag = 0.0;
    std::vector<double> lambdas = real_spectrum(a, tol.imag_abs, &max_imag);
    if (lambdas.empty()) {
        throw InadmissibleSpectrum("complex eigenvalue, |imag| = " + std::to_string(max_imag));
    }
    for (double l : lambdas) {
        if (l <= -1.0 - tol.range_slack || l > tol.range_slack) {
            throw InadmissibleSpectrum("eigenvalue " + std::to_string(l) + " outside (-1, 0]");
        }
    }

    CarbonOperator op;
    op.matrix_ = std::move(a);
    op.params_ = params;
    op.topology_ = topology;
    op.eigenvalues_ = std::move(lambdas);
    return op;
}

ValidationReport validate_operator(const Matrix& matrix, const Vector& m_eq,
                                   const AdmissibilityTolerances& tol) {
    ValidationReport rep;
    const int n = static_cast<int>(matrix.rows());

    rep.max_column_sum = matrix.colwise().sum().cwiseAbs().maxCoeff();
    rep.column_sums_zero = rep.max_column_sum <= 1e-12;

    rep.equilibrium_residual = (matrix * m_eq).norm() / m_eq.norm();
    rep.equilibrium_null = rep.equilibrium_residual <= 1e-10;

    Eigen::EigenSolver<Matrix> solver(matrix);
    rep.max_imag = 0.0;
    double lo = 0.0, hi = -1.0;
    for (int i = 0; i < n; ++i) {
        rep.max_imag = std::max(rep.max_imag, std::abs(solver.eigenvalues()[i].imag()));
        double re = solver.eigenvalues()[i].real();
        lo = std::min(i == 0 ? re : lo, re);
        hi = std::max(i == 0 ? re : hi, re);
    }
    rep.min_eigenvalue = lo;
    rep.max_eigenvalue = hi;
    rep.eigenvalues_real = rep.max_imag <= tol.imag_abs;
    rep.eigenvalues_in_range = lo > -1.0 - tol.range_slack && hi <= tol.range_slack;
    return rep;
}

ValidationReport validate_operator(const CarbonOperator& op, const AdmissibilityTolerances& tol) {
    return validate_operator(op.matrix(), op.params().m_eq, tol);
}

std::vector<double> timescales(const CarbonOperator& op, double zero_tol) {
    std::vector<double> taus;
    for (double l : op.eigenvalues()) {
        if (std::abs(l) > zero_tol) taus.push_back(1.0 / std::abs(l));
    }
    std::sort(taus.rbegin(), taus.rend());
    return taus;
}

CycleState step(const CycleState& state, const CarbonOperator& op, const Vector& emissions,
                std::vector<MassWarning>* warnings) {
    if (state.masses.size() != op.size() || emissions.size() != op.size()) {
        throw TopologyMismatch("state/emission length does not match operator size");
    }
    CycleState next;
    next.masses = state.masses + op.matrix() * state.masses + emissions;
    next.year = state.year + 1;
    if (warnings) {
        for (int i = 0; i < next.masses.size(); ++i) {
            if (next.masses[i] < 0.0) warnings->push_back({next.year, i, next.masses[i]});
        }
    }
    return next;
}

OperatorParams update_land_equilibrium(const OperatorParams& params, double land_use_emission,
                                       const LandCapacityRule& rule, bool* grew) {
    if (rule.land_reservoir_index < 0 || rule.land_reservoir_index >= params.m_eq.size()) {
        throw TopologyMismatch("land reservoir index out of range");
    }
    if (rule.r < 0.0 || rule.r > 1.0) throw ConfigError("deforestation fraction r must be in [0, 1]");

    const double delta = rule.r * land_use_emission;
    if (grew) *grew = delta < 0.0;
    OperatorParams next = params;
    next.m_eq[rule.land_reservoir_index] -= delta;
    if (next.m_eq[rule.land_reservoir_index] <= 0.0) {
        throw CapacityExhausted("land equilibrium mass depleted to " +
                                std::to_string(next.m_eq[rule.land_reservoir_index]) + " GtC");
    }
    return next;
}

MassTrajectory simulate(const Emulator& emulator, const CycleState& m0, const Matrix& emissions,
                        const Vector& land_use, int horizon) {
    const int n = emulator.op.size();
    if (horizon < 0) horizon = static_cast<int>(emissions.rows());
    if (emissions.rows() < horizon || emissions.cols() != n) {
        throw DataError("emission matrix does not cover the horizon");
    }
    const bool dynamic = emulator.land_rule.has_value();
    if (dynamic && land_use.size() < horizon) {
        throw DataError("land-use series does not cover the horizon for a capacity-rule run");
    }

    MassTrajectory traj;
    traj.masses.resize(horizon + 1, n);
    traj.years.resize(horizon + 1);
    traj.masses.row(0) = m0.masses.transpose();
    traj.years[0] = m0.year;

    CycleState state = m0;
    CarbonOperator op = emulator.op;
    OperatorParams params = op.params();
    if (dynamic) {
        traj.land_equilibrium.reserve(horizon + 1);
        traj.land_equilibrium.push_back(params.m_eq[emulator.land_rule->land_reservoir_index]);
    }
    for (int t = 0; t < horizon; ++t) {
        if (dynamic) {
            // Capacity shrinks from this year's land-use emission and the
            // rebuilt operator is what advances the masses.
            bool grew = false;
            params = update_land_equilibrium(params, land_use[t], *emulator.land_rule, &grew);
            if (grew) traj.capacity_growth_years.push_back(state.year);
            op = build_operator(params, op.topology());
            traj.land_equilibrium.push_back(params.m_eq[emulator.land_rule->land_reservoir_index]);
        }
        state = step(state, op, emissions.row(t).transpose(), &traj.warnings);
        traj.masses.row(t + 1) = state.masses.transpose();
        traj.years[t + 1] = state.year;
    }
    return traj;
}

std::string operator_to_csv(const CarbonOperator& op, bool absorb_identity) {
    std::ostringstream os;
    const Matrix& a = op.matrix();
    char buf[64];
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            double v = a(i, j) + (absorb_identity && i == j ? 1.0 : 0.0);
            std::snprintf(buf, sizeof(buf), "%.6g", v);
            os << buf;
            if (j + 1 < a.cols()) os << ",";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace climkit

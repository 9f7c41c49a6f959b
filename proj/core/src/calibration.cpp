#include "climkit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "optim.hpp"

namespace climkit {

void BenchmarkSet::validate() const {
    const auto n = years.size();
    if (n == 0) throw DataError("empty benchmark set");
    if (y_mu.size() != static_cast<Eigen::Index>(n) || y_mu_plus.size() != y_mu.size() ||
        y_mu_minus.size() != y_mu.size()) {
        throw DataError("benchmark curves have mismatched lengths");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (years[i] != static_cast<int>(i)) throw ContiguityError("benchmark years must run 0,1,2,...");
    }
    if ((y_mu.array() <= 0).any()) throw DataError("benchmark masses must be positive");
    if (background != "PI" && background != "PD") throw DataError("background must be PI or PD");
    // envelope ordering, ignoring the first few years where curves may cross
    for (int t = 5; t < static_cast<int>(n); ++t) {
        if (!(y_mu_minus[t] <= y_mu[t] + 1e-9 && y_mu[t] <= y_mu_plus[t] + 1e-9)) {
            throw DataError("envelope ordering violated at year " + std::to_string(t));
        }
    }
}

Hyperparams Hyperparams::defaults(const Topology& topology) {
    Hyperparams h;
    const int n = topology.size();
    const bool has_land = topology.land_index().has_value();
    h.rho3 = has_land ? 1e-4 : 0.0;

    h.rate_lower.assign(topology.n_transfers(), 1e-6);
    h.rate_upper.assign(topology.n_transfers(), 0.3);

    h.mass_lower.resize(n);
    h.mass_upper.resize(n);
    h.m_eq_star.resize(n);
    for (int i = 0; i < n; ++i) {
        switch (topology.kinds[i]) {
            case ReservoirKind::atmosphere:
                h.mass_lower[i] = h.mass_upper[i] = 589.0;  // pinned pre-industrial value
                h.m_eq_star[i] = 589.0;
                break;
            case ReservoirKind::ocean: {
                // first ocean box = upper ocean, second = deep ocean
                bool first = true;
                for (int j = 0; j < i; ++j) {
                    if (topology.kinds[j] == ReservoirKind::ocean) first = false;
                }
                h.mass_lower[i] = 1e-6;
                h.mass_upper[i] = first ? 1800.0 : 74200.0;
                h.m_eq_star[i] = first ? 900.0 : 37100.0;
                break;
            }
            case ReservoirKind::land:
                h.mass_lower[i] = 1e-6;
                h.mass_upper[i] = 1100.0;
                h.m_eq_star[i] = 550.0;
                break;
        }
    }
    return h;
}

void Hyperparams::validate(const Topology& topology) const {
    if (rho1 < 0 || rho2 < 0 || rho3 < 0) throw ConfigError("penalty weights must be non-negative");
    if (fit_horizon < t_ref || t_ref < 1) throw ConfigError("need fit_horizon >= t_ref >= 1");
    if (static_cast<int>(rate_lower.size()) != topology.n_transfers() ||
        rate_upper.size() != rate_lower.size()) {
        throw ConfigError("rate bounds do not match the transfer set");
    }
    if (mass_lower.size() != topology.size() || mass_upper.size() != topology.size() ||
        m_eq_star.size() != topology.size()) {
        throw ConfigError("mass bounds/reference do not match the reservoir count");
    }
    for (int k = 0; k < topology.n_transfers(); ++k) {
        if (!(rate_lower[k] < rate_upper[k])) throw ConfigError("rate bounds must satisfy lower < upper");
    }
    for (int i = 0; i < topology.size(); ++i) {
        if (!(mass_lower[i] <= mass_upper[i])) throw ConfigError("mass bounds must satisfy lower <= upper");
    }
    if (rho3 > 0 && (!topology.land_index() || topology.ocean_indices().empty())) {
        throw ConfigError("rho3 > 0 requires both ocean and land reservoirs");
    }
}

namespace {

MassTrajectory pulse_trajectory(const OperatorParams& params, const Topology& topology,
                                double pulse_gtc, int horizon) {
    CarbonOperator op = build_operator(params, topology);
    CycleState m0{params.m_eq, 0};
    m0.masses[topology.atmosphere_index()] += pulse_gtc;
    Matrix e = Matrix::Zero(horizon, topology.size());
    return simulate(Emulator{std::move(op), std::nullopt}, m0, e);
}

}  // namespace

double fit_error(const OperatorParams& params, const Topology& topology, const BenchmarkSet& bench,
                 const Vector& y, int fit_horizon) {
    if (y.size() < fit_horizon + 1) throw DataError("benchmark curve shorter than the fit horizon");
    MassTrajectory traj = pulse_trajectory(params, topology, bench.pulse_gtc, fit_horizon);
    const int atm = topology.atmosphere_index();
    double ss = 0.0;
    for (int t = 1; t <= fit_horizon; ++t) {
        const double d = traj.masses(t, atm) - y[t];
        ss += d * d;
    }
    return std::sqrt(ss) / fit_horizon;
}

double penalty_q1(const CarbonOperator& op) { return -op.matrix().trace() / op.size(); }

double penalty_q2(const Vector& m_eq, const Vector& m_eq_star) {
    if (m_eq.size() != m_eq_star.size()) throw ConfigError("m_eq / m_eq_star size mismatch");
    return (m_eq - m_eq_star).cwiseQuotient(m_eq_star).norm() / m_eq.size();
}

double penalty_q3(const OperatorParams& params, const Topology& topology, double pulse_gtc,
                  double eta, int t_ref) {
    const auto land = topology.land_index();
    const auto oceans = topology.ocean_indices();
    if (!land || oceans.empty()) {
        throw ConfigError("uptake-ratio penalty needs ocean and land reservoirs");
    }
    MassTrajectory traj = pulse_trajectory(params, topology, pulse_gtc, t_ref);
    double ocean_uptake = 0.0;
    for (int i : oceans) ocean_uptake += traj.masses(t_ref, i) - params.m_eq[i];
    const double land_uptake = traj.masses(t_ref, *land) - params.m_eq[*land];
    return std::abs(ocean_uptake / land_uptake - eta);
}

double penalized_objective(const OperatorParams& params, const Topology& topology,
                           const BenchmarkSet& bench, const Hyperparams& hyper) {
    CarbonOperator op = build_operator(params, topology);
    double obj = fit_error(params, topology, bench, bench.y_mu, hyper.fit_horizon);
    obj += hyper.rho1 * penalty_q1(op);
    obj += hyper.rho2 * penalty_q2(params.m_eq, hyper.m_eq_star);
    if (hyper.rho3 > 0.0) {
        obj += hyper.rho3 * penalty_q3(params, topology, bench.pulse_gtc, hyper.eta, hyper.t_ref);
    }
    return obj;
}

namespace {

// Decision vector layout: all transfer rates, then the non-pinned masses.
struct DecisionSpace {
    const Topology* topo;
    const Hyperparams* hyper;
    std::vector<int> free_mass_indices;
    int dim = 0;

    explicit DecisionSpace(const Topology& t, const Hyperparams& h) : topo(&t), hyper(&h) {
        for (int i = 0; i < t.size(); ++i) {
            if (h.mass_lower[i] < h.mass_upper[i]) free_mass_indices.push_back(i);
        }
        dim = t.n_transfers() + static_cast<int>(free_mass_indices.size());
    }

    // normalized [0,1] coordinates <-> physical parameters
    OperatorParams to_params(const Eigen::VectorXd& z) const {
        OperatorParams p;
        p.rates.resize(topo->n_transfers());
        for (int k = 0; k < topo->n_transfers(); ++k) {
            p.rates[k] = hyper->rate_lower[k] + z[k] * (hyper->rate_upper[k] - hyper->rate_lower[k]);
        }
        p.m_eq = hyper->mass_lower;  // pinned entries stay at their bound value
        for (std::size_t j = 0; j < free_mass_indices.size(); ++j) {
            const int i = free_mass_indices[j];
            p.m_eq[i] = hyper->mass_lower[i] +
                        z[topo->n_transfers() + j] * (hyper->mass_upper[i] - hyper->mass_lower[i]);
        }
        return p;
    }

    Eigen::VectorXd from_params(const OperatorParams& p) const {
        Eigen::VectorXd z(dim);
        for (int k = 0; k < topo->n_transfers(); ++k) {
            z[k] = (p.rates[k] - hyper->rate_lower[k]) / (hyper->rate_upper[k] - hyper->rate_lower[k]);
        }
        for (std::size_t j = 0; j < free_mass_indices.size(); ++j) {
            const int i = free_mass_indices[j];
            z[topo->n_transfers() + j] =
                (p.m_eq[i] - hyper->mass_lower[i]) / (hyper->mass_upper[i] - hyper->mass_lower[i]);
        }
        return z;
    }
};

// Seeded Latin hypercube on [0,1]^dim.
std::vector<Eigen::VectorXd> latin_hypercube(int n_points, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> pts(n_points, Eigen::VectorXd(dim));
    for (int d = 0; d < dim; ++d) {
        std::vector<int> perm(n_points);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int p = 0; p < n_points; ++p) {
            pts[p][d] = (perm[p] + u(rng)) / n_points;
        }
    }
    return pts;
}

}  // namespace

CalibrationResult calibrate_mean(const BenchmarkSet& bench, const Topology& topology,
                                 const Hyperparams& hyper) {
    bench.validate();
    hyper.validate(topology);
    if (bench.y_mu.size() < hyper.fit_horizon + 1) {
        throw DataError("benchmark does not cover the fit horizon");
    }

    DecisionSpace space(topology, hyper);

    auto objective_at = [&](const Eigen::VectorXd& z) -> double {
        // tiny inset keeps rates/masses strictly positive at the box edge
        Eigen::VectorXd zc = z.cwiseMax(1e-12).cwiseMin(1.0);
        try {
            return penalized_objective(space.to_params(zc), topology, bench, hyper);
        } catch (const InadmissibleSpectrum&) {
            return hyper.barrier;
        } catch (const TopologyMismatch&) {
            return hyper.barrier;
        }
    };

    // forward differences away from the barrier; the objective is smooth there
    detail::ValueGrad fg = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) -> double {
        const double f0 = objective_at(z);
        if (grad) {
            grad->resize(z.size());
            const double h = 1e-7;
            for (int i = 0; i < z.size(); ++i) {
                Eigen::VectorXd zp = z;
                zp[i] = std::min(1.0, z[i] + h);
                double fp = objective_at(zp);
                double dz = zp[i] - z[i];
                if (dz == 0.0 || fp >= hyper.barrier) {  // step backwards at the edge
                    zp[i] = std::max(0.0, z[i] - h);
                    fp = objective_at(zp);
                    dz = zp[i] - z[i];
                }
                (*grad)[i] = dz != 0.0 ? (fp - f0) / dz : 0.0;
            }
        }
        return f0;
    };

    std::vector<Eigen::VectorXd> starts = latin_hypercube(hyper.n_starts, space.dim, hyper.seed);
    {
        // reference start: reference masses, mid-range rates
        OperatorParams ref;
        ref.rates.assign(topology.n_transfers(), 0.05);
        ref.m_eq = hyper.m_eq_star.cwiseMax(hyper.mass_lower).cwiseMin(hyper.mass_upper);
        starts.push_back(space.from_params(ref).cwiseMax(0.0).cwiseMin(1.0));
    }

    detail::BoxMinOptions opts;
    opts.max_evaluations = hyper.max_evals_per_start;
    opts.max_iterations = hyper.max_evals_per_start;
    opts.step_tol = hyper.param_tol;
    opts.objective_tol = hyper.objective_tol;
    opts.grad_tol = 1e-10;

    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(space.dim);
    const Eigen::VectorXd hi = Eigen::VectorXd::Ones(space.dim);

    bool have_best = false;
    CalibrationResult best;
    int total_evals = 0, total_iters = 0;

    for (const Eigen::VectorXd& z0 : starts) {
        detail::BoxMinResult r = detail::minimize_box(fg, z0, lo, hi, opts);
        total_evals += r.evaluations * (space.dim + 1);  // finite differences included
        total_iters += r.iterations;
        if (r.value >= hyper.barrier) continue;

        OperatorParams cand = space.to_params(r.x.cwiseMax(1e-12).cwiseMin(1.0));
        bool better = false;
        if (!have_best || r.value < best.objective - 1e-15) {
            better = true;
        } else if (std::abs(r.value - best.objective) <= 1e-15) {
            // deterministic tie-break: lower q1, then lexicographic rates
            const double q1_cand = penalty_q1(build_operator(cand, topology));
            better = q1_cand < best.q1 ||
                     (q1_cand == best.q1 &&
                      std::lexicographical_compare(cand.rates.begin(), cand.rates.end(),
                                                   best.params.rates.begin(),
                                                   best.params.rates.end()));
        }
        if (better) {
            have_best = true;
            best.params = cand;
            best.objective = r.value;
            best.converged = r.converged || r.projected_grad_norm < 1e-7;
            CarbonOperator op = build_operator(cand, topology);
            best.fit_error = fit_error(cand, topology, bench, bench.y_mu, hyper.fit_horizon);
            best.q1 = penalty_q1(op);
            best.q2 = penalty_q2(cand.m_eq, hyper.m_eq_star);
            best.q3 = hyper.rho3 > 0.0
                          ? penalty_q3(cand, topology, bench.pulse_gtc, hyper.eta, hyper.t_ref)
                          : 0.0;
        }
    }
    if (!have_best) throw NoAdmissibleSolution("all calibration starts ended inadmissible");

    best.iterations = total_iters;
    best.evaluations = total_evals;
    best.c_plus = fit_extreme_scale(best.params, topology, bench, bench.y_mu_plus,
                                    hyper.fit_horizon, hyper.c_plus_lower, hyper.c_plus_upper);
    best.c_minus = fit_extreme_scale(best.params, topology, bench, bench.y_mu_minus,
                                     hyper.fit_horizon, hyper.c_minus_lower, hyper.c_minus_upper);
    return best;
}

double fit_extreme_scale(const OperatorParams& mean_params, const Topology& topology,
                         const BenchmarkSet& bench, const Vector& y_extreme, int fit_horizon,
                         double c_lower, double c_upper) {
    if (y_extreme.size() < fit_horizon + 1) throw DataError("envelope curve shorter than fit horizon");
    auto err_at = [&](double c) -> double {
        OperatorParams p = mean_params;
        for (double& r : p.rates) r *= c;
        try {
            return fit_error(p, topology, bench, y_extreme, fit_horizon);
        } catch (const InadmissibleSpectrum&) {
            return 1e6;
        }
    };
    return detail::minimize_scalar(err_at, c_lower, c_upper, 128, 1e-10);
}

CarbonOperator weighted_operator(const CarbonOperator& a_mu, const CarbonOperator& a_plus,
                                 const CarbonOperator& a_minus, double alpha) {
    if (alpha < -1.0 || alpha > 1.0) throw ConfigError("alpha must lie in [-1, 1]");
    const Vector& m_mu = a_mu.params().m_eq;
    if (!m_mu.isApprox(a_plus.params().m_eq) || !m_mu.isApprox(a_minus.params().m_eq)) {
        throw ConfigError("weighted operator requires a shared equilibrium vector");
    }
    OperatorParams mix = a_mu.params();
    for (int k = 0; k < a_mu.topology().n_transfers(); ++k) {
        const double r_mu = a_mu.params().rates[k];
        const double r_pl = a_plus.params().rates[k];
        const double r_mi = a_minus.params().rates[k];
        mix.rates[k] = alpha > 0.0 ? (1.0 - alpha) * r_mu + alpha * r_pl
                                   : (1.0 + alpha) * r_mu - alpha * r_mi;
    }
    return build_operator(mix, a_mu.topology());
}

}  // namespace climkit

#include "climkit/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "climkit/csv.hpp"

namespace climkit {

void EmissionSeries::validate() const {
    if (years.empty()) throw DataError("empty emission series");
    if (fossil_industrial.size() != years.size() || land_use.size() != years.size()) {
        throw DataError("emission series columns have mismatched lengths");
    }
    for (std::size_t i = 1; i < years.size(); ++i) {
        if (years[i] != years[i - 1] + 1) {
            throw ContiguityError("emission series has a gap at year " + std::to_string(years[i]));
        }
    }
}

std::vector<double> EmissionSeries::cumulative_total() const {
    std::vector<double> cum(years.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < years.size(); ++i) {
        acc += total_at(static_cast<int>(i));
        cum[i] = acc;
    }
    return cum;
}

void EmissionSeries::to_inputs(const Topology& topology, int from_year, int horizon,
                               Matrix* emissions, Vector* land_use_out) const {
    validate();
    if (from_year < start_year() || from_year + horizon - 1 > end_year()) {
        throw DataError("emission series does not cover years " + std::to_string(from_year) + ".." +
                        std::to_string(from_year + horizon - 1));
    }
    const int atm = topology.atmosphere_index();
    *emissions = Matrix::Zero(horizon, topology.size());
    land_use_out->setZero(horizon);
    const int offset = from_year - start_year();
    for (int t = 0; t < horizon; ++t) {
        (*emissions)(t, atm) = fossil_industrial[offset + t] + land_use[offset + t];
        (*land_use_out)[t] = land_use[offset + t];
    }
}

EmissionSeries load_emissions(const std::string& path, const std::string& label) {
    auto rows = read_csv(path);
    if (rows.empty()) throw DataError("empty emission file: " + path);
    const auto& header = rows.front();
    if (header.size() < 3 || header[0] != "year" || header[1] != "fossil_industrial_gtc" ||
        header[2] != "land_use_gtc") {
        throw SchemaError("expected header year,fossil_industrial_gtc,land_use_gtc in " + path);
    }
    EmissionSeries s;
    s.label = label.empty() ? std::filesystem::path(path).stem().string() : label;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() < 3) throw SchemaError("short row in " + path);
        const std::string ctx = path + ":" + std::to_string(r + 1);
        s.years.push_back(parse_int(rows[r][0], ctx));
        s.fossil_industrial.push_back(parse_number(rows[r][1], ctx));
        s.land_use.push_back(parse_number(rows[r][2], ctx));
    }
    s.validate();
    return s;
}

namespace {

Vector load_curve(const std::string& path, std::vector<int>* years_out) {
    auto rows = read_csv(path);
    if (rows.empty()) throw DataError("empty benchmark curve: " + path);
    std::size_t first = 0;
    if (rows[0].size() >= 2 && rows[0][0] == "year") first = 1;  // optional header
    std::vector<double> values;
    std::vector<int> years;
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r].size() < 2) throw SchemaError("short row in " + path);
        const std::string ctx = path + ":" + std::to_string(r + 1);
        years.push_back(parse_int(rows[r][0], ctx));
        values.push_back(parse_number(rows[r][1], ctx));
    }
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (years[i] != static_cast<int>(i)) {
            throw ContiguityError("benchmark years must run 0,1,2,... in " + path);
        }
    }
    if (years_out) *years_out = years;
    return Eigen::Map<Vector>(values.data(), values.size());
}

}  // namespace

BenchmarkSet load_benchmark(const std::string& manifest_path) {
    const Json manifest = load_json(manifest_path);
    BenchmarkSet b;
    b.pulse_gtc = require_number(manifest, "pulse_gtc");
    b.background = require_string(manifest, "background");
    const std::string kind = field_or<std::string>(manifest, "value_kind", "mass_gtc");
    const double baseline = field_or<double>(manifest, "baseline_gtc", 589.0);

    const auto dir = std::filesystem::path(manifest_path).parent_path();
    bool have_mu = false, have_plus = false, have_minus = false;
    for (const Json& curve : require_field(manifest, "curves")) {
        const std::string role = require_string(curve, "role");
        const std::string file = (dir / require_string(curve, "file")).string();
        std::vector<int> years;
        Vector y = load_curve(file, &years);
        if (kind == "fraction") {
            y = baseline + b.pulse_gtc * y.array();
        } else if (kind != "mass_gtc") {
            throw SchemaError("value_kind must be mass_gtc or fraction");
        }
        if (role == "mu") {
            b.y_mu = y;
            b.years = years;
            have_mu = true;
        } else if (role == "mu_plus") {
            b.y_mu_plus = y;
            have_plus = true;
        } else if (role == "mu_minus") {
            b.y_mu_minus = y;
            have_minus = true;
        } else if (role.rfind("model:", 0) != 0) {
            throw SchemaError("unknown benchmark role: " + role);
        }
        // individual model curves are accepted but not stored
    }
    if (!have_mu || !have_plus || !have_minus) {
        throw SchemaError("manifest must bind mu, mu_plus and mu_minus curves");
    }
    b.validate();
    return b;
}

PulseRun run_pulse(const Emulator& emulator, double pulse_gtc, int horizon, const EbmParams& ebm) {
    const Topology& topo = emulator.op.topology();
    const int atm = topo.atmosphere_index();
    const Vector m_eq = emulator.op.params().m_eq;

    CycleState m0{m_eq, 0};
    m0.masses[atm] += pulse_gtc;
    Matrix e = Matrix::Zero(horizon, topo.size());
    Vector lu = Vector::Zero(horizon);
    MassTrajectory traj = simulate(emulator, m0, e, lu, horizon);

    PulseRun out;
    out.run.years = traj.years;
    out.run.masses = traj.masses;
    out.run.warnings = traj.warnings;
    out.run.land_equilibrium = traj.land_equilibrium;
    out.run.t_atm.resize(horizon + 1);
    out.run.t_ocean.resize(horizon + 1);
    out.run.forcing_wm2.resize(horizon + 1);

    TempState temp;
    const double m0_atm = m_eq[atm];
    for (int t = 0; t <= horizon; ++t) {
        out.run.t_atm[t] = temp.t_atm;
        out.run.t_ocean[t] = temp.t_ocean;
        out.run.forcing_wm2[t] = forcing(traj.masses(t, atm), m0_atm, ebm);
        if (t < horizon) temp = temp_step(temp, out.run.forcing_wm2[t], ebm);
    }
    out.fraction.resize(horizon + 1);
    for (int t = 0; t <= horizon; ++t) {
        out.fraction[t] = (traj.masses(t, atm) - m_eq[atm]) / pulse_gtc;
    }
    out.run.meta = {{"experiment", "pulse"}, {"pulse_gtc", pulse_gtc}, {"kappa", ebm.kappa}};
    return out;
}

ZecRun run_zec(const Emulator& emulator, int horizon, double growth_rate, double budget_gtc,
               const EbmParams& ebm) {
    const Topology& topo = emulator.op.topology();
    const int atm = topo.atmosphere_index();
    const int n = topo.size();
    const Vector m_eq = emulator.op.params().m_eq;
    const double m0_atm = m_eq[atm];

    ZecRun out;
    out.run.years.resize(horizon + 1);
    out.run.masses.resize(horizon + 1, n);
    out.run.t_atm.resize(horizon + 1);
    out.run.t_ocean.resize(horizon + 1);
    out.run.forcing_wm2.resize(horizon + 1);
    out.implied_emissions.assign(horizon, 0.0);

    CycleState state{m_eq, 0};
    TempState temp;
    double cumulative = 0.0;
    bool ramping = budget_gtc > 0.0;

    for (int t = 0; t <= horizon; ++t) {
        out.run.years[t] = t;
        out.run.masses.row(t) = state.masses.transpose();
        out.run.t_atm[t] = temp.t_atm;
        out.run.t_ocean[t] = temp.t_ocean;
        out.run.forcing_wm2[t] = forcing(state.masses[atm], m0_atm, ebm);
        if (t == horizon) break;

        Vector e = Vector::Zero(n);
        if (ramping) {
            const double target_next = m0_atm * std::pow(1.0 + growth_rate, t + 1);
            const Vector free_next = state.masses + emulator.op.matrix() * state.masses;
            const double implied = target_next - free_next[atm];
            if (implied < 0.0) {
                throw BudgetUnreachable("implied emission negative in year " + std::to_string(t));
            }
            e[atm] = implied;
            out.implied_emissions[t] = implied;
            cumulative += implied;
            if (cumulative >= budget_gtc) {
                ramping = false;
                out.cessation_year = t + 1;
                out.cumulative_at_cessation = cumulative;
            }
        }
        temp = temp_step(temp, out.run.forcing_wm2[t], ebm);
        state = step(state, emulator.op, e, &out.run.warnings);
    }
    if (out.cessation_year < 0 && budget_gtc > 0.0) {
        throw BudgetUnreachable("budget not reached within the horizon");
    }
    if (budget_gtc <= 0.0) {
        out.cessation_year = 0;
        out.cumulative_at_cessation = 0.0;
    }
    out.run.meta = {{"experiment", "zec"},
                    {"growth_rate", growth_rate},
                    {"budget_gtc", budget_gtc},
                    {"cessation_year", out.cessation_year}};
    return out;
}

ScenarioRun run_rcp(const Emulator& emulator, const EmissionSeries& series, const EbmParams& ebm,
                    int horizon) {
    series.validate();
    const Topology& topo = emulator.op.topology();
    const int atm = topo.atmosphere_index();
    if (horizon < 0) horizon = series.size();

    Matrix e;
    Vector lu;
    series.to_inputs(topo, series.start_year(), horizon, &e, &lu);

    CycleState m0{emulator.op.params().m_eq, series.start_year()};
    MassTrajectory traj = simulate(emulator, m0, e, lu, horizon);

    ScenarioRun run;
    run.years = traj.years;
    run.masses = traj.masses;
    run.warnings = traj.warnings;
    run.land_equilibrium = traj.land_equilibrium;
    run.t_atm.resize(horizon + 1);
    run.t_ocean.resize(horizon + 1);
    run.forcing_wm2.resize(horizon + 1);

    TempState temp;
    temp.year = series.start_year();
    const double m0_atm = emulator.op.params().m_eq[atm];
    for (int t = 0; t <= horizon; ++t) {
        run.t_atm[t] = temp.t_atm;
        run.t_ocean[t] = temp.t_ocean;
        run.forcing_wm2[t] = forcing(traj.masses(t, atm), m0_atm, ebm);
        if (t < horizon) temp = temp_step(temp, run.forcing_wm2[t], ebm);
    }
    run.meta = {{"experiment", "rcp"}, {"scenario", series.label}, {"kappa", ebm.kappa}};
    return run;
}

SpinUpResult spin_up_present_day(const Emulator& emulator, const EmissionSeries& historical,
                                 double target_ppm, const EbmParams& ebm, double gtc_per_ppm) {
    historical.validate();
    const Topology& topo = emulator.op.topology();
    const int atm = topo.atmosphere_index();
    const double target_mass = target_ppm * gtc_per_ppm;

    SpinUpResult res;
    res.state = CycleState{emulator.op.params().m_eq, historical.start_year()};
    res.temp = TempState{0.0, 0.0, historical.start_year()};
    res.params = emulator.op.params();

    const double m0_atm = res.params.m_eq[atm];
    if (res.state.masses[atm] >= target_mass) {
        res.stop_year = historical.start_year();
        res.atm_ppm = res.state.masses[atm] / gtc_per_ppm;
        return res;
    }

    CarbonOperator op = emulator.op;
    const int n = topo.size();
    for (int i = 0; i < historical.size(); ++i) {
        Vector e = Vector::Zero(n);
        e[atm] = historical.fossil_industrial[i] + historical.land_use[i];
        if (emulator.land_rule) {
            res.params = update_land_equilibrium(res.params, historical.land_use[i],
                                                 *emulator.land_rule);
            op = build_operator(res.params, topo);
        }
        const double f = forcing(res.state.masses[atm], m0_atm, ebm);
        res.temp = temp_step(res.temp, f, ebm);
        res.state = step(res.state, op, e);
        if (res.state.masses[atm] >= target_mass) {
            res.stop_year = res.state.year;
            res.atm_ppm = res.state.masses[atm] / gtc_per_ppm;
            return res;
        }
    }
    throw TargetNotReached("atmosphere never reached " + std::to_string(target_ppm) +
                           " ppm within the emission series");
}

void write_run_outputs(const std::string& dir, const ScenarioRun& run,
                       const std::vector<std::string>& reservoir_names) {
    std::filesystem::create_directories(dir);
    const int rows = static_cast<int>(run.years.size());

    std::ostringstream masses;
    masses << "year";
    for (const auto& name : reservoir_names) masses << "," << name;
    masses << "\n";
    for (int t = 0; t < rows; ++t) {
        masses << run.years[t];
        for (int j = 0; j < run.masses.cols(); ++j) {
            masses << "," << format_sig(run.masses(t, j), 10);
        }
        masses << "\n";
    }
    write_text_file(dir + "/masses.csv", masses.str());

    std::ostringstream temp;
    temp << "year,t_atm,t_ocean\n";
    for (int t = 0; t < rows; ++t) {
        temp << run.years[t] << "," << format_sig(run.t_atm[t], 10) << ","
             << format_sig(run.t_ocean[t], 10) << "\n";
    }
    write_text_file(dir + "/temperature.csv", temp.str());

    std::ostringstream forc;
    forc << "year,forcing_wm2\n";
    for (int t = 0; t < rows; ++t) {
        forc << run.years[t] << "," << format_sig(run.forcing_wm2[t], 10) << "\n";
    }
    write_text_file(dir + "/forcing.csv", forc.str());

    save_json(dir + "/meta.json", run.meta);
}

}  // namespace climkit

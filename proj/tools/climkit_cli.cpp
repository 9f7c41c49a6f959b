// Command line front end: every experiment is a subcommand reading a JSON
// config (flags win over config keys) and writing deterministic CSV/JSON
// artifacts into a per-run output directory.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <cmath>

#include <CLI11.hpp>

#include "climkit/calibration.hpp"
#include "climkit/carbon.hpp"
#include "climkit/config.hpp"
#include "climkit/csv.hpp"
#include "climkit/ebm.hpp"
#include "climkit/econ.hpp"
#include "climkit/pattern.hpp"
#include "climkit/scenario.hpp"

using namespace climkit;
namespace fs = std::filesystem;

namespace {

struct RunContext {
    Json config = Json::object();
    std::string data_dir = "data";
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    double alpha = 0.0;
    std::string emulator_name = "3SR";
    std::string background = "PI";

    std::string data(const std::string& rel) const { return data_dir + "/" + rel; }

    std::string out_root() const {
        if (const char* env = std::getenv("CLIMKIT_OUT_ROOT")) {
            return std::string(env) + "/" + out_dir;
        }
        return out_dir;
    }

    template <typename T>
    T key_or(const std::string& path, T fallback) const {
        const Json* cur = &config;
        std::istringstream ss(path);
        std::string key;
        while (std::getline(ss, key, '.')) {
            if (!cur->is_object() || !cur->contains(key)) return fallback;
            cur = &cur->at(key);
        }
        return cur->get<T>();
    }
};

std::string calibration_file(const RunContext& ctx) {
    const std::string& name = ctx.emulator_name;
    const bool pd = ctx.background == "PD";
    if (name == "3SR") return ctx.data(pd ? "calibrations/pd_3sr.json" : "calibrations/pi_3sr.json");
    if (name == "4PR") return ctx.data(pd ? "calibrations/pd_4pr.json" : "calibrations/pi_4pr.json");
    if (name == "4PR-X") {
        if (pd) throw ConfigError("no bundled present-day 4PR-X calibration");
        return ctx.data("calibrations/pi_4pr_x.json");
    }
    return name;  // treat as a calibration file path
}

Emulator make_emulator(const RunContext& ctx, CalibrationDoc* doc_out = nullptr) {
    CalibrationDoc doc = load_calibration(calibration_file(ctx));
    if (doc_out) *doc_out = doc;
    return doc.make_emulator(ctx.alpha);
}

EbmParams ebm_from(const RunContext& ctx, double default_kappa) {
    EbmParams ebm = EbmParams::multi_model_mean();
    ebm.heat_capacity_upper = ctx.key_or("ebm.heat_capacity_upper", ebm.heat_capacity_upper);
    ebm.heat_capacity_deep = ctx.key_or("ebm.heat_capacity_deep", ebm.heat_capacity_deep);
    ebm.exchange = ctx.key_or("ebm.exchange", ebm.exchange);
    ebm.feedback = ctx.key_or("ebm.feedback", ebm.feedback);
    ebm.f2x = ctx.key_or("ebm.f2x", ebm.f2x);
    ebm.kappa = ctx.key_or("ebm.kappa", default_kappa);
    ebm.validate();
    return ebm;
}

SpinUpResult spin_up(const RunContext& ctx, const Emulator& emu, const EbmParams& ebm) {
    const std::string path =
        ctx.key_or<std::string>("scenario.historical", ctx.data("emissions/historical.csv"));
    EmissionSeries hist = load_emissions(path, "historical");
    const double target_ppm = ctx.key_or("scenario.target_ppm", 401.0);
    const double gtc_per_ppm = ctx.key_or("scenario.gtc_per_ppm", kGtcPerPpm);
    return spin_up_present_day(emu, hist, target_ppm, ebm, gtc_per_ppm);
}

EconConfig econ_config(const RunContext& ctx, const SpinUpResult& spin) {
    EconConfig cfg = dice2016_annual(ctx.key_or("econ.start_year", 2015),
                                     ctx.key_or("econ.horizon", 400));
    cfg.climate0 = spin.state;
    cfg.temp0 = spin.temp;
    cfg.beta = ctx.key_or("econ.beta", cfg.beta);
    cfg.psi = ctx.key_or("econ.psi", cfg.psi);
    cfg.psi2 = ctx.key_or("econ.psi2", cfg.psi2) * ctx.key_or("econ.damage_scale", 1.0);
    cfg.ebm = ebm_from(ctx, 1.2);
    return cfg;
}

Emulator econ_emulator(const Emulator& base, const SpinUpResult& spin) {
    // continue from the spun-up land capacity
    return Emulator{build_operator(spin.params, base.op.topology()), base.land_rule};
}

void write_json(const std::string& dir, const std::string& name, const Json& doc) {
    fs::create_directories(dir);
    save_json(dir + "/" + name, doc);
}

// ---- subcommand bodies ----

int cmd_validate(const RunContext& ctx) {
    CalibrationDoc doc;
    Emulator emu = make_emulator(ctx, &doc);
    ValidationReport rep = validate_operator(emu.op);

    const std::string dir = ctx.out_root();
    fs::create_directories(dir);
    write_text_file(dir + "/operator.csv", operator_to_csv(emu.op));
    if (ctx.key_or("export.absorb_identity", false)) {
        write_text_file(dir + "/operator_plus_identity.csv", operator_to_csv(emu.op, true));
    }

    Json report = {{"calibration", doc.name},
                   {"alpha", ctx.alpha},
                   {"column_sums_zero", rep.column_sums_zero},
                   {"equilibrium_null", rep.equilibrium_null},
                   {"eigenvalues_real", rep.eigenvalues_real},
                   {"eigenvalues_in_range", rep.eigenvalues_in_range},
                   {"max_column_sum", rep.max_column_sum},
                   {"equilibrium_residual", rep.equilibrium_residual},
                   {"timescales_years", timescales(emu.op)}};
    write_json(dir, "validate.json", report);

    std::cout << (rep.all_passed() ? "operator checks passed" : "operator checks FAILED") << "\n";
    return rep.all_passed() ? 0 : 4;
}

int cmd_calibrate(const RunContext& ctx) {
    const std::string manifest = ctx.key_or<std::string>(
        "calibration.benchmark",
        ctx.data(ctx.background == "PD" ? "benchmarks/PD/manifest.json" : "benchmarks/PI/manifest.json"));
    BenchmarkSet bench = load_benchmark(manifest);

    Topology topo =
        ctx.emulator_name == "3SR" ? Topology::three_box_serial() : Topology::four_box_parallel();
    Hyperparams hyper = Hyperparams::defaults(topo);
    hyper.rho1 = ctx.key_or("calibration.rho1", hyper.rho1);
    hyper.rho2 = ctx.key_or("calibration.rho2", hyper.rho2);
    hyper.rho3 = ctx.key_or("calibration.rho3", hyper.rho3);
    hyper.fit_horizon = ctx.key_or("calibration.fit_horizon", hyper.fit_horizon);
    hyper.seed = ctx.seed;

    CalibrationResult res = calibrate_mean(bench, topo, hyper);

    // average absolute atmospheric error over two reporting windows; the
    // short window matches the fit horizon, the long one the figure-style
    // 50..500 year range
    auto avg_abs_err = [&](int lo, int hi) {
        CarbonOperator op = build_operator(res.params, topo);
        CycleState s{res.params.m_eq, 0};
        s.masses[topo.atmosphere_index()] += bench.pulse_gtc;
        double acc = 0.0;
        int count = 0;
        for (int t = 1; t <= hi && t < static_cast<int>(bench.years.size()); ++t) {
            s = step(s, op, Vector::Zero(topo.size()));
            if (t >= lo) {
                acc += std::abs(s.masses[topo.atmosphere_index()] - bench.y_mu[t]);
                ++count;
            }
        }
        return count ? acc / count : 0.0;
    };
    const double err_fit_window = avg_abs_err(1, hyper.fit_horizon);
    const double err_long_window = avg_abs_err(50, 500);

    CalibrationDoc doc;
    doc.name = ctx.emulator_name + "-" + bench.background + "-fit";
    doc.background = bench.background;
    doc.topology = topo;
    doc.params = res.params;
    doc.c_plus = res.c_plus;
    doc.c_minus = res.c_minus;
    const std::string dir = ctx.out_root();
    fs::create_directories(dir);
    save_calibration(dir + "/calibration.json", doc);

    write_json(dir, "diagnostics.json",
               {{"objective", res.objective},
                {"fit_error_gtc", res.fit_error},
                {"q1", res.q1},
                {"q2", res.q2},
                {"q3", res.q3},
                {"c_plus", res.c_plus},
                {"c_minus", res.c_minus},
                {"avg_abs_error_gtc_fit_window", err_fit_window},
                {"avg_abs_error_gtc_50_500", err_long_window},
                {"iterations", res.iterations},
                {"evaluations", res.evaluations},
                {"converged", res.converged},
                {"seed", ctx.seed}});
    std::cout << "calibrated " << doc.name << ": objective " << res.objective << ", fit error "
              << res.fit_error << " GtC\n";
    return 0;
}

int cmd_pulse(const RunContext& ctx) {
    Emulator emu = make_emulator(ctx);
    const double pulse = ctx.key_or("scenario.pulse_gtc", 100.0);
    const int horizon = ctx.key_or("scenario.horizon", 500);
    PulseRun run = run_pulse(emu, pulse, horizon, ebm_from(ctx, 1.0));

    const std::string dir = ctx.out_root();
    write_run_outputs(dir, run.run, emu.op.topology().names);
    std::ostringstream frac;
    frac << "year,fraction\n";
    for (std::size_t t = 0; t < run.fraction.size(); ++t) {
        frac << run.run.years[t] << "," << format_sig(run.fraction[t], 10) << "\n";
    }
    write_text_file(dir + "/fraction.csv", frac.str());
    std::cout << "pulse run written to " << dir << "\n";
    return 0;
}

int cmd_zec(const RunContext& ctx) {
    Emulator emu = make_emulator(ctx);
    ZecRun run = run_zec(emu, ctx.key_or("scenario.horizon", 250),
                         ctx.key_or("scenario.growth_rate", 0.01),
                         ctx.key_or("scenario.budget_gtc", 1000.0), ebm_from(ctx, 1.0));
    const std::string dir = ctx.out_root();
    write_run_outputs(dir, run.run, emu.op.topology().names);
    std::ostringstream em;
    em << "year,implied_emission_gtc\n";
    for (std::size_t t = 0; t < run.implied_emissions.size(); ++t) {
        em << t << "," << format_sig(run.implied_emissions[t], 10) << "\n";
    }
    write_text_file(dir + "/implied_emissions.csv", em.str());
    std::cout << "cessation year " << run.cessation_year << ", cumulative "
              << run.cumulative_at_cessation << " GtC\n";
    return 0;
}

int cmd_rcp(const RunContext& ctx) {
    Emulator emu = make_emulator(ctx);
    const std::string scenario = ctx.key_or<std::string>("scenario.name", "rcp45");
    const std::string path =
        ctx.key_or<std::string>("scenario.emissions", ctx.data("emissions/" + scenario + ".csv"));
    EmissionSeries series = load_emissions(path);
    ScenarioRun run = run_rcp(emu, series, ebm_from(ctx, 1.2));

    const std::string dir = ctx.out_root();
    write_run_outputs(dir, run, emu.op.topology().names);
    if (!run.land_equilibrium.empty()) {
        std::ostringstream land;
        land << "year,land_mass_ratio,land_equilibrium_ratio\n";
        const int land_idx = emu.land_rule->land_reservoir_index;
        for (std::size_t t = 0; t < run.land_equilibrium.size(); ++t) {
            land << run.years[t] << ","
                 << format_sig(run.masses(t, land_idx) / run.masses(0, land_idx), 10) << ","
                 << format_sig(run.land_equilibrium[t] / run.land_equilibrium[0], 10) << "\n";
        }
        write_text_file(dir + "/land_biosphere.csv", land.str());
    }
    std::cout << "scenario " << series.label << " written to " << dir << "\n";
    return 0;
}

int cmd_spinup(const RunContext& ctx) {
    Emulator emu = make_emulator(ctx);
    EbmParams ebm = ebm_from(ctx, 1.2);
    SpinUpResult spin = spin_up(ctx, emu, ebm);

    std::vector<double> masses(spin.state.masses.data(),
                               spin.state.masses.data() + spin.state.masses.size());
    std::vector<double> m_eq(spin.params.m_eq.data(),
                             spin.params.m_eq.data() + spin.params.m_eq.size());
    write_json(ctx.out_root(), "state.json",
               {{"stop_year", spin.stop_year},
                {"atm_ppm", spin.atm_ppm},
                {"masses_gtc", masses},
                {"m_eq_gtc", m_eq},
                {"t_atm", spin.temp.t_atm},
                {"t_ocean", spin.temp.t_ocean}});
    std::cout << "reached " << spin.atm_ppm << " ppm in " << spin.stop_year << "\n";
    return 0;
}

Json econ_summary(const EconTrajectory& traj) {
    auto at = [&](const std::vector<double>& v, int year) {
        return v[year - traj.years.front()];
    };
    Json j;
    for (int year : {2020, 2050, 2100}) {
        j[std::to_string(year)] = {
            {"m_atm_gtc", traj.masses(year - traj.years.front(), 0)},
            {"t_atm", at(traj.t_atm, year)},
            {"mitigation", at(traj.mitigation, year)},
            {"damage_share", at(traj.damage_share, year)},
            {"damage_trillion", at(traj.damage_level, year)},
        };
    }
    j["welfare"] = traj.welfare;
    j["projected_grad_norm"] = traj.projected_grad_norm;
    j["converged"] = traj.converged;
    return j;
}

int cmd_econ(const RunContext& ctx, PolicyMode mode) {
    Emulator base = make_emulator(ctx);
    EbmParams ebm = ebm_from(ctx, 1.2);
    SpinUpResult spin = spin_up(ctx, base, ebm);
    EconConfig cfg = econ_config(ctx, spin);
    Emulator emu = econ_emulator(base, spin);

    EconTrajectory traj = mode == PolicyMode::bau       ? solve_bau(cfg, emu)
                          : mode == PolicyMode::optimal ? solve_optimal(cfg, emu)
                                                        : run_ccs(cfg, emu);
    const std::string dir = ctx.out_root();
    fs::create_directories(dir);
    write_econ_csv(dir + "/econ.csv", traj, emu.op.topology().names);
    write_json(dir, "summary.json", econ_summary(traj));
    std::cout << "welfare " << traj.welfare << ", gradient norm " << traj.projected_grad_norm
              << "\n";
    return 0;
}

int cmd_scc(const RunContext& ctx) {
    Emulator base = make_emulator(ctx);
    EbmParams ebm = ebm_from(ctx, 1.2);
    SpinUpResult spin = spin_up(ctx, base, ebm);
    EconConfig cfg = econ_config(ctx, spin);
    Emulator emu = econ_emulator(base, spin);
    EconTrajectory opt = solve_optimal(cfg, emu);

    std::ostringstream table;
    table << "year,scc_usd_per_tco2\n";
    for (int year : {2020, 2030, 2040, 2050, 2060, 2070, 2080, 2090, 2100}) {
        table << year << "," << format_sig(scc(cfg, emu, opt, year), 8) << "\n";
    }
    const std::string dir = ctx.out_root();
    fs::create_directories(dir);
    write_text_file(dir + "/scc.csv", table.str());
    write_econ_csv(dir + "/econ.csv", opt, emu.op.topology().names);
    std::cout << "scc table written to " << dir << "/scc.csv\n";
    return 0;
}

int cmd_pattern(const RunContext& ctx) {
    const std::string pattern_file = ctx.key_or<std::string>(
        "pattern.file", ctx.data("patterns/beta_mpi_esm_lr.csv"));
    GridField beta = load_grid(pattern_file);
    RegionSet regions = load_regions(
        ctx.key_or<std::string>("pattern.regions", ctx.data("regions/wgi_v4_sample.csv")));
    regions.land_mask =
        load_grid(ctx.key_or<std::string>("pattern.land_mask", ctx.data("grids/land_mask.csv")));

    const double dt = ctx.key_or("pattern.delta_t", 0.0);
    std::ostringstream out;
    if (dt == 0.0) {
        out << "acronym,beta\n";
        for (const RegionMean& m : aggregate_region(beta, regions)) {
            out << m.acronym << "," << format_sig(m.mean, 8) << "\n";
        }
    } else {
        GridField clim = load_grid(ctx.key_or<std::string>(
            "pattern.climatology", ctx.data("grids/era5_tas_1991_2020.csv")));
        GridField t_abs = anchor_absolute(clim, dt, beta);
        out << "acronym,t_abs\n";
        for (const RegionMean& m : aggregate_region(t_abs, regions)) {
            out << m.acronym << "," << format_sig(m.mean, 8) << "\n";
        }
    }
    const std::string dir = ctx.out_root();
    fs::create_directories(dir);
    write_text_file(dir + "/regions.csv", out.str());
    std::cout << "regional table written to " << dir << "/regions.csv\n";
    return 0;
}

int cmd_damages(const RunContext& ctx) {
    GridField clim = load_grid(
        ctx.key_or<std::string>("pattern.climatology", ctx.data("grids/era5_tas_1991_2020.csv")));
    GridField beta = load_grid(
        ctx.key_or<std::string>("pattern.file", ctx.data("patterns/beta_mpi_esm_lr.csv")));
    RegionSet regions = load_regions(
        ctx.key_or<std::string>("pattern.regions", ctx.data("regions/wgi_v4_sample.csv")));
    regions.land_mask =
        load_grid(ctx.key_or<std::string>("pattern.land_mask", ctx.data("grids/land_mask.csv")));

    const double dt = ctx.key_or("pattern.delta_t", 2.65);
    KSDamageParams params;
    params.floor = ctx.key_or("pattern.damage_floor", params.floor);
    params.t_optimal = ctx.key_or("pattern.t_optimal", params.t_optimal);
    params.kappa_plus = ctx.key_or("pattern.kappa_plus", params.kappa_plus);
    params.kappa_minus = ctx.key_or("pattern.kappa_minus", params.kappa_minus);
    params.validate();

    GridField future = anchor_absolute(clim, dt, beta);
    GridField damage = GridField::like(clim, clim.missing);
    for (int i = 0; i < clim.nlat(); ++i) {
        for (int j = 0; j < clim.nlon(); ++j) {
            if (clim.is_missing(i, j) || future.is_missing(i, j)) continue;
            damage.values(i, j) = ks_damage(future.values(i, j), clim.values(i, j), params);
        }
    }
    std::ostringstream out;
    out << "acronym,tfp_change\n";
    for (const RegionMean& m : aggregate_region(damage, regions)) {
        out << m.acronym << "," << format_sig(m.mean, 8) << "\n";
    }
    const std::string dir = ctx.out_root();
    fs::create_directories(dir);
    write_text_file(dir + "/damages.csv", out.str());
    save_grid(dir + "/damage_field.csv", damage);
    std::cout << "regional damages written to " << dir << "/damages.csv\n";
    return 0;
}

// headline table across emulators with absolute and percent gaps
int cmd_report(const RunContext& ctx) {
    std::vector<std::string> emulators =
        ctx.key_or<std::vector<std::string>>("report.emulators", {"3SR", "4PR", "4PR-X"});
    EbmParams ebm = ebm_from(ctx, 1.2);

    std::vector<Json> rows;
    if (emulators.empty()) {
        const std::string dir = ctx.out_root();
        fs::create_directories(dir);
        write_text_file(dir + "/report.md", "");
        write_json(dir, "report.json", Json::array());
        std::cout << "empty report written to " << dir << "\n";
        return 0;
    }
    for (const std::string& name : emulators) {
        RunContext sub = ctx;
        sub.emulator_name = name;
        Emulator base = make_emulator(sub);
        SpinUpResult spin = spin_up(sub, base, ebm);
        EconConfig cfg = econ_config(sub, spin);
        Emulator emu = econ_emulator(base, spin);
        EconTrajectory bau = solve_bau(cfg, emu);
        EconTrajectory opt = solve_optimal(cfg, emu);
        EconTrajectory ccs = run_ccs(cfg, emu);
        Json row;
        row["emulator"] = name;
        row["bau"] = econ_summary(bau);
        row["ccs"] = econ_summary(ccs);
        row["optimal"] = econ_summary(opt);
        row["scc_2020"] = scc(cfg, emu, opt, 2020);
        row["scc_2050"] = scc(cfg, emu, opt, 2050);
        rows.push_back(std::move(row));
    }

    std::ostringstream md;
    md << "| year | variable |";
    for (const auto& r : rows) md << " " << r["emulator"].get<std::string>() << " |";
    md << " diff first & last |\n";
    md << "|---|---|";
    for (std::size_t i = 0; i < rows.size() + 1; ++i) md << "---|";
    md << "\n";
    auto line = [&](const std::string& label, auto get) {
        md << "| " << label << " |";
        double first = 0.0, last = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double v = get(rows[i]);
            if (i == 0) first = v;
            last = v;
            md << " " << format_sig(v, 6) << " |";
        }
        md << " " << format_sig(last - first, 4) << " (" << format_sig(100.0 * (last / first - 1.0), 3)
           << "%) |\n";
    };
    for (const char* year : {"2020", "2050", "2100"}) {
        line(std::string(year) + " | BAU m_atm (GtC)",
             [&](const Json& r) { return r["bau"][year]["m_atm_gtc"].get<double>(); });
    }
    for (const char* year : {"2020", "2050", "2100"}) {
        line(std::string(year) + " | BAU T_atm (degC)",
             [&](const Json& r) { return r["bau"][year]["t_atm"].get<double>(); });
    }
    for (const char* year : {"2020", "2050", "2100"}) {
        line(std::string(year) + " | BAU damages (trillion USD)",
             [&](const Json& r) { return r["bau"][year]["damage_trillion"].get<double>(); });
    }
    line("2020 | SCC (USD/tCO2)", [&](const Json& r) { return r["scc_2020"].get<double>(); });
    line("2050 | SCC (USD/tCO2)", [&](const Json& r) { return r["scc_2050"].get<double>(); });
    for (const char* year : {"2020", "2050", "2100"}) {
        line(std::string(year) + " | CCS T_atm (degC)",
             [&](const Json& r) { return r["ccs"][year]["t_atm"].get<double>(); });
    }

    const std::string dir = ctx.out_root();
    fs::create_directories(dir);
    write_text_file(dir + "/report.md", md.str());
    Json full = Json::array();
    for (auto& r : rows) full.push_back(r);
    write_json(dir, "report.json", full);
    std::cout << "report written to " << dir << "/report.md\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"interpretable linear box-model climate emulators"};
    app.require_subcommand(1);

    RunContext ctx;
    std::string config_path;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--data", ctx.data_dir, "data directory (default: data)");
    app.add_option("--out", ctx.out_dir, "output directory");
    app.add_option("--seed", ctx.seed, "seed for the calibration multi-start");
    app.add_option("--alpha", ctx.alpha, "operator family weight in [-1, 1]")
        ->check(CLI::Range(-1.0, 1.0));
    app.add_option("--emulator", ctx.emulator_name, "3SR | 4PR | 4PR-X | calibration file");
    app.add_option("--background", ctx.background, "PI | PD")
        ->check(CLI::IsMember({"PI", "PD"}));

    auto* validate = app.add_subcommand("validate", "check operator admissibility");
    auto* calibrate = app.add_subcommand("calibrate", "fit parameters to a benchmark set");
    auto* pulse = app.add_subcommand("pulse", "instantaneous-pulse decay experiment");
    auto* zec = app.add_subcommand("zec", "zero-emissions commitment experiment");
    auto* rcp = app.add_subcommand("rcp", "concentration-pathway rollout");
    auto* spinup = app.add_subcommand("spinup", "integrate to present-day conditions");
    auto* econ_bau = app.add_subcommand("econ-bau", "planner without mitigation");
    auto* econ_opt = app.add_subcommand("econ-opt", "planner with optimal mitigation");
    auto* econ_ccs = app.add_subcommand("econ-ccs", "planner with full abatement");
    auto* scc_cmd = app.add_subcommand("scc", "social cost of carbon table");
    auto* pattern = app.add_subcommand("pattern", "regional aggregation of a warming pattern");
    auto* damages = app.add_subcommand("damages", "regional hump-shaped damage table");
    auto* report = app.add_subcommand("report", "headline tables across emulators");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints usage or the error message
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) ctx.config = load_json(config_path);
        // config keys fill anything the flags left at defaults
        if (ctx.config.contains("emulator") && ctx.emulator_name == "3SR") {
            ctx.emulator_name = ctx.config["emulator"].get<std::string>();
        }
        if (ctx.config.contains("background") && ctx.background == "PI") {
            ctx.background = ctx.config["background"].get<std::string>();
        }
        if (ctx.config.contains("alpha") && ctx.alpha == 0.0) {
            ctx.alpha = ctx.config["alpha"].get<double>();
        }
        if (ctx.config.contains("seed") && ctx.seed == 0) {
            ctx.seed = ctx.config["seed"].get<std::uint64_t>();
        }
        if (ctx.config.contains("output_dir") && ctx.out_dir == "out") {
            ctx.out_dir = ctx.config["output_dir"].get<std::string>();
        }
        if (ctx.alpha < -1.0 || ctx.alpha > 1.0) throw ConfigError("alpha outside [-1, 1]");

        if (*validate) return cmd_validate(ctx);
        if (*calibrate) return cmd_calibrate(ctx);
        if (*pulse) return cmd_pulse(ctx);
        if (*zec) return cmd_zec(ctx);
        if (*rcp) return cmd_rcp(ctx);
        if (*spinup) return cmd_spinup(ctx);
        if (*econ_bau) return cmd_econ(ctx, PolicyMode::bau);
        if (*econ_opt) return cmd_econ(ctx, PolicyMode::optimal);
        if (*econ_ccs) return cmd_econ(ctx, PolicyMode::full_abatement);
        if (*scc_cmd) return cmd_scc(ctx);
        if (*pattern) return cmd_pattern(ctx);
        if (*damages) return cmd_damages(ctx);
        if (*report) return cmd_report(ctx);
    } catch (const Error& e) {
        Json err = {{"error", {{"kind", static_cast<int>(e.kind())}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        Json err = {{"error", {{"kind", 4}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 4;
    }
    return 0;
}

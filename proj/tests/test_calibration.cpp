#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "climkit/calibration.hpp"
#include "climkit/scenario.hpp"
#include "test_util.hpp"

using namespace climkit;
using testutil::pi_3sr_params;
using testutil::pi_4pr_params;
using testutil::pd_3sr_params;

namespace {

BenchmarkSet pi_benchmark() {
    return load_benchmark(testutil::data_path("benchmarks/PI/manifest.json"));
}

// independent pulse-decay oracle: explicit matrix power iteration
Vector pulse_curve(const OperatorParams& p, const Topology& topo, int horizon) {
    CarbonOperator op = build_operator(p, topo);
    Vector m = p.m_eq;
    m[0] += 100.0;
    Vector out(horizon + 1);
    out[0] = m[0];
    for (int t = 1; t <= horizon; ++t) {
        m = m + op.matrix() * m;
        out[t] = m[0];
    }
    return out;
}

BenchmarkSet synthetic_from(const OperatorParams& p, const Topology& topo) {
    BenchmarkSet b;
    b.background = "PI";
    b.pulse_gtc = 100.0;
    const int h = 300;
    b.y_mu = pulse_curve(p, topo, h);
    OperatorParams up = p, dn = p;
    for (double& r : up.rates) r *= 0.5;
    for (double& r : dn.rates) r *= 2.0;
    b.y_mu_plus = pulse_curve(up, topo, h);
    b.y_mu_minus = pulse_curve(dn, topo, h);
    b.years.resize(h + 1);
    for (int t = 0; t <= h; ++t) b.years[t] = t;
    return b;
}

}  // namespace

TEST_CASE("q1 is the mean eigenvalue magnitude") {
    CarbonOperator op3 = build_operator(pi_3sr_params(), Topology::three_box_serial());
    const double expected = (0.0769419 + 0.0711996 + 0.00637963) / 3.0;  // -tr(A)/3
    CHECK(penalty_q1(op3) == doctest::Approx(expected).epsilon(1e-5));

    // q1 equals the mean |lambda| as well
    double sum = 0.0;
    for (double l : op3.eigenvalues()) sum += std::abs(l);
    CHECK(penalty_q1(op3) == doctest::Approx(sum / 3.0).epsilon(1e-12));
}

TEST_CASE("q2 measures relative equilibrium deviations") {
    Vector star(4);
    star << 589.0, 900.0, 37100.0, 550.0;

    CHECK(penalty_q2(star, star) == 0.0);

    Vector one(1), two(1);
    one << 2.0;
    two << 1.0;
    CHECK(penalty_q2(one, two) == doctest::Approx(1.0));

    // reference values from the four-box calibration (direct formula)
    Vector m = pi_4pr_params().m_eq;
    const double direct = std::sqrt(std::pow((1078.0 - 900.0) / 900.0, 2) +
                                    std::pow((37220.0 - 37100.0) / 37100.0, 2) +
                                    std::pow((387.0 - 550.0) / 550.0, 2)) /
                          4.0;
    CHECK(penalty_q2(m, star) == doctest::Approx(direct).epsilon(1e-12));

    // the metric is deliberately asymmetric
    CHECK(penalty_q2(star, m) != doctest::Approx(penalty_q2(m, star)).epsilon(1e-6));
}

TEST_CASE("q3 measures the uptake-ratio deviation at the reference year") {
    const double q = penalty_q3(pi_4pr_params(), Topology::four_box_parallel(), 100.0, 1.0, 20);
    CHECK(q == doctest::Approx(0.285).epsilon(0.05));

    // eta equal to the achieved ratio zeroes the penalty
    const double ratio = 1.0 - q;
    CHECK(penalty_q3(pi_4pr_params(), Topology::four_box_parallel(), 100.0, ratio, 20) ==
          doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(penalty_q3(pi_3sr_params(), Topology::three_box_serial(), 100.0, 1.0, 20),
                    ConfigError);
}

TEST_CASE("fit error vanishes on self-generated data and scales with decay mismatch") {
    Topology topo = Topology::three_box_serial();
    BenchmarkSet b = synthetic_from(pi_3sr_params(), topo);
    CHECK(fit_error(pi_3sr_params(), topo, b, b.y_mu, 250) == doctest::Approx(0.0).epsilon(1e-12));

    // doubling all rates halves the decay time, leaving a visible error
    OperatorParams fast = pi_3sr_params();
    for (double& r : fast.rates) r *= 2.0;
    CHECK(fit_error(fast, topo, b, b.y_mu, 250) > 0.2);
}

TEST_CASE("reference calibrations stay within the fit-quality claim") {
    BenchmarkSet b = pi_benchmark();
    const double mean_anomaly = (b.y_mu.segment(1, 250).array() - 589.0).abs().mean();
    const double err4 = fit_error(pi_4pr_params(), Topology::four_box_parallel(), b, b.y_mu, 250);
    CHECK(err4 <= 0.05 * mean_anomaly);
}

TEST_CASE("calibration beats the stored parameters under the same objective") {
    BenchmarkSet b = pi_benchmark();

    SUBCASE("three-box") {
        Topology topo = Topology::three_box_serial();
        Hyperparams hyper = Hyperparams::defaults(topo);
        CalibrationResult res = calibrate_mean(b, topo, hyper);
        CHECK(res.objective <= penalized_objective(pi_3sr_params(), topo, b, hyper));
        CHECK(res.converged);
        CHECK(res.c_plus < 1.0);
        CHECK(res.c_minus > 1.0);
    }
    SUBCASE("four-box") {
        Topology topo = Topology::four_box_parallel();
        Hyperparams hyper = Hyperparams::defaults(topo);
        CalibrationResult res = calibrate_mean(b, topo, hyper);
        CHECK(res.objective <= penalized_objective(pi_4pr_params(), topo, b, hyper));
        CHECK(res.fit_error <= fit_error(pi_4pr_params(), topo, b, b.y_mu, hyper.fit_horizon));
    }
    SUBCASE("present-day three-box against its stored parameters") {
        BenchmarkSet pd = load_benchmark(testutil::data_path("benchmarks/PD/manifest.json"));
        Topology topo = Topology::three_box_serial();
        Hyperparams hyper = Hyperparams::defaults(topo);
        CalibrationResult res = calibrate_mean(pd, topo, hyper);
        CHECK(res.objective <= penalized_objective(pd_3sr_params(), topo, pd, hyper));
    }
}

TEST_CASE("calibration recovers a synthetic atmospheric trajectory") {
    Topology topo = Topology::three_box_serial();
    BenchmarkSet b = synthetic_from(pi_3sr_params(), topo);
    Hyperparams hyper = Hyperparams::defaults(topo);
    hyper.rho1 = hyper.rho2 = hyper.rho3 = 0.0;  // pure fit
    CalibrationResult res = calibrate_mean(b, topo, hyper);
    CHECK(res.fit_error < 1e-6);
}

TEST_CASE("uptake penalty vanishes for a symmetric ocean/land pair") {
    // atmosphere feeding an ocean box and a land box with identical rates and
    // masses absorbs equally into both
    Topology topo;
    topo.names = {"A", "O1", "L"};
    topo.kinds = {ReservoirKind::atmosphere, ReservoirKind::ocean, ReservoirKind::land};
    topo.transfers = {{1, 0}, {2, 0}};
    OperatorParams p;
    p.rates = {0.03, 0.03};
    p.m_eq.resize(3);
    p.m_eq << 589.0, 700.0, 700.0;
    CHECK(penalty_q3(p, topo, 100.0, 1.0, 20) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("impossible search boxes raise NoAdmissibleSolution") {
    BenchmarkSet b = pi_benchmark();
    Topology topo = Topology::three_box_serial();
    Hyperparams hyper = Hyperparams::defaults(topo);
    // huge rates against a vanishing upper-ocean mass push an eigenvalue
    // below -1 everywhere in the box
    hyper.rate_lower = {0.29, 0.29};
    hyper.rate_upper = {0.3, 0.3};
    hyper.mass_lower[1] = 1e-6;
    hyper.mass_upper[1] = 1e-3;
    hyper.mass_lower[2] = 1e-6;
    hyper.mass_upper[2] = 1e-3;
    CHECK_THROWS_AS(calibrate_mean(b, topo, hyper), NoAdmissibleSolution);
}

TEST_CASE("calibration is deterministic for a fixed seed") {
    BenchmarkSet b = pi_benchmark();
    Topology topo = Topology::three_box_serial();
    Hyperparams hyper = Hyperparams::defaults(topo);
    hyper.seed = 1234;
    CalibrationResult a = calibrate_mean(b, topo, hyper);
    CalibrationResult c = calibrate_mean(b, topo, hyper);
    CHECK(a.objective == c.objective);
    CHECK(a.params.rates == c.params.rates);
    CHECK(a.params.m_eq.isApprox(c.params.m_eq, 0.0));
}

TEST_CASE("raising rho1 never lowers the optimal q1") {
    BenchmarkSet b = pi_benchmark();
    Topology topo = Topology::three_box_serial();
    double prev_q1 = -1.0;
    for (double rho1 : {1e-3, 1e-1, 10.0}) {
        Hyperparams hyper = Hyperparams::defaults(topo);
        hyper.rho1 = rho1;
        CalibrationResult res = calibrate_mean(b, topo, hyper);
        if (prev_q1 >= 0.0) CHECK(res.q1 <= prev_q1 * (1.0 + 1e-6));
        prev_q1 = res.q1;
    }
}

TEST_CASE("extreme scale fits: identity on the mean curve, stored factors on the envelopes") {
    BenchmarkSet b = pi_benchmark();

    SUBCASE("fitting the mean curve returns the trivial scale") {
        Topology topo = Topology::four_box_parallel();
        BenchmarkSet self = synthetic_from(pi_4pr_params(), topo);
        const double c =
            fit_extreme_scale(pi_4pr_params(), topo, self, self.y_mu, 250, 0.5, 1.5);
        CHECK(c == doctest::Approx(1.0).epsilon(1e-4));
    }
    SUBCASE("bundled envelopes reproduce the stored factors") {
        const double c3p = fit_extreme_scale(pi_3sr_params(), Topology::three_box_serial(), b,
                                             b.y_mu_plus, 250, 1e-6, 1.0);
        CHECK(c3p == doctest::Approx(0.4746).epsilon(0.045));
        const double c4m = fit_extreme_scale(pi_4pr_params(), Topology::four_box_parallel(), b,
                                             b.y_mu_minus, 250, 1.0, 5.0);
        CHECK(c4m == doctest::Approx(2.4074).epsilon(0.025));
    }
}

TEST_CASE("weighted operator family") {
    Topology topo = Topology::four_box_parallel();
    CarbonOperator mu = build_operator(pi_4pr_params(), topo);
    OperatorParams up = pi_4pr_params(), dn = pi_4pr_params();
    for (double& r : up.rates) r *= 0.47006381598196945;
    for (double& r : dn.rates) r *= 2.407426003806048;
    CarbonOperator plus = build_operator(up, topo), minus = build_operator(dn, topo);

    SUBCASE("endpoints and midpoint") {
        CHECK((weighted_operator(mu, plus, minus, 0.0).matrix() - mu.matrix()).norm() == 0.0);
        CHECK((weighted_operator(mu, plus, minus, 1.0).matrix() - plus.matrix()).norm() <= 1e-15);
        CHECK((weighted_operator(mu, plus, minus, -1.0).matrix() - minus.matrix()).norm() <= 1e-15);
    }
    SUBCASE("every member keeps the conservation structure") {
        for (double alpha : {-1.0, -0.6, -0.2, 0.3, 0.7, 1.0}) {
            CarbonOperator w = weighted_operator(mu, plus, minus, alpha);
            ValidationReport rep = validate_operator(w);
            CHECK(rep.column_sums_zero);
            CHECK((w.matrix() * pi_4pr_params().m_eq).norm() / pi_4pr_params().m_eq.norm() < 1e-10);
        }
    }
    SUBCASE("out-of-range weight rejected") {
        CHECK_THROWS_AS(weighted_operator(mu, plus, minus, 1.5), ConfigError);
    }
}

TEST_CASE("envelope fits bracket unity for any properly ordered benchmark set") {
    // property: slower-decay envelopes above the mean and faster below force
    // c+ < 1 < c- and the fit recovers the generating factors
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Topology topo = Topology::four_box_parallel();
    for (int trial = 0; trial < 6; ++trial) {
        OperatorParams p = pi_4pr_params();
        for (double& r : p.rates) r *= 0.6 + 0.8 * u(rng);
        p.m_eq[1] = 600.0 + 900.0 * u(rng);
        p.m_eq[3] = 250.0 + 500.0 * u(rng);

        const double c_plus_true = 0.3 + 0.5 * u(rng);
        const double c_minus_true = 1.5 + 1.5 * u(rng);
        const int h = 300;
        BenchmarkSet b;
        b.background = "PI";
        b.pulse_gtc = 100.0;
        b.years.resize(h + 1);
        for (int t = 0; t <= h; ++t) b.years[t] = t;
        b.y_mu = pulse_curve(p, topo, h);
        OperatorParams up = p, dn = p;
        for (double& r : up.rates) r *= c_plus_true;
        for (double& r : dn.rates) r *= c_minus_true;
        b.y_mu_plus = pulse_curve(up, topo, h);
        b.y_mu_minus = pulse_curve(dn, topo, h);
        b.validate();

        const double c_plus = fit_extreme_scale(p, topo, b, b.y_mu_plus, 250, 1e-6, 1.0);
        const double c_minus = fit_extreme_scale(p, topo, b, b.y_mu_minus, 250, 1.0, 5.0);
        CHECK(c_plus < 1.0);
        CHECK(c_minus > 1.0);
        CHECK(c_plus == doctest::Approx(c_plus_true).epsilon(1e-4));
        CHECK(c_minus == doctest::Approx(c_minus_true).epsilon(1e-4));
    }
}

TEST_CASE("rate scaling scales the spectrum") {
    Topology topo = Topology::three_box_serial();
    CarbonOperator base = build_operator(pi_3sr_params(), topo);
    OperatorParams scaled = pi_3sr_params();
    const double c = 0.37;
    for (double& r : scaled.rates) r *= c;
    CarbonOperator sc = build_operator(scaled, topo);
    for (std::size_t i = 0; i < base.eigenvalues().size(); ++i) {
        CHECK(sc.eigenvalues()[i] == doctest::Approx(c * base.eigenvalues()[i]).epsilon(1e-9));
    }
}

TEST_CASE("the operator depends on equilibrium masses only through ratios") {
    Topology topo = Topology::four_box_parallel();
    OperatorParams p = pi_4pr_params();
    OperatorParams q = p;
    q.m_eq *= 3.7;
    CHECK((build_operator(p, topo).matrix() - build_operator(q, topo).matrix()).norm() < 1e-15);
}

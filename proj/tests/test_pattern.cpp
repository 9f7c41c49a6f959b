#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "climkit/pattern.hpp"
#include "test_util.hpp"

using namespace climkit;

namespace {

GridField bundled(const std::string& rel) { return load_grid(testutil::data_path(rel)); }

RegionSet bundled_regions() {
    RegionSet set = load_regions(testutil::data_path("regions/wgi_v4_sample.csv"));
    set.land_mask = bundled("grids/land_mask.csv");
    return set;
}

GridField small_grid(int nlat, int nlon, double fill) {
    GridField g;
    g.lat.setLinSpaced(nlat, -60.0, 60.0);
    g.lon.setLinSpaced(nlon, -150.0, 150.0);
    g.values = Eigen::MatrixXd::Constant(nlat, nlon, fill);
    return g;
}

double region_mean(const std::vector<RegionMean>& means, const std::string& acr) {
    for (const auto& m : means) {
        if (m.acronym == acr) return m.mean;
    }
    FAIL("region not found: ", acr);
    return 0.0;
}

}  // namespace

TEST_CASE("per-cell regression recovers slopes and intercepts") {
    const int t_len = 24;
    std::vector<double> global(t_len);
    for (int t = 0; t < t_len; ++t) global[t] = 0.05 * t;

    SUBCASE("exact proportional field") {
        std::vector<GridField> series;
        for (int t = 0; t < t_len; ++t) series.push_back(small_grid(5, 8, 1.5 * global[t]));
        PatternFit fit = estimate_pattern(series, global, InterceptMode::zero);
        CHECK(fit.beta.values.minCoeff() == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(fit.residual_rms.values.maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("constant field with a free intercept") {
        std::vector<GridField> series;
        for (int t = 0; t < t_len; ++t) series.push_back(small_grid(4, 4, 2.7));
        PatternFit fit = estimate_pattern(series, global, InterceptMode::free);
        CHECK(fit.beta.values.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(fit.intercept.values(0, 0) == doctest::Approx(2.7));
    }
    SUBCASE("noisy synthetic slope matches the closed-form normal equations") {
        std::mt19937 rng(99);
        std::normal_distribution<double> noise(0.0, 0.1);
        const double slope = 1.31, icept = 0.42;
        std::vector<GridField> series;
        std::vector<double> ys;
        for (int t = 0; t < t_len; ++t) {
            double y = icept + slope * global[t] + noise(rng);
            ys.push_back(y);
            series.push_back(small_grid(2, 2, y));
        }
        PatternFit fit = estimate_pattern(series, global, InterceptMode::free);
        // independent normal-equation oracle
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int t = 0; t < t_len; ++t) {
            sx += global[t];
            sy += ys[t];
            sxx += global[t] * global[t];
            sxy += global[t] * ys[t];
        }
        const double beta_hat = (t_len * sxy - sx * sy) / (t_len * sxx - sx * sx);
        CHECK(fit.beta.values(0, 0) == doctest::Approx(beta_hat).epsilon(1e-10));
    }
    SUBCASE("degenerate regressor is rejected") {
        std::vector<GridField> series{small_grid(2, 2, 1.0), small_grid(2, 2, 1.0)};
        CHECK_THROWS_AS(estimate_pattern(series, {0.0, 0.0}, InterceptMode::zero),
                        DegenerateRegressor);
    }
}

TEST_CASE("scaling is linear and mask-preserving") {
    GridField beta = small_grid(6, 9, 1.0);
    beta.values(2, 3) = beta.missing;
    beta.values(4, 7) = 1.8;

    GridField zero = scale_pattern(0.0, beta);
    CHECK(zero.values(0, 0) == 0.0);
    CHECK(zero.is_missing(2, 3));

    GridField one = scale_pattern(2.0, beta);
    GridField two = scale_pattern(4.0, beta);
    for (int i = 0; i < beta.nlat(); ++i) {
        for (int j = 0; j < beta.nlon(); ++j) {
            if (beta.is_missing(i, j)) continue;
            CHECK(two.values(i, j) == doctest::Approx(2.0 * one.values(i, j)));
        }
    }
}

TEST_CASE("anchoring adds the scaled pattern to the climatology") {
    GridField clim = bundled("grids/era5_tas_1991_2020.csv");
    CHECK(clim.global_mean() == doctest::Approx(14.4).epsilon(0.007));  // ingestion check

    GridField beta = bundled("patterns/beta_hadgem2_es.csv");
    GridField same = anchor_absolute(clim, 0.0, beta);
    CHECK((same.values - clim.values).cwiseAbs().maxCoeff() == 0.0);

    GridField warmed = anchor_absolute(clim, 2.65, beta);
    CHECK(warmed.sample_at(-23.55, -46.63) == doctest::Approx(23.04).epsilon(1e-6));
}

TEST_CASE("city projections reproduce the reference table") {
    GridField clim = bundled("grids/era5_tas_1991_2020.csv");
    struct Row {
        double lat, lon, era5, had, mpi;
    };
    const std::vector<Row> rows = {
        {-23.55, -46.63, 21.21, 23.04, 23.19}, {-34.61, -58.38, 16.61, 17.73, 17.97},
        {-12.05, -77.04, 17.34, 18.74, 19.43}, {9.67, 0, 0, 0, 0},  // placeholder (skipped)
    };
    GridField had = anchor_absolute(clim, 2.65, bundled("patterns/beta_hadgem2_es.csv"));
    GridField mpi = anchor_absolute(clim, 2.65, bundled("patterns/beta_mpi_esm_lr.csv"));
    for (const Row& r : rows) {
        if (r.era5 == 0.0) continue;
        CHECK(clim.sample_at(r.lat, r.lon) == doctest::Approx(r.era5).epsilon(1e-9));
        CHECK(had.sample_at(r.lat, r.lon) == doctest::Approx(r.had).epsilon(0.002));
        CHECK(mpi.sample_at(r.lat, r.lon) == doctest::Approx(r.mpi).epsilon(0.002));
    }
}

TEST_CASE("regional aggregation") {
    RegionSet regions = bundled_regions();

    SUBCASE("uniform field aggregates to the same value everywhere") {
        GridField mask = *regions.land_mask;
        GridField uniform = GridField::like(mask, 3.25);
        auto means = aggregate_region(uniform, regions);
        CHECK(means.size() == regions.regions.size());
        for (const auto& m : means) CHECK(m.mean == doctest::Approx(3.25));
    }
    SUBCASE("bundled patterns reproduce the reference region means") {
        auto mpi = aggregate_region(bundled("patterns/beta_mpi_esm_lr.csv"), regions);
        auto had = aggregate_region(bundled("patterns/beta_hadgem2_es.csv"), regions);
        CHECK(region_mean(mpi, "CNA") == doctest::Approx(1.22).epsilon(0.02));
        CHECK(region_mean(had, "CNA") == doctest::Approx(1.35).epsilon(0.02));
        CHECK(region_mean(mpi, "ECA") == doctest::Approx(1.46).epsilon(0.02));
        CHECK(region_mean(had, "SAS") == doctest::Approx(1.09).epsilon(0.02));
    }
    SUBCASE("ensemble envelope fields reproduce the min/max columns") {
        auto mn = aggregate_region(bundled("patterns/beta_ensemble_min.csv"), regions);
        auto mx = aggregate_region(bundled("patterns/beta_ensemble_max.csv"), regions);
        CHECK(region_mean(mn, "CNA") == doctest::Approx(0.89).epsilon(0.05));
        CHECK(region_mean(mx, "CNA") == doctest::Approx(1.84).epsilon(0.03));
        CHECK(region_mean(mn, "SAS") == doctest::Approx(0.86).epsilon(0.05));
        CHECK(region_mean(mx, "EEU") == doctest::Approx(1.98).epsilon(0.03));
    }
    SUBCASE("empty region raises") {
        RegionSet tiny = regions;
        tiny.regions.push_back({"XXX", "Nowhere", {{-179.9, 89.2}, {-179.3, 89.2}, {-179.3, 89.8}}});
        GridField field = *regions.land_mask;
        CHECK_THROWS_AS(aggregate_region(field, tiny), EmptyRegion);
    }
}

TEST_CASE("aggregation commutes with pattern scaling") {
    RegionSet regions = bundled_regions();
    GridField beta = bundled("patterns/beta_mpi_esm_lr.csv");
    const double dt = 2.65;
    auto scaled = aggregate_region(scale_pattern(dt, beta), regions);
    auto raw = aggregate_region(beta, regions);
    for (std::size_t r = 0; r < raw.size(); ++r) {
        CHECK(scaled[r].mean == doctest::Approx(dt * raw[r].mean).epsilon(1e-12));
    }
}

TEST_CASE("region means are invariant under whole-cell longitude rotation") {
    RegionSet regions = bundled_regions();
    GridField beta = bundled("patterns/beta_hadgem2_es.csv");
    const int shift = 17;
    const double dlon = beta.lon[1] - beta.lon[0];

    GridField rotated = beta;
    GridField rmask = *regions.land_mask;
    for (int i = 0; i < beta.nlat(); ++i) {
        for (int j = 0; j < beta.nlon(); ++j) {
            const int j2 = (j + shift) % beta.nlon();
            rotated.values(i, j2) = beta.values(i, j);
            rmask.values(i, j2) = regions.land_mask->values(i, j);
        }
    }
    RegionSet shifted = regions;
    shifted.land_mask = rmask;
    for (auto& region : shifted.regions) {
        for (auto& [lon, lat] : region.polygon) {
            lon += shift * dlon;
            if (lon > 180.0) lon -= 360.0;
        }
    }
    auto base = aggregate_region(beta, regions);
    auto rot = aggregate_region(rotated, shifted);
    for (std::size_t r = 0; r < base.size(); ++r) {
        CHECK(rot[r].mean == doctest::Approx(base[r].mean).epsilon(1e-12));
        CHECK(rot[r].cells == base[r].cells);
    }
}

TEST_CASE("model-climatology rescaling recovers the observed mean") {
    GridField clim = bundled("grids/era5_tas_1991_2020.csv");
    GridField beta = bundled("patterns/beta_mpi_esm_lr.csv");
    // a synthetic model climatology with a warm bias
    GridField model = clim;
    for (int i = 0; i < model.nlat(); ++i) {
        for (int j = 0; j < model.nlon(); ++j) model.values(i, j) += 1.7;
    }
    GridField fixed = rescale_to_observed(model, beta, 14.0);
    CHECK(fixed.global_mean() == doctest::Approx(14.0).epsilon(0.004));  // |mean beta - 1| small
}

TEST_CASE("hump-shaped productivity component") {
    KSDamageParams p;

    CHECK(ks_tfp(11.58, p) == doctest::Approx(1.0));
    CHECK(ks_tfp(1e6, p) == doctest::Approx(p.floor).epsilon(1e-12));
    CHECK(ks_tfp(-1e6, p) == doctest::Approx(p.floor).epsilon(1e-12));
    CHECK(ks_tfp(9.67, p) == doctest::Approx(0.983832).epsilon(1e-5));

    // continuity at the optimum
    CHECK(ks_tfp(11.58 - 1e-9, p) == doctest::Approx(ks_tfp(11.58 + 1e-9, p)).epsilon(1e-10));

    // bounded in (floor, 1]
    for (double t = -40.0; t <= 50.0; t += 0.7) {
        CHECK(ks_tfp(t, p) > p.floor);
        CHECK(ks_tfp(t, p) <= 1.0);
    }
}

TEST_CASE("relative productivity change signs") {
    KSDamageParams p;
    CHECK(ks_damage(17.0, 17.0, p) == 0.0);
    CHECK(ks_damage(11.13, 9.67, p) > 0.0);   // warming toward the optimum
    CHECK(ks_damage(28.80, 27.03, p) < 0.0);  // warming away from the optimum

    // with equal warming, the baseline farther above the optimum loses more
    const double warm = 2.0;
    double prev = 1.0;
    for (double base : {12.0, 16.0, 20.0, 24.0, 28.0}) {
        const double d = ks_damage(base + warm, base, p);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("grid io round-trips and rejects malformed files") {
    GridField g = small_grid(4, 6, 1.0);
    g.values(1, 2) = -3.75;
    g.values(3, 5) = g.missing;
    auto path = std::string("/tmp/climkit_grid_test.csv");
    save_grid(path, g);
    GridField back = load_grid(path);
    CHECK(back.nlat() == 4);
    CHECK(back.values(1, 2) == doctest::Approx(-3.75));
    CHECK(back.is_missing(3, 5));
    CHECK(back.lat.isApprox(g.lat));

    CHECK_THROWS_AS(load_grid(testutil::data_path("emissions/historical.csv")), DataError);
}

#pragma once

// Spatial warming patterns: per-cell OLS estimation, scaling, anchoring to
// climatologies, area-weighted regional aggregation, and the hump-shaped
// local damage function.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "climkit/errors.hpp"

namespace climkit {

// Regular lat-lon scalar field with a missing-value mask encoded in-band.
struct GridField {
    Eigen::VectorXd lat;  // cell centers, degrees, ascending
    Eigen::VectorXd lon;  // cell centers, degrees
    Eigen::MatrixXd values;  // nlat x nlon
    double missing = -9999.0;

    int nlat() const { return static_cast<int>(lat.size()); }
    int nlon() const { return static_cast<int>(lon.size()); }
    bool is_missing(int i, int j) const { return values(i, j) == missing; }
    void validate() const;

    // Nearest-cell lookup; throws DataError for masked cells.
    double sample_at(double lat_deg, double lon_deg) const;
    std::pair<int, int> nearest_cell(double lat_deg, double lon_deg) const;

    // cos(latitude)-weighted mean over unmasked cells.
    double global_mean() const;

    static GridField like(const GridField& other, double fill);
};

GridField load_grid(const std::string& path);
void save_grid(const std::string& path, const GridField& field);

struct Region {
    std::string acronym;
    std::string name;
    std::vector<std::pair<double, double>> polygon;  // (lon, lat) vertices
};

struct RegionSet {
    std::vector<Region> regions;
    std::optional<GridField> land_mask;  // nonzero = land; optional

    // Region index per cell, -1 when unassigned; edge cells go to the first
    // region in file order.
    std::vector<std::vector<int>> assign(const GridField& grid) const;
};

// WGI reference-region column layout: Continent,Type,Name,Acronym followed by
// `lon|lat` vertex cells.
RegionSet load_regions(const std::string& path);

enum class InterceptMode { zero, free };

struct PatternFit {
    GridField beta;
    GridField intercept;     // zero field under InterceptMode::zero
    GridField residual_rms;  // diagnostic only
};

// Per-cell OLS of the local anomaly series on the global-mean series.
// Throws DegenerateRegressor when the global series has no variance (zero
// mode) / no centered variance (free mode).
PatternFit estimate_pattern(const std::vector<GridField>& local_series,
                            const std::vector<double>& global_series, InterceptMode mode);

// delta_t_global * beta, masks propagated.
GridField scale_pattern(double delta_t_global, const GridField& beta);

// climatology + delta_t_global * beta.
GridField anchor_absolute(const GridField& climatology, double delta_t_global,
                          const GridField& beta);

// Removes a model climatology's offset against an observed global mean:
// clim + (observed_mean - mean(clim)) * beta.
GridField rescale_to_observed(const GridField& climatology, const GridField& beta,
                              double observed_global_mean);

struct RegionMean {
    std::string acronym;
    double mean = 0.0;
    int cells = 0;
};

// cos(latitude)-weighted mean over unmasked land cells per region. Throws
// EmptyRegion naming any region without cells.
std::vector<RegionMean> aggregate_region(const GridField& field, const RegionSet& regions);

struct KSDamageParams {
    double floor = 0.02;         // d
    double t_optimal = 11.58;    // deg C
    double kappa_plus = 0.00311;
    double kappa_minus = 0.00456;

    void validate() const;
};

// Hump-shaped climate component of regional TFP, in (d, 1].
double ks_tfp(double t_celsius, const KSDamageParams& params = {});

// Relative TFP change between a future and a baseline temperature; positive
// values are gains.
double ks_damage(double t_future, double t_baseline, const KSDamageParams& params = {});

}  // namespace climkit

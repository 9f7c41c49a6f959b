#include "climkit/pattern.hpp"

#include <cmath>
#include <sstream>

#include "climkit/csv.hpp"

namespace climkit {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

void GridField::validate() const {
    if (nlat() < 1 || nlon() < 1) throw DataError("empty grid");
    if (values.rows() != nlat() || values.cols() != nlon()) throw DataError("grid shape mismatch");
    auto check_regular = [](const Eigen::VectorXd& v, const char* which) {
        if (v.size() < 2) return;
        const double d = v[1] - v[0];
        if (d <= 0) throw DataError(std::string(which) + " centers must ascend");
        for (int i = 2; i < v.size(); ++i) {
            if (std::abs((v[i] - v[i - 1]) - d) > 1e-9) {
                throw DataError(std::string(which) + " spacing is irregular");
            }
        }
    };
    check_regular(lat, "latitude");
    check_regular(lon, "longitude");
    if (lat[0] < -90.0 || lat[nlat() - 1] > 90.0) throw DataError("latitudes outside [-90, 90]");
}

std::pair<int, int> GridField::nearest_cell(double lat_deg, double lon_deg) const {
    const double dlat = nlat() > 1 ? lat[1] - lat[0] : 1.0;
    const double dlon = nlon() > 1 ? lon[1] - lon[0] : 1.0;
    int i = static_cast<int>(std::lround((lat_deg - lat[0]) / dlat));
    double rel = lon_deg - lon[0];
    rel -= 360.0 * std::floor(rel / 360.0 + 0.5);  // wrap to (-180, 180] around lon0
    int j = static_cast<int>(std::lround(rel / dlon));
    i = std::max(0, std::min(nlat() - 1, i));
    j = std::max(0, std::min(nlon() - 1, j));
    return {i, j};
}

double GridField::sample_at(double lat_deg, double lon_deg) const {
    auto [i, j] = nearest_cell(lat_deg, lon_deg);
    if (is_missing(i, j)) {
        throw DataError("sample at (" + std::to_string(lat_deg) + ", " + std::to_string(lon_deg) +
                        ") hits a masked cell");
    }
    return values(i, j);
}

double GridField::global_mean() const {
    double wsum = 0.0, vsum = 0.0;
    for (int i = 0; i < nlat(); ++i) {
        const double w = std::cos(lat[i] * kDegToRad);
        for (int j = 0; j < nlon(); ++j) {
            if (!is_missing(i, j)) {
                wsum += w;
                vsum += w * values(i, j);
            }
        }
    }
    if (wsum == 0.0) throw DataError("grid is fully masked");
    return vsum / wsum;
}

GridField GridField::like(const GridField& other, double fill) {
    GridField g;
    g.lat = other.lat;
    g.lon = other.lon;
    g.missing = other.missing;
    g.values = Eigen::MatrixXd::Constant(other.nlat(), other.nlon(), fill);
    return g;
}

GridField load_grid(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.empty() || rows[0].size() < 7) {
        throw SchemaError("grid file needs a nlat,nlon,lat0,dlat,lon0,dlon,missing header: " + path);
    }
    GridField g;
    const std::string ctx = path + " header";
    const int nlat = parse_int(rows[0][0], ctx);
    const int nlon = parse_int(rows[0][1], ctx);
    const double lat0 = parse_number(rows[0][2], ctx);
    const double dlat = parse_number(rows[0][3], ctx);
    const double lon0 = parse_number(rows[0][4], ctx);
    const double dlon = parse_number(rows[0][5], ctx);
    g.missing = parse_number(rows[0][6], ctx);
    if (static_cast<int>(rows.size()) != nlat + 1) {
        throw SchemaError("grid row count does not match nlat in " + path);
    }
    g.lat.setLinSpaced(nlat, lat0, lat0 + dlat * (nlat - 1));
    g.lon.setLinSpaced(nlon, lon0, lon0 + dlon * (nlon - 1));
    g.values.resize(nlat, nlon);
    for (int i = 0; i < nlat; ++i) {
        const auto& row = rows[i + 1];
        if (static_cast<int>(row.size()) != nlon) {
            throw SchemaError("grid row " + std::to_string(i) + " has wrong width in " + path);
        }
        for (int j = 0; j < nlon; ++j) {
            g.values(i, j) = parse_number(row[j], path + " row " + std::to_string(i));
        }
    }
    g.validate();
    return g;
}

void save_grid(const std::string& path, const GridField& field) {
    field.validate();
    std::ostringstream os;
    const double dlat = field.nlat() > 1 ? field.lat[1] - field.lat[0] : 1.0;
    const double dlon = field.nlon() > 1 ? field.lon[1] - field.lon[0] : 1.0;
    os << field.nlat() << "," << field.nlon() << "," << format_sig(field.lat[0], 10) << ","
       << format_sig(dlat, 10) << "," << format_sig(field.lon[0], 10) << ","
       << format_sig(dlon, 10) << "," << format_sig(field.missing, 10) << "\n";
    for (int i = 0; i < field.nlat(); ++i) {
        for (int j = 0; j < field.nlon(); ++j) {
            os << format_sig(field.values(i, j), 8);
            if (j + 1 < field.nlon()) os << ",";
        }
        os << "\n";
    }
    write_text_file(path, os.str());
}

namespace {

// Even-odd rule; tries the raw longitude and +-360 shifts so polygons that
// cross the dateline still work.
bool point_in_polygon(double lon, double lat, const std::vector<std::pair<double, double>>& poly) {
    auto test = [&](double x) {
        bool inside = false;
        const std::size_t n = poly.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const double xi = poly[i].first, yi = poly[i].second;
            const double xj = poly[j].first, yj = poly[j].second;
            const bool crosses = (yi > lat) != (yj > lat);
            if (crosses && x < (xj - xi) * (lat - yi) / (yj - yi) + xi) inside = !inside;
        }
        return inside;
    };
    return test(lon) || test(lon + 360.0) || test(lon - 360.0);
}

}  // namespace

std::vector<std::vector<int>> RegionSet::assign(const GridField& grid) const {
    std::vector<std::vector<int>> idx(grid.nlat(), std::vector<int>(grid.nlon(), -1));
    for (int i = 0; i < grid.nlat(); ++i) {
        for (int j = 0; j < grid.nlon(); ++j) {
            for (std::size_t r = 0; r < regions.size(); ++r) {
                if (point_in_polygon(grid.lon[j], grid.lat[i], regions[r].polygon)) {
                    idx[i][j] = static_cast<int>(r);  // first region in file order wins
                    break;
                }
            }
        }
    }
    return idx;
}

RegionSet load_regions(const std::string& path) {
    auto rows = read_csv(path);
    RegionSet set;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() < 5) continue;
        if (row[0] == "Continent") continue;  // header
        Region region;
        region.name = row[2];
        region.acronym = row[3];
        for (std::size_t c = 4; c < row.size(); ++c) {
            if (row[c].empty()) continue;
            const auto bar = row[c].find('|');
            if (bar == std::string::npos) {
                throw SchemaError("expected lon|lat vertex in " + path + " row " + std::to_string(r));
            }
            const std::string ctx = path + " row " + std::to_string(r);
            region.polygon.emplace_back(parse_number(row[c].substr(0, bar), ctx),
                                        parse_number(row[c].substr(bar + 1), ctx));
        }
        if (region.polygon.size() < 3) {
            throw SchemaError("region " + region.acronym + " has fewer than 3 vertices");
        }
        for (const auto& other : set.regions) {
            if (other.acronym == region.acronym) {
                throw SchemaError("duplicate region acronym " + region.acronym);
            }
        }
        set.regions.push_back(std::move(region));
    }
    if (set.regions.empty()) throw SchemaError("no regions found in " + path);
    return set;
}

PatternFit estimate_pattern(const std::vector<GridField>& local_series,
                            const std::vector<double>& global_series, InterceptMode mode) {
    if (local_series.empty() || local_series.size() != global_series.size()) {
        throw DataError("pattern estimation needs aligned local and global series");
    }
    const GridField& g0 = local_series.front();
    const int t_len = static_cast<int>(global_series.size());

    double sx = 0.0, sxx = 0.0;
    for (double x : global_series) {
        sx += x;
        sxx += x * x;
    }
    const double mean_x = sx / t_len;
    const double var_zero = sxx;
    const double var_free = sxx - t_len * mean_x * mean_x;
    if ((mode == InterceptMode::zero && var_zero == 0.0) ||
        (mode == InterceptMode::free && var_free == 0.0)) {
        throw DegenerateRegressor("global series has no usable variance");
    }

    PatternFit fit;
    fit.beta = GridField::like(g0, g0.missing);
    fit.intercept = GridField::like(g0, g0.missing);
    fit.residual_rms = GridField::like(g0, g0.missing);

    for (int i = 0; i < g0.nlat(); ++i) {
        for (int j = 0; j < g0.nlon(); ++j) {
            bool masked = false;
            double sxy = 0.0, sy = 0.0;
            for (int t = 0; t < t_len; ++t) {
                if (local_series[t].is_missing(i, j)) {
                    masked = true;
                    break;
                }
                sxy += global_series[t] * local_series[t].values(i, j);
                sy += local_series[t].values(i, j);
            }
            if (masked) continue;
            double beta, alpha;
            if (mode == InterceptMode::zero) {
                beta = sxy / var_zero;
                alpha = 0.0;
            } else {
                beta = (sxy - t_len * mean_x * (sy / t_len)) / var_free;
                alpha = sy / t_len - beta * mean_x;
            }
            double ss = 0.0;
            for (int t = 0; t < t_len; ++t) {
                const double resid = local_series[t].values(i, j) - alpha - beta * global_series[t];
                ss += resid * resid;
            }
            fit.beta.values(i, j) = beta;
            fit.intercept.values(i, j) = alpha;
            fit.residual_rms.values(i, j) = std::sqrt(ss / t_len);
        }
    }
    return fit;
}

namespace {

GridField combine(const GridField& a, const GridField& b, double scale_b, bool add_a) {
    if (a.nlat() != b.nlat() || a.nlon() != b.nlon()) throw DataError("grid shape mismatch");
    GridField out = GridField::like(a, a.missing);
    for (int i = 0; i < a.nlat(); ++i) {
        for (int j = 0; j < a.nlon(); ++j) {
            if (a.is_missing(i, j) || b.is_missing(i, j)) continue;
            out.values(i, j) = (add_a ? a.values(i, j) : 0.0) + scale_b * b.values(i, j);
        }
    }
    return out;
}

}  // namespace

GridField scale_pattern(double delta_t_global, const GridField& beta) {
    GridField out = GridField::like(beta, beta.missing);
    for (int i = 0; i < beta.nlat(); ++i) {
        for (int j = 0; j < beta.nlon(); ++j) {
            if (!beta.is_missing(i, j)) out.values(i, j) = delta_t_global * beta.values(i, j);
        }
    }
    return out;
}

GridField anchor_absolute(const GridField& climatology, double delta_t_global,
                          const GridField& beta) {
    return combine(climatology, beta, delta_t_global, true);
}

GridField rescale_to_observed(const GridField& climatology, const GridField& beta,
                              double observed_global_mean) {
    const double offset = observed_global_mean - climatology.global_mean();
    return combine(climatology, beta, offset, true);
}

std::vector<RegionMean> aggregate_region(const GridField& field, const RegionSet& regions) {
    field.validate();
    if (regions.land_mask) {
        if (regions.land_mask->nlat() != field.nlat() || regions.land_mask->nlon() != field.nlon()) {
            throw DataError("land mask grid does not match the field grid");
        }
    }
    const auto idx = regions.assign(field);
    std::vector<double> wsum(regions.regions.size(), 0.0), vsum(regions.regions.size(), 0.0);
    std::vector<int> count(regions.regions.size(), 0);
    for (int i = 0; i < field.nlat(); ++i) {
        const double w = std::cos(field.lat[i] * kDegToRad);
        for (int j = 0; j < field.nlon(); ++j) {
            const int r = idx[i][j];
            if (r < 0 || field.is_missing(i, j)) continue;
            if (regions.land_mask) {
                if (regions.land_mask->is_missing(i, j)) continue;
                if (regions.land_mask->values(i, j) == 0.0) continue;
            }
            wsum[r] += w;
            vsum[r] += w * field.values(i, j);
            ++count[r];
        }
    }
    std::vector<RegionMean> out;
    for (std::size_t r = 0; r < regions.regions.size(); ++r) {
        if (count[r] == 0) {
            throw EmptyRegion("region " + regions.regions[r].acronym + " has no unmasked cells");
        }
        out.push_back({regions.regions[r].acronym, vsum[r] / wsum[r], count[r]});
    }
    return out;
}

void KSDamageParams::validate() const {
    if (floor <= 0.0 || floor >= 1.0) throw ConfigError("damage floor must lie in (0, 1)");
    if (kappa_plus <= 0.0 || kappa_minus <= 0.0) throw ConfigError("damage curvatures must be positive");
}

double ks_tfp(double t_celsius, const KSDamageParams& params) {
    const double dev = t_celsius - params.t_optimal;
    const double kappa = t_celsius >= params.t_optimal ? params.kappa_plus : params.kappa_minus;
    return (1.0 - params.floor) * std::exp(-kappa * dev * dev) + params.floor;
}

double ks_damage(double t_future, double t_baseline, const KSDamageParams& params) {
    return ks_tfp(t_future, params) / ks_tfp(t_baseline, params) - 1.0;
}

}  // namespace climkit

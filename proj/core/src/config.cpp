#include "climkit/config.hpp"

#include <fstream>
#include <sstream>

#include "climkit/calibration.hpp"

namespace climkit {

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return Json::parse(in, nullptr, true, true);  // allow comments
    } catch (const Json::parse_error& e) {
        throw ConfigError("parse error in " + path + ": " + e.what());
    }
}

void save_json(const std::string& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << doc.dump(2) << "\n";
}

const Json& require_field(const Json& doc, const std::string& path) {
    const Json* cur = &doc;
    std::istringstream ss(path);
    std::string key;
    while (std::getline(ss, key, '.')) {
        if (!cur->is_object() || !cur->contains(key)) {
            throw ConfigError("missing config field: " + path);
        }
        cur = &cur->at(key);
    }
    return *cur;
}

double require_number(const Json& doc, const std::string& path) {
    const Json& v = require_field(doc, path);
    if (!v.is_number()) throw ConfigError("config field is not a number: " + path);
    return v.get<double>();
}

std::string require_string(const Json& doc, const std::string& path) {
    const Json& v = require_field(doc, path);
    if (!v.is_string()) throw ConfigError("config field is not a string: " + path);
    return v.get<std::string>();
}

namespace {

ReservoirKind kind_from_string(const std::string& s) {
    if (s == "atmosphere") return ReservoirKind::atmosphere;
    if (s == "ocean") return ReservoirKind::ocean;
    if (s == "land") return ReservoirKind::land;
    throw ConfigError("unknown reservoir kind: " + s);
}

std::string kind_to_string(ReservoirKind k) {
    switch (k) {
        case ReservoirKind::atmosphere: return "atmosphere";
        case ReservoirKind::ocean: return "ocean";
        case ReservoirKind::land: return "land";
    }
    return "?";
}

}  // namespace

Emulator CalibrationDoc::make_emulator() const {
    Emulator emu{build_operator(params, topology), land_rule};
    return emu;
}

Emulator CalibrationDoc::make_emulator(double alpha) const {
    if (alpha == 0.0) return make_emulator();
    if (!c_plus || !c_minus) {
        throw ConfigError("calibration '" + name + "' has no extreme scaling factors; alpha must be 0");
    }
    CarbonOperator mu = build_operator(params, topology);
    OperatorParams up = params, down = params;
    for (auto& r : up.rates) r *= *c_plus;
    for (auto& r : down.rates) r *= *c_minus;
    CarbonOperator op = weighted_operator(mu, build_operator(up, topology),
                                          build_operator(down, topology), alpha);
    return Emulator{std::move(op), land_rule};
}

CalibrationDoc load_calibration(const std::string& path) {
    const Json j = load_json(path);
    CalibrationDoc doc;
    doc.name = field_or<std::string>(j, "name", path);
    doc.background = require_string(j, "background");
    if (doc.background != "PI" && doc.background != "PD") {
        throw ConfigError("background must be PI or PD in " + path);
    }

    const Json& topo = require_field(j, "topology");
    for (const Json& r : require_field(topo, "reservoirs")) {
        doc.topology.names.push_back(require_string(r, "name"));
        doc.topology.kinds.push_back(kind_from_string(require_string(r, "kind")));
    }
    for (const Json& t : require_field(topo, "transfers")) {
        if (!t.is_array() || t.size() != 2) throw ConfigError("transfer entries must be [to, from]");
        // stored 1-based to match the usual matrix-position convention
        doc.topology.transfers.push_back({t[0].get<int>() - 1, t[1].get<int>() - 1});
    }
    doc.topology.validate();

    for (const Json& v : require_field(j, "rates")) doc.params.rates.push_back(v.get<double>());
    const Json& meq = require_field(j, "m_eq");
    doc.params.m_eq.resize(meq.size());
    for (std::size_t i = 0; i < meq.size(); ++i) doc.params.m_eq[i] = meq[i].get<double>();

    if (j.contains("c_plus")) doc.c_plus = j["c_plus"].get<double>();
    if (j.contains("c_minus")) doc.c_minus = j["c_minus"].get<double>();

    if (j.contains("land_rule")) {
        LandCapacityRule rule;
        rule.r = field_or<double>(j["land_rule"], "r", 1.0);
        const std::string res = require_string(j["land_rule"], "reservoir");
        rule.land_reservoir_index = -1;
        for (int i = 0; i < doc.topology.size(); ++i) {
            if (doc.topology.names[i] == res) rule.land_reservoir_index = i;
        }
        if (rule.land_reservoir_index < 0) {
            throw ConfigError("land_rule.reservoir '" + res + "' not in topology");
        }
        doc.land_rule = rule;
    }

    // fail early on inconsistent documents
    build_operator(doc.params, doc.topology);
    return doc;
}

Json calibration_to_json(const CalibrationDoc& doc) {
    Json j;
    j["name"] = doc.name;
    j["background"] = doc.background;
    Json reservoirs = Json::array();
    for (int i = 0; i < doc.topology.size(); ++i) {
        reservoirs.push_back(
            {{"name", doc.topology.names[i]}, {"kind", kind_to_string(doc.topology.kinds[i])}});
    }
    Json transfers = Json::array();
    for (auto [to, from] : doc.topology.transfers) {
        transfers.push_back(Json::array({to + 1, from + 1}));
    }
    j["topology"] = {{"reservoirs", reservoirs}, {"transfers", transfers}};
    j["rates"] = doc.params.rates;
    std::vector<double> meq(doc.params.m_eq.data(), doc.params.m_eq.data() + doc.params.m_eq.size());
    j["m_eq"] = meq;
    if (doc.c_plus) j["c_plus"] = *doc.c_plus;
    if (doc.c_minus) j["c_minus"] = *doc.c_minus;
    if (doc.land_rule) {
        j["land_rule"] = {{"r", doc.land_rule->r},
                          {"reservoir", doc.topology.names[doc.land_rule->land_reservoir_index]}};
    }
    return j;
}

void save_calibration(const std::string& path, const CalibrationDoc& doc) {
    save_json(path, calibration_to_json(doc));
}

}  // namespace climkit

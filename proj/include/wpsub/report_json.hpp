#pragma once

#include "report.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <iomanip>

namespace wpsub {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const Vec& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline const char* to_string(ToleranceMode m) {
    return m == ToleranceMode::finite_difference ? "fd" : "analytic";
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

// Field order is fixed; everything except "timestamp" is a function of (entry, seed, parameters).
inline ordered_json to_json(const VerificationReport& r, bool with_timestamp = true) {
    ordered_json j;
    j["entry"] = r.entry;
    j["seed"] = r.seed;
    const VerifyParameters& p = r.parameters;
    j["parameters"] = {{"samples", p.samples},   {"vectors", p.vectors},         {"tolerance_tier", to_string(p.tolerance)},
                       {"geodesics", p.geodesics}, {"t_end", p.t_end},           {"dt", p.dt},
                       {"tension_points", p.tension_points}};
    ordered_json results = ordered_json::array();
    for (const ResultRow& row : r.results) {
        const RelationReport& rep = row.report;
        ordered_json e;
        e["id"] = rep.relation_id;
        e["status"] = to_string(rep.status);
        e["expected"] = to_string(row.expected);
        e["residual"] = rep.residual;
        e["tolerance"] = rep.tolerance;
        e["tier"] = to_string(rep.tier);
        e["samples_used"] = rep.samples_used;
        e["worst_point"] = to_json(rep.worst_point);
        if (!rep.note.empty()) e["note"] = rep.note;
        if (rep.alternate_residual) {
            e["alternate_residual"] = *rep.alternate_residual;
            e["alternate_label"] = rep.alternate_label;
        }
        results.push_back(std::move(e));
    }
    j["results"] = std::move(results);
    ordered_json geodesics = ordered_json::array();
    for (const GeodesicDiagnostics& g : r.geodesics)
        geodesics.push_back({{"p0", to_json(g.p0)},
                             {"v0", to_json(g.v0)},
                             {"energy_drift", g.energy_drift},
                             {"clairaut_drift", g.clairaut_drift},
                             {"left_domain", g.left_domain}});
    j["geodesics"] = std::move(geodesics);
    j["version"] = version;
    if (with_timestamp) j["timestamp"] = utc_timestamp();
    return j;
}

} // namespace wpsub

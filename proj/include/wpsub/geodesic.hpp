#pragma once

#include "geometry.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace wpsub {

struct GeodesicTrace {
    std::vector<double> times;
    std::vector<Vec> points;
    std::vector<Vec> velocities;
    std::vector<double> energy;           // g(c', c') per step
    std::vector<double> clairaut_values;  // filled by clairaut analysis, may be empty
    bool left_domain = false;
    bool quality_warning = false;         // relative energy drift exceeded 1e-3

    std::size_t size() const { return times.size(); }

    double max_energy_drift() const {
        double worst = 0.0;
        if (energy.empty()) return worst;
        const double e0 = energy.front();
        for (double e : energy) worst = std::max(worst, std::abs(e - e0) / e0);
        return worst;
    }
};

inline constexpr double energy_warning_threshold = 1e-3;

// Fixed-step RK4 on x'' = -Gamma(x', x'). Stops early, flagging left_domain, if a stage leaves the chart
// or reaches a nonpositive warping.
inline GeodesicTrace integrate_geodesic(const MetricField& m, const Vec& p0, const Vec& v0, double t_end, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("end time must be non-negative");
    const double e0 = m.inner(p0, v0, v0);
    if (!(e0 > 0.0)) throw std::invalid_argument("initial velocity must be nonzero");
    auto accel = [&](const Vec& x, const Vec& v) { return Vec(-christoffel(m, x).contract(v, v)); };

    GeodesicTrace trace;
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    trace.times.reserve(static_cast<std::size_t>(steps) + 1);
    Vec x = p0, v = v0;
    auto record = [&](double t) {
        trace.times.push_back(t);
        trace.points.push_back(x);
        trace.velocities.push_back(v);
        trace.energy.push_back(m.inner(x, v, v));
    };
    record(0.0);
    for (long k = 0; k < steps; ++k) {
        try {
            const Vec k1x = v, k1v = accel(x, v);
            const Vec x2 = x + 0.5 * dt * k1x, v2 = v + 0.5 * dt * k1v;
            if (!m.valid(x2)) throw boundary_error("stage outside chart");
            const Vec k2x = v2, k2v = accel(x2, v2);
            const Vec x3 = x + 0.5 * dt * k2x, v3 = v + 0.5 * dt * k2v;
            if (!m.valid(x3)) throw boundary_error("stage outside chart");
            const Vec k3x = v3, k3v = accel(x3, v3);
            const Vec x4 = x + dt * k3x, v4 = v + dt * k3v;
            if (!m.valid(x4)) throw boundary_error("stage outside chart");
            const Vec k4x = v4, k4v = accel(x4, v4);
            const Vec xn = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            const Vec vn = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if (!m.valid(xn)) throw boundary_error("step outside chart");
            x = xn;
            v = vn;
        } catch (const boundary_error&) {
            trace.left_domain = true;
            break;
        } catch (const invalid_warping&) {
            trace.left_domain = true;
            break;
        }
        record(static_cast<double>(k + 1) * dt);
    }
    trace.quality_warning = trace.max_energy_drift() > energy_warning_threshold;
    return trace;
}

// ---- CSV -----------------------------------------------------------------

inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline void write_trace_csv(std::ostream& out, const GeodesicTrace& trace) {
    if (trace.size() == 0) throw std::invalid_argument("empty trace");
    const int m = static_cast<int>(trace.points.front().size());
    out << "t";
    for (int i = 1; i <= m; ++i) out << ",x" << i;
    for (int i = 1; i <= m; ++i) out << ",v" << i;
    out << ",energy,clairaut_value\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << format_double(trace.times[k]);
        for (int i = 0; i < m; ++i) out << ',' << format_double(trace.points[k][i]);
        for (int i = 0; i < m; ++i) out << ',' << format_double(trace.velocities[k][i]);
        out << ',' << format_double(trace.energy[k]) << ','
            << (k < trace.clairaut_values.size() ? format_double(trace.clairaut_values[k]) : std::string("nan"))
            << '\n';
    }
}

inline double parse_double(std::string_view s) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("malformed number: " + std::string(s));
    return x;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

inline GeodesicTrace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("missing CSV header");
    const auto header = split_csv_line(line);
    if (header.size() < 5 || header.front() != "t" || header.back() != "clairaut_value")
        throw std::invalid_argument("unexpected CSV header");
    const int m = static_cast<int>(header.size() - 3) / 2;
    GeodesicTrace trace;
    bool has_clairaut = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw std::invalid_argument("CSV row has the wrong number of columns");
        trace.times.push_back(parse_double(cells[0]));
        Vec x(m), v(m);
        for (int i = 0; i < m; ++i) {
            x[i] = parse_double(cells[1 + i]);
            v[i] = parse_double(cells[1 + m + i]);
        }
        trace.points.push_back(x);
        trace.velocities.push_back(v);
        trace.energy.push_back(parse_double(cells[1 + 2 * m]));
        if (cells.back() == "nan") has_clairaut = false;
        else trace.clairaut_values.push_back(parse_double(cells.back()));
    }
    if (!has_clairaut) trace.clairaut_values.clear();
    return trace;
}

} // namespace wpsub

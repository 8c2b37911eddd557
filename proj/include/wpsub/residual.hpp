#pragma once

#include "tensor.hpp"

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace wpsub {

enum class Tier { analytic, finite_difference };
enum class Status { pass, fail, skip };

inline constexpr double analytic_tolerance = 1e-8;
inline constexpr double fd_tolerance = 1e-4;
inline constexpr double third_derivative_tolerance = 1e-3;
inline constexpr double relative_floor = 1e-3;

inline double tolerance_for(Tier t) { return t == Tier::analytic ? analytic_tolerance : fd_tolerance; }
inline Tier combine(Tier a, Tier b) { return a == Tier::analytic && b == Tier::analytic ? Tier::analytic : Tier::finite_difference; }
inline Tier tier_of(bool analytic) { return analytic ? Tier::analytic : Tier::finite_difference; }

inline const char* to_string(Tier t) { return t == Tier::analytic ? "analytic" : "finite-difference"; }
inline const char* to_string(Status s) {
    switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::skip: return "SKIP";
    }
    return "?";
}

// |difference| relative to the largest magnitude among the terms, absolute when all terms are tiny.
inline double relative_residual(double difference, std::initializer_list<double> terms) {
    double scale = 0.0;
    for (double t : terms) scale = std::max(scale, std::abs(t));
    return scale < relative_floor ? std::abs(difference) : std::abs(difference) / scale;
}

inline double relative_residual(double difference, const std::vector<double>& terms) {
    double scale = 0.0;
    for (double t : terms) scale = std::max(scale, std::abs(t));
    return scale < relative_floor ? std::abs(difference) : std::abs(difference) / scale;
}

struct RelationReport {
    std::string relation_id;
    Status status = Status::pass;
    double residual = 0.0;
    double tolerance = analytic_tolerance;
    Tier tier = Tier::analytic;
    int samples_used = 0;
    Vec worst_point;
    std::string note;
    // Residual of an alternative reading of the same identity, when one is tracked.
    std::optional<double> alternate_residual;
    std::string alternate_label;
};

// Tracks the maximum residual seen and where it occurred.
class ResidualMax {
public:
    void add(double residual, const Vec& point) {
        ++count_;
        if (residual > max_ || worst_.size() == 0) {
            max_ = std::max(max_, residual);
            worst_ = point;
        }
    }
    double value() const { return max_; }
    const Vec& worst_point() const { return worst_; }
    int count() const { return count_; }

private:
    double max_ = 0.0;
    Vec worst_;
    int count_ = 0;
};

inline RelationReport make_report(std::string id, const ResidualMax& acc, Tier tier, double tolerance) {
    RelationReport r;
    r.relation_id = std::move(id);
    r.residual = acc.value();
    r.tier = tier;
    r.tolerance = tolerance;
    r.samples_used = acc.count();
    r.worst_point = acc.worst_point();
    r.status = r.residual < tolerance ? Status::pass : Status::fail;
    return r;
}

inline RelationReport make_report(std::string id, const ResidualMax& acc, Tier tier) {
    return make_report(std::move(id), acc, tier, tolerance_for(tier));
}

inline RelationReport skipped(std::string id, std::string reason, Tier tier = Tier::finite_difference) {
    RelationReport r;
    r.relation_id = std::move(id);
    r.status = Status::skip;
    r.tier = tier;
    r.tolerance = tolerance_for(tier);
    r.note = std::move(reason);
    return r;
}

} // namespace wpsub

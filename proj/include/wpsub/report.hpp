#pragma once

#include "catalog.hpp"

namespace wpsub {

inline constexpr const char* version = "0.1.0";

enum class ToleranceMode { per_relation, finite_difference };

struct VerifyParameters {
    std::uint64_t seed = default_seed;
    int samples = 25;
    int vectors = 8;
    ToleranceMode tolerance = ToleranceMode::per_relation;
    int geodesics = 20;
    double t_end = 1.0;
    double dt = 1e-3;
    int tension_points = 10;
};

struct ResultRow {
    RelationReport report;
    Status expected = Status::pass;

    bool as_expected() const { return report.status == expected; }
};

struct GeodesicDiagnostics {
    Vec p0, v0;
    double energy_drift = 0.0;
    double clairaut_drift = 0.0;
    bool left_domain = false;
};

struct VerificationReport {
    std::string entry;
    std::uint64_t seed = default_seed;
    VerifyParameters parameters;
    std::vector<ResultRow> results;
    std::vector<GeodesicDiagnostics> geodesics;

    bool all_as_expected() const {
        return std::all_of(results.begin(), results.end(), [](const ResultRow& r) { return r.as_expected(); });
    }
    const ResultRow* find(std::string_view id) const {
        for (const ResultRow& r : results)
            if (r.report.relation_id == id) return &r;
        return nullptr;
    }
};

inline constexpr double energy_drift_tolerance = 1e-6;
inline constexpr double clairaut_drift_tolerance = 1e-4;
inline constexpr double compatibility_tolerance = 1e-10;

namespace detail {

inline RelationReport scalar_report(std::string id, double residual, double tolerance, Tier tier, int samples,
                                    Vec worst = {}) {
    RelationReport r;
    r.relation_id = std::move(id);
    r.residual = residual;
    r.tolerance = tolerance;
    r.tier = tier;
    r.samples_used = samples;
    r.worst_point = std::move(worst);
    r.status = residual < tolerance ? Status::pass : Status::fail;
    return r;
}

inline std::vector<RelationReport> skip_all(const std::vector<std::string>& ids, const std::string& reason) {
    std::vector<RelationReport> out;
    for (const auto& id : ids) out.push_back(skipped(id, reason));
    return out;
}

} // namespace detail

inline VerificationReport run_verification(const CatalogEntry& entry, const VerifyParameters& params) {
    const WarpedSubmersion& ws = entry.ws;
    const MetricField& M = ws.source.combined;
    VerificationReport report;
    report.entry = entry.name;
    report.seed = params.seed;
    report.parameters = params;
    const std::vector<Vec> points = sample_points(entry, params.samples, params.seed);
    const int n_points = static_cast<int>(points.size());
    std::vector<RelationReport> rows;
    auto append = [&](std::vector<RelationReport> more) { rows.insert(rows.end(), more.begin(), more.end()); };

    const WarpedSampling sampling{points, params.vectors, params.seed};
    append(check_wp_connection(ws.source, sampling));
    append(check_wp_curvature(ws.source, sampling));

    const BlockLayout& L = ws.layout();
    std::vector<Vec> first_points, second_points;
    for (const Vec& p : points) {
        first_points.push_back(L.first(p));
        second_points.push_back(L.second(p));
    }
    rows.push_back(detail::scalar_report("riemannian-submersion-1", check_riemannian_submersion(ws.phi1, first_points),
                                         tolerance_for(tier_of(static_cast<bool>(ws.phi1.jacobian))),
                                         tier_of(static_cast<bool>(ws.phi1.jacobian)), n_points));
    rows.push_back(detail::scalar_report("riemannian-submersion-2", check_riemannian_submersion(ws.phi2, second_points),
                                         tolerance_for(tier_of(static_cast<bool>(ws.phi2.jacobian))),
                                         tier_of(static_cast<bool>(ws.phi2.jacobian)), n_points));
    rows.push_back(detail::scalar_report("warping-compatibility", check_warping_compatibility(ws, points),
                                         compatibility_tolerance, Tier::analytic, n_points));
    append(check_wpsub_tensors(ws, sampling));

    const ClairautConditions conditions = check_clairaut_conditions(ws, points);
    rows.push_back(conditions.gradient_horizontal);
    rows.push_back(conditions.umbilical_first_fibers);
    rows.push_back(conditions.geodesic_second_fibers);

    // geodesics from random starting points and unit directions
    {
        Rng rng(params.seed + 1);
        double worst_energy = 0.0, worst_clairaut = 0.0;
        GeodesicConditionResidual worst_condition;
        int drifting = 0;
        for (int i = 0; i < params.geodesics; ++i) {
            const Vec p0 = rng.point_in(entry.box, M);
            const Vec v0 = rng.unit_vector(M.metric_at(p0));
            const GeodesicTrace trace = integrate_geodesic(M, p0, v0, params.t_end, params.dt);
            const ClairautStats stats = clairaut_trace(ws, trace);
            const GeodesicConditionResidual cond = check_geodesic_condition(ws, trace);
            GeodesicDiagnostics d{p0, v0, trace.max_energy_drift(), stats.max_drift, trace.left_domain};
            worst_energy = std::max(worst_energy, d.energy_drift);
            worst_clairaut = std::max(worst_clairaut, d.clairaut_drift);
            if (d.clairaut_drift > 1e-2) ++drifting;
            worst_condition.horizontal = std::max(worst_condition.horizontal, cond.horizontal);
            worst_condition.vertical = std::max(worst_condition.vertical, cond.vertical);
            report.geodesics.push_back(std::move(d));
        }
        rows.push_back(detail::scalar_report("geodesic-energy", worst_energy, energy_drift_tolerance,
                                             Tier::analytic, params.geodesics));
        RelationReport law = detail::scalar_report("clairaut-law", worst_clairaut, clairaut_drift_tolerance,
                                                   Tier::finite_difference, params.geodesics);
        law.note = std::to_string(drifting) + " of " + std::to_string(params.geodesics) + " geodesics drift above 1e-2";
        rows.push_back(law);
        RelationReport theorem = detail::scalar_report("clairaut-theorem", 0.0, 1.0, Tier::finite_difference,
                                                       params.geodesics);
        const bool conditions_hold = conditions.all_pass();
        const bool law_holds = law.status == Status::pass;
        theorem.residual = conditions_hold == law_holds ? 0.0 : 1.0;
        theorem.status = conditions_hold == law_holds ? Status::pass : Status::fail;
        theorem.note = std::string("conditions ") + (conditions_hold ? "hold" : "fail") + ", law " +
                       (law_holds ? "holds" : "fails");
        rows.push_back(theorem);
        rows.push_back(detail::scalar_report("geodesic-condition-horizontal", worst_condition.horizontal,
                                             geodesic_condition_tolerance, Tier::finite_difference, params.geodesics));
        rows.push_back(detail::scalar_report("geodesic-condition-vertical", worst_condition.vertical,
                                             geodesic_condition_tolerance, Tier::finite_difference, params.geodesics));
    }

    const bool clairaut = conditions.all_pass();
    const std::string hypothesis = "Clairaut conditions do not hold";

    // harmonicity
    if (clairaut) {
        ResidualMax stated, corrected, laplacians, laplacians_corrected, characterization;
        const int count = std::min(params.tension_points, n_points);
        const int codim = ws.vertical_dim1() + ws.vertical_dim2();
        for (int i = 0; i < count; ++i) {
            const Vec& p = points[static_cast<std::size_t>(i)];
            const Mat gt = ws.target.combined.metric_at(ws.joint.value(p));
            const Vec tau = tension_field(ws, p);
            const Vec minus = predicted_tension(ws, p, -1.0), plus = predicted_tension(ws, p, 1.0);
            stated.add(detail::vec_residual(gt, tau, {minus}), p);
            corrected.add(detail::vec_residual(gt, tau, {plus}), p);
            // tau vanishes exactly when grad psi does or both codimensions are zero
            const bool harmonic = g_norm(gt, tau) < fd_tolerance;
            const bool predicted_harmonic =
                codim == 0 || g_norm(M.metric_at(p), gradient(M, ws.psi, p)) < fd_tolerance;
            characterization.add(harmonic == predicted_harmonic ? 0.0 : 1.0, p);
            const LaplacianPair lp = horizontal_laplacian_psi(ws, p);
            laplacians.add(relative_residual(lp.full - lp.first_horizontal, {lp.full, lp.first_horizontal}), p);
            // the vertical and second-factor traces each contribute |grad psi|^2
            const Vec grad = gradient(M, ws.psi, p);
            const double extra = (ws.vertical_dim1() + ws.source.m2.dim) * M.inner(p, grad, grad);
            laplacians_corrected.add(
                relative_residual(lp.full - lp.first_horizontal - extra, {lp.full, lp.first_horizontal, extra}), p);
        }
        RelationReport tension = make_report("harmonic-tension", stated, Tier::finite_difference);
        tension.alternate_residual = corrected.value();
        tension.alternate_label = "positive sign on the codimension term";
        rows.push_back(tension);
        rows.push_back(make_report("harmonic-characterization", characterization, Tier::finite_difference, 0.5));
        RelationReport lap = make_report("hlaplacian", laplacians, ingredient_tier(ws, hess_psi));
        lap.alternate_residual = laplacians_corrected.value();
        lap.alternate_label = "with (m1 - n1 + m2) |grad psi|^2 added to the horizontal trace";
        rows.push_back(lap);
    } else {
        append(detail::skip_all({"harmonic-tension", "harmonic-characterization", "hlaplacian"}, hypothesis));
    }

    // curvature theorem and its corollaries
    const SampleSettings settings{points, params.vectors, params.seed};
    if (clairaut) {
        append(verify_curv_relations(ws, entry.fiber_charts, settings));
        append(verify_sec_relations(ws, entry.fiber_charts, settings));
        append(verify_ric_relations(ws, entry.fiber_charts, settings));
        ResidualMax gap;
        for (const Vec& p : points) {
            const Vec grad = gradient(M, ws.psi, p);
            const Vec first = L.first(grad);
            const double full = M.inner(p, grad, grad);
            const double block = ws.source.m1.inner(L.first(p), first, first);
            gap.add(relative_residual(full - block, {full, block}), p);
        }
        rows.push_back(make_report("psi-norm-first-block", gap, gradient_tier(ws)));
    } else {
        std::vector<std::string> ids = relation_registry();
        ids.push_back("psi-norm-first-block");
        append(detail::skip_all(ids, hypothesis));
    }

    // consequences
    const Tier curvature_tier = ingredient_tier(ws, curvature);
    const EinsteinResult einstein = einstein_residual(M, points);
    RelationReport e = detail::scalar_report("einstein", einstein.residual, tolerance_for(curvature_tier),
                                             curvature_tier, n_points);
    e.note = "lambda " + format_double(einstein.lambda);
    rows.push_back(e);
    if (M.dim >= 4) {
        const double kulkarni = kulkarni_flatness(M, points, params.vectors, params.seed);
        const double weyl_norm = weyl_flatness(M, points);
        const double tol = tolerance_for(curvature_tier);
        const RelationReport k = detail::scalar_report("kulkarni", kulkarni, tol, curvature_tier, n_points);
        const RelationReport w = detail::scalar_report("weyl", weyl_norm, tol, curvature_tier, n_points);
        rows.push_back(k);
        rows.push_back(w);
        const bool agree = k.status == w.status;
        rows.push_back(detail::scalar_report("kulkarni-weyl-agreement", agree ? 0.0 : 1.0, 0.5, curvature_tier, n_points));
    } else {
        append(detail::skip_all({"kulkarni", "weyl", "kulkarni-weyl-agreement"},
                                "dimension " + std::to_string(M.dim) + " is below 4"));
    }
    {
        const SubharmonicityReport sub = subharmonicity_indicator(ws, points);
        RelationReport r;
        if (entry.subharmonic_oracle) {
            ResidualMax acc;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double expected = entry.subharmonic_oracle(points[i]);
                acc.add(relative_residual(sub.values[i] - expected, {sub.values[i], expected}), points[i]);
            }
            r = make_report("subharmonicity", acc, ingredient_tier(ws, hess_psi));
        } else {
            r = skipped("subharmonicity", "no closed form for this entry");
        }
        r.note = std::string("sign: ") + to_string(sub.sign);
        rows.push_back(r);
    }
    rows.push_back(divergence_identity(ws, points, params.vectors, params.seed));

    if (params.tolerance == ToleranceMode::finite_difference) {
        for (RelationReport& r : rows) {
            if (r.status == Status::skip || r.tier != Tier::analytic) continue;
            r.tolerance = std::max(r.tolerance, fd_tolerance);
            r.status = r.residual < r.tolerance ? Status::pass : Status::fail;
        }
    }

    const auto structural = structural_skips(ws, entry.fiber_charts);
    const std::vector<std::string> registry = relation_registry();
    for (RelationReport& r : rows) {
        ResultRow row{std::move(r), Status::pass};
        const std::string& id = row.report.relation_id;
        const bool in_registry = std::find(registry.begin(), registry.end(), id) != registry.end();
        if (auto it = entry.expected_overrides.find(id); it != entry.expected_overrides.end())
            row.expected = it->second;
        else if (!entry.is_clairaut && (in_registry || id == "psi-norm-first-block"))
            row.expected = Status::skip;
        else if (structural.count(id))
            row.expected = Status::skip;
        report.results.push_back(std::move(row));
    }
    return report;
}

} // namespace wpsub

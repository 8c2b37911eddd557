#include <wpsub/catalog.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace wpsub;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

std::vector<RelationReport> all_relations(const CatalogEntry& e, std::span<const Vec> pts, int vectors = 4) {
    const SampleSettings s{pts, vectors, default_seed};
    std::vector<RelationReport> out = verify_curv_relations(e.ws, e.fiber_charts, s);
    for (auto& r : verify_sec_relations(e.ws, e.fiber_charts, s)) out.push_back(std::move(r));
    for (auto& r : verify_ric_relations(e.ws, e.fiber_charts, s)) out.push_back(std::move(r));
    return out;
}

const RelationReport& by_id(const std::vector<RelationReport>& reps, const std::string& id) {
    const auto it = std::find_if(reps.begin(), reps.end(), [&](const RelationReport& r) { return r.relation_id == id; });
    if (it == reps.end()) throw std::out_of_range(id);
    return *it;
}

MetricField exp_conformal_r4() {
    ScalarField conformal{[](const Vec& x) { return std::exp(2 * x[0]); },
                          [](const Vec& x) {
                              Vec g = Vec::Zero(4);
                              g[0] = 2 * std::exp(2 * x[0]);
                              return g;
                          },
                          [](const Vec& x) {
                              Mat h = Mat::Zero(4, 4);
                              h(0, 0) = 4 * std::exp(2 * x[0]);
                              return h;
                          }};
    return conformally_flat(4, conformal);
}

MetricField sphere_product() {
    const MetricField s2 = charts::stereographic_sphere(2, 1.0);
    return build_warped(s2, s2, ScalarField::constant(2, 1.0)).combined;
}

std::vector<Vec> box_points(int dim, int count, double lo, double hi, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec> pts;
    for (int i = 0; i < count; ++i) {
        Vec p(dim);
        for (int k = 0; k < dim; ++k) p[k] = rng.uniform(lo, hi);
        pts.push_back(p);
    }
    return pts;
}

std::vector<CatalogEntry> clairaut_entries() {
    std::vector<CatalogEntry> out;
    for (CatalogEntry& e : catalog_entries())
        if (e.is_clairaut) out.push_back(std::move(e));
    return out;
}

} // namespace

TEST(Registry, IdsAreExactlyTheThirtyNineRelations) {
    const auto ids = relation_registry();
    std::set<std::string> expected;
    for (int i = 1; i <= 29; ++i) expected.insert((i < 10 ? "curv-phi-0" : "curv-phi-") + std::to_string(i));
    for (int i = 1; i <= 6; ++i) expected.insert("sec-phi-" + std::to_string(i));
    for (int i = 1; i <= 4; ++i) expected.insert("ric-phi-" + std::to_string(i));
    EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()), expected);
    EXPECT_EQ(ids.size(), 39u);
    const auto specs = curvature_relation_specs();
    ASSERT_EQ(specs.size(), 29u);
    for (std::size_t i = 0; i < specs.size(); ++i) EXPECT_EQ(specs[i].id, ids[i]);
}

TEST(Registry, EveryRelationIsExercisedOrSkippedWithReason) {
    std::map<std::string, std::vector<RelationReport>> seen;
    for (const CatalogEntry& e : clairaut_entries()) {
        const auto pts = sample_points(e, 3, default_seed);
        for (const RelationReport& r : all_relations(e, pts, 2)) seen[r.relation_id].push_back(r);
    }
    for (const std::string& id : relation_registry()) {
        ASSERT_TRUE(seen.count(id)) << id << " never evaluated";
        const auto& reps = seen[id];
        const bool passes_somewhere =
            std::any_of(reps.begin(), reps.end(), [](const RelationReport& r) { return r.status == Status::pass; });
        // a printed form that fails counts as tested when its tracked alternative passes
        const bool alternate_passes = std::any_of(reps.begin(), reps.end(), [](const RelationReport& r) {
            return r.status == Status::fail && r.alternate_residual && *r.alternate_residual < r.tolerance;
        });
        const bool skipped_with_reason = std::all_of(reps.begin(), reps.end(), [](const RelationReport& r) {
            return r.status == Status::skip && !r.note.empty();
        });
        EXPECT_TRUE(passes_somewhere || alternate_passes || skipped_with_reason) << id;
    }
}

TEST(CurvatureRelations, GirthEntryAllPass) {
    const CatalogEntry e = r4_girth_entry();
    const auto pts = sample_points(e, 8, default_seed);
    for (const RelationReport& r : verify_curv_relations(e.ws, e.fiber_charts, {pts, 4, default_seed}))
        EXPECT_EQ(r.status, Status::pass) << r.relation_id << " " << r.residual;
}

TEST(CurvatureRelations, ZeroRelationsVanishAbsolutely) {
    const std::set<std::string> zero = {"curv-phi-04", "curv-phi-12", "curv-phi-19", "curv-phi-20", "curv-phi-21",
                                        "curv-phi-22", "curv-phi-23", "curv-phi-24", "curv-phi-25", "curv-phi-26",
                                        "curv-phi-27", "curv-phi-28", "curv-phi-29"};
    for (const auto& spec : curvature_relation_specs()) EXPECT_EQ(spec.zero, zero.count(spec.id) == 1) << spec.id;
    for (const CatalogEntry& e : clairaut_entries()) {
        const auto pts = sample_points(e, 5, default_seed);
        for (const RelationReport& r : verify_curv_relations(e.ws, e.fiber_charts, {pts, 4, default_seed})) {
            if (!zero.count(r.relation_id) || r.status == Status::skip) continue;
            EXPECT_LT(r.residual, r.tolerance) << e.name << " " << r.relation_id;
        }
    }
}

TEST(CurvatureRelations, MixedVerticalPlaneMatchesConeCurvature) {
    // (r, theta, y) block of R^4 x_r R^3 is dr^2 + r^2 (dtheta^2 + dy^2): the (theta, y) plane has curvature -1/r^2
    const CatalogEntry e = r4_girth_entry();
    const Vec p = vec({1.2, 0.9, 0.1, 0.2, 0.3, 0.4, 0.5});
    const double r = 1.5;
    const Vec around = vec({-0.9 / r, 1.2 / r, 0, 0, 0, 0, 0});
    const Vec fiber = vec({0, 0, 0, 0, 0, 0, 1.0 / r});
    EXPECT_NEAR(sectional(e.ws.source.combined, p, around, fiber), -1.0 / (r * r), 1e-12);
    // relation (9) predicts R(U1, U2, U1, U2) = |grad psi|^2 = 1/r^2
    const auto pts = std::vector<Vec>{p};
    const auto reps = verify_curv_relations(e.ws, e.fiber_charts, {pts, 8, default_seed});
    EXPECT_LT(by_id(reps, "curv-phi-09").residual, 1e-10);
}

TEST(CurvatureRelations, SecondFiberCoefficientIsOne) {
    // plane fibers of R^4 x_r R^4: the V2 plane has curvature -1/r^2 = -|grad psi|^2
    const CatalogEntry e = r4_girth_k2_entry();
    const Vec p = vec({1.2, 0.9, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    const double r = 1.5;
    EXPECT_NEAR(sectional(e.ws.source.combined, p, vec({0, 0, 0, 0, 0, 0, 1, 0}), vec({0, 0, 0, 0, 0, 0, 0, 1})),
                -1.0 / (r * r), 1e-12);
    const auto pts = sample_points(e, 5, default_seed);
    const auto reps = all_relations(e, pts);
    for (const char* id : {"curv-phi-02", "sec-phi-2", "ric-phi-2"}) {
        const RelationReport& rep = by_id(reps, id);
        EXPECT_EQ(rep.status, Status::fail) << id;
        ASSERT_TRUE(rep.alternate_residual.has_value()) << id;
        EXPECT_LT(*rep.alternate_residual, rep.tolerance) << id;
    }
}

TEST(CurvatureRelations, HorizontalGaussEquationNeedsMinusSign) {
    const CatalogEntry e = hopf_fiber_entry();
    const auto pts = sample_points(e, 5, default_seed);
    const auto reps = verify_curv_relations(e.ws, e.fiber_charts, {pts, 4, default_seed});
    const RelationReport& printed = by_id(reps, "curv-phi-08");
    EXPECT_EQ(printed.status, Status::fail);
    ASSERT_TRUE(printed.alternate_residual.has_value());
    EXPECT_LT(*printed.alternate_residual, printed.tolerance);
    EXPECT_EQ(by_id(reps, "curv-phi-06").status, Status::pass);
}

TEST(CurvatureRelations, NonClairautInputIsRejected) {
    const CatalogEntry e = non_clairaut_control_entry();
    const auto pts = sample_points(e, 3, default_seed);
    const SampleSettings s{pts, 2, default_seed};
    EXPECT_THROW(verify_curv_relations(e.ws, e.fiber_charts, s), hypothesis_violation);
    EXPECT_THROW(verify_sec_relations(e.ws, e.fiber_charts, s), hypothesis_violation);
    EXPECT_THROW(verify_ric_relations(e.ws, e.fiber_charts, s), hypothesis_violation);
}

TEST(CurvatureRelations, MissingFiberChartSkips) {
    CatalogEntry e = r4_girth_entry();
    e.fiber_charts.second.reset();
    const auto pts = sample_points(e, 2, default_seed);
    const auto reps = verify_curv_relations(e.ws, e.fiber_charts, {pts, 2, default_seed});
    const RelationReport& r = by_id(reps, "curv-phi-02");
    EXPECT_EQ(r.status, Status::skip);
    EXPECT_NE(r.note.find("fiber chart"), std::string::npos);
}

TEST(SectionalRows, ProductGivesPlainZeros) {
    const CatalogEntry e = flat_product_entry();
    const auto pts = sample_points(e, 4, default_seed);
    for (const RelationReport& r : verify_sec_relations(e.ws, e.fiber_charts, {pts, 4, default_seed})) {
        if (r.status == Status::skip) {
            EXPECT_FALSE(r.note.empty());
            continue;
        }
        EXPECT_EQ(r.status, Status::pass) << r.relation_id;
    }
}

TEST(SectionalRows, GirthEntryRowsAndVacuousPlanes) {
    const CatalogEntry e = r4_girth_entry();
    const auto pts = sample_points(e, 6, default_seed);
    const auto reps = verify_sec_relations(e.ws, e.fiber_charts, {pts, 4, default_seed});
    ASSERT_EQ(reps.size(), 6u);
    EXPECT_EQ(reps[0].status, Status::skip);  // one-dimensional V1
    EXPECT_EQ(reps[1].status, Status::skip);  // one-dimensional V2
    for (int i = 2; i < 6; ++i) EXPECT_EQ(reps[i].status, Status::pass) << reps[i].relation_id;
}

TEST(RicciRows, GirthEntryRowsPassAndFirstRowSignIsRecorded) {
    const CatalogEntry e = r4_girth_entry();
    const auto pts = sample_points(e, 6, default_seed);
    const auto reps = verify_ric_relations(e.ws, e.fiber_charts, {pts, 4, default_seed});
    ASSERT_EQ(reps.size(), 4u);
    for (const auto& r : reps) EXPECT_EQ(r.status, Status::pass) << r.relation_id << " " << r.residual;
    EXPECT_NE(reps[0].note.find("sign"), std::string::npos);
    ASSERT_TRUE(reps[0].alternate_residual.has_value());
    EXPECT_GT(*reps[0].alternate_residual, 0.1);
}

TEST(Einstein, FlatSpaceHasZeroConstant) {
    const auto pts = box_points(4, 5, -1.0, 1.0, 1);
    const EinsteinResult r = einstein_residual(euclidean(4), pts);
    EXPECT_EQ(r.lambda, 0.0);
    EXPECT_LT(r.residual, 1e-8);
}

TEST(Einstein, RoundThreeSphereHasConstantTwo) {
    const auto pts = box_points(3, 5, -0.8, 0.8, 2);
    const EinsteinResult r = einstein_residual(charts::stereographic_sphere(3, 1.0), pts);
    EXPECT_NEAR(r.lambda, 2.0, 1e-8);
    EXPECT_LT(r.residual, 1e-8);
}

TEST(Einstein, GirthEntryIsNotEinstein) {
    const CatalogEntry e = r4_girth_entry();
    const auto pts = sample_points(e, 5, default_seed);
    EXPECT_GT(einstein_residual(e.ws.source.combined, pts).residual, 0.1);
}

TEST(ConformalFlatness, CriteriaAgree) {
    const auto pts = box_points(4, 4, -0.5, 0.5, 3);
    struct Case {
        MetricField m;
        bool flat;
    };
    const std::vector<Case> cases = {{euclidean(4), true}, {exp_conformal_r4(), true}, {sphere_product(), false}};
    for (const Case& c : cases) {
        const double k = kulkarni_flatness(c.m, pts, 8, 11);
        const double w = weyl_flatness(c.m, pts);
        EXPECT_EQ(k < analytic_tolerance, c.flat) << k;
        EXPECT_EQ(w < analytic_tolerance, c.flat) << w;
    }
    // S^2 x S^2: the mixed plane is flat, each factor plane has curvature 1
    const Vec p = vec({0.2, -0.1, 0.3, 0.4});
    const Mat g = sphere_product().metric_at(p);
    const Vec e1 = vec({1, 0, 0, 0}) / std::sqrt(g(0, 0)), e2 = vec({0, 1, 0, 0}) / std::sqrt(g(1, 1));
    const Vec e3 = vec({0, 0, 1, 0}) / std::sqrt(g(2, 2)), e4 = vec({0, 0, 0, 1}) / std::sqrt(g(3, 3));
    const Tensor4 r = riemann(sphere_product(), p);
    EXPECT_NEAR(sectional_from(r, g, e1, e2), 1.0, 1e-10);
    EXPECT_NEAR(sectional_from(r, g, e1, e3), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(sectional_from(r, g, e1, e2) + sectional_from(r, g, e3, e4) - sectional_from(r, g, e1, e4) -
                         sectional_from(r, g, e2, e3)),
                2.0, 1e-10);
}

TEST(ConformalFlatness, KulkarniNeedsFourDimensions) {
    const auto pts = box_points(3, 1, -0.5, 0.5, 4);
    EXPECT_THROW(kulkarni_flatness(euclidean(3), pts, 2), dimension_error);
}

TEST(Subharmonicity, PolarLogRadius) {
    const CatalogEntry e = polar_plane_entry();
    const auto pts = sample_points(e, 10, default_seed);
    const SubharmonicityReport rep = subharmonicity_indicator(e.ws, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(rep.values[i], 1.0 / (pts[i][0] * pts[i][0]), 1e-6);
    EXPECT_EQ(rep.sign, SignSummary::nonnegative);
}

TEST(Subharmonicity, ConstantAndLinearExponents) {
    CatalogEntry e = flat_product_entry();
    const auto pts = sample_points(e, 4, default_seed);
    for (double v : subharmonicity_indicator(e.ws, pts).values) EXPECT_EQ(v, 0.0);
    e.ws.psi = ScalarField{[](const Vec& x) { return x[0] + 2.0 * x[2]; }, [](const Vec&) { return vec({1, 0, 2, 0}); },
                           [](const Vec&) { return Mat(Mat::Zero(4, 4)); }};
    for (double v : subharmonicity_indicator(e.ws, pts).values) EXPECT_NEAR(v, 5.0, 1e-12);
}

TEST(Subharmonicity, CatalogOraclesMatch) {
    for (const CatalogEntry& e : catalog_entries()) {
        const auto pts = sample_points(e, 5, default_seed);
        const auto rep = subharmonicity_indicator(e.ws, pts);
        for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(rep.values[i], e.subharmonic_oracle(pts[i]), 1e-8) << e.name;
    }
}

TEST(DivergenceIdentity, HoldsOnFlatEntriesWithLogRadius) {
    for (const CatalogEntry& e : {hopf_fiber_entry(), polar_plane_entry()}) {
        const auto pts = sample_points(e, 5, default_seed);
        const RelationReport r = divergence_identity(e.ws, pts, 3);
        EXPECT_EQ(r.status, Status::pass) << e.name << " " << r.residual;
        EXPECT_EQ(r.tolerance, third_derivative_tolerance);
    }
}

TEST(DivergenceIdentity, ConstantExponentAndNonEinsteinSource) {
    const CatalogEntry flat = flat_product_entry();
    const auto flat_pts = sample_points(flat, 3, default_seed);
    const RelationReport trivial = divergence_identity(flat.ws, flat_pts, 2);
    EXPECT_EQ(trivial.status, Status::pass);
    EXPECT_LT(trivial.residual, 1e-12);

    const CatalogEntry r4 = r4_girth_entry();
    const auto pts = sample_points(r4, 3, default_seed);
    const RelationReport r = divergence_identity(r4.ws, pts, 2);
    EXPECT_EQ(r.status, Status::skip);
    EXPECT_NE(r.note.find("not Einstein"), std::string::npos);
}

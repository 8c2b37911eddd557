#include <wpsub/catalog.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace wpsub;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

SmoothMap euclidean_projection() { return charts::projection(euclidean(3), euclidean(2)); }

SmoothMap circle_map() { return r4_girth_entry().ws.phi1; }

SmoothMap hopf_map() { return hopf_fiber_entry().ws.phi2; }

// Distance from a fixed point of the plane: a Riemannian submersion R^2 -> R whose fibers are circles.
SmoothMap distance_from(const Vec& centre) {
    SmoothMap m;
    m.source = charts::guarded(euclidean(2), [centre](const Vec& x) { return (x - centre).norm(); });
    m.target = euclidean(1);
    m.value = [centre](const Vec& x) { return vec({(x - centre).norm()}); };
    m.jacobian = [centre](const Vec& x) { return Mat((x - centre).transpose() / (x - centre).norm()); };
    return m;
}

} // namespace

TEST(SplitFrame, EuclideanProjection) {
    const SubmersionFrame fr = split_frame(euclidean_projection(), vec({0.3, -1.0, 2.0}));
    ASSERT_EQ(fr.vertical.cols(), 1);
    ASSERT_EQ(fr.horizontal.cols(), 2);
    EXPECT_NEAR(std::abs(fr.vertical(2, 0)), 1.0, 1e-14);
    EXPECT_NEAR(fr.horizontal.row(2).norm(), 0.0, 1e-14);
}

TEST(SplitFrame, CircleFiberIsTangentToCircle) {
    const SubmersionFrame fr = split_frame(circle_map(), vec({1.0, 0.0, 0.0, 0.0}));
    ASSERT_EQ(fr.vertical.cols(), 1);
    EXPECT_NEAR(std::abs(fr.vertical(1, 0)), 1.0, 1e-12);
    const Mat gram = fr.horizontal.transpose() * fr.horizontal;
    EXPECT_LT((gram - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SplitFrame, GramIsIdentityOnCurvedSource) {
    const SmoothMap phi = hopf_map();
    const Vec u = vec({0.4, 0.5, 0.35});
    const SubmersionFrame fr = split_frame(phi, u);
    Mat all(3, 3);
    all << fr.vertical, fr.horizontal;
    const Mat gram = all.transpose() * phi.source.metric_at(u) * all;
    EXPECT_LT((gram - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((phi.jacobian_at(u) * fr.vertical).norm(), 1e-10);
}

TEST(SplitFrame, RankDeficientJacobianThrows) {
    SmoothMap diagonal;
    diagonal.source = euclidean(2);
    diagonal.target = euclidean(2);
    diagonal.value = [](const Vec& x) { return vec({x[0], x[0]}); };
    EXPECT_THROW(split_frame(diagonal, vec({1.0, 2.0})), not_a_submersion);
    EXPECT_THROW(projectors(diagonal, vec({1.0, 2.0})), not_a_submersion);
}

TEST(Projectors, ComplementaryAndIdempotent) {
    const SmoothMap phi = hopf_map();
    const Vec u = vec({0.4, 0.5, 0.35});
    const Projectors pr = projectors(phi, u);
    EXPECT_LT((pr.horizontal * pr.horizontal - pr.horizontal).norm(), 1e-10);
    EXPECT_LT((pr.horizontal + pr.vertical - Mat::Identity(3, 3)).norm(), 1e-14);
    const Mat g = phi.source.metric_at(u);
    // g-self-adjoint
    EXPECT_LT((g * pr.horizontal - pr.horizontal.transpose() * g).norm(), 1e-10);
}

TEST(RiemannianSubmersion, KnownSubmersionsPass) {
    const std::vector<Vec> flat = {vec({0.0, 0.0, 0.0}), vec({1.0, -2.0, 3.0})};
    EXPECT_LT(check_riemannian_submersion(euclidean_projection(), flat), 1e-14);
    const std::vector<Vec> ring = {vec({1.0, 0.0, 0.3, 0.0}), vec({1.7, 1.1, -0.5, 0.9})};
    EXPECT_LT(check_riemannian_submersion(circle_map(), ring), 1e-8);
    const std::vector<Vec> s3 = {vec({0.4, 0.5, 0.35}), vec({0.3, 0.6, 0.45})};
    EXPECT_LT(check_riemannian_submersion(hopf_map(), s3), 1e-8);
}

TEST(RiemannianSubmersion, ScaledTargetIsRejected) {
    SmoothMap phi = euclidean_projection();
    phi.target = diagonal_metric({ScalarField::constant(2, 2.0), ScalarField::constant(2, 2.0)});
    const std::vector<Vec> pts = {vec({0.5, 0.5, 0.5})};
    EXPECT_NEAR(check_riemannian_submersion(phi, pts), 1.0, 1e-12);
}

TEST(FiberReport, EuclideanProjectionFibersAreFlat) {
    const FiberReport rep = fiber_report(euclidean_projection(), vec({0.2, 0.1, -0.4}));
    EXPECT_LT(rep.mean_curvature.norm(), 1e-10);
    EXPECT_LT(rep.geodesic_residual, 1e-10);
    EXPECT_LT(rep.umbilical_residual, 1e-10);
}

TEST(FiberReport, CircleMeanCurvaturePointsToAxis) {
    const Vec p = vec({1.2, 0.9, 0.4, -0.7});
    const double r = std::hypot(p[0], p[1]);
    const FiberReport rep = fiber_report(circle_map(), p);
    // acceleration of the unit-speed fiber circle, by differences of its parametrization
    const double a0 = std::atan2(p[1], p[0]), h = 1e-3;
    auto curve = [&](double s) {
        Vec q = p;
        q[0] = r * std::cos(a0 + s / r);
        q[1] = r * std::sin(a0 + s / r);
        return q;
    };
    const Vec accel = (curve(h) - 2.0 * p + curve(-h)) / (h * h);
    EXPECT_LT((rep.mean_curvature - accel).norm(), 1e-5);
    EXPECT_NEAR(rep.mean_curvature.norm(), 1.0 / r, 1e-6);
    // H = -grad ln r
    const Vec grad_ln_r = vec({p[0] / (r * r), p[1] / (r * r), 0.0, 0.0});
    EXPECT_LT((rep.mean_curvature + grad_ln_r).norm(), 1e-6);
    EXPECT_LT(rep.umbilical_residual, 1e-8);
}

TEST(FiberReport, DistanceCirclesAreNotGeodesic) {
    const Vec centre = vec({-3.0, 0.0});
    const Vec p = vec({1.0, 0.5});
    const double rho = (p - centre).norm();
    const FiberReport rep = fiber_report(distance_from(centre), p);
    EXPECT_NEAR(rep.geodesic_residual, 1.0 / rho, 1e-6);
}

TEST(FiberReport, HopfFibersAreTotallyGeodesic) {
    const SmoothMap phi = hopf_map();
    for (const Vec& u : {vec({0.4, 0.5, 0.35}), vec({0.31, 0.58, 0.44})}) {
        const FiberReport rep = fiber_report(phi, u);
        EXPECT_LT(rep.geodesic_residual, 1e-5);
    }
}

TEST(OneillA, HopfIntegrabilityTensorHasUnitNorm) {
    // S^3(1) -> S^2(1/2): target sectional 4 = 1 + 3 |A_X Y|^2 for orthonormal horizontal X, Y
    const SmoothMap phi = hopf_map();
    const Vec u = vec({0.4, 0.5, 0.35});
    const SubmersionFrame fr = split_frame(phi, u);
    const Mat g = phi.source.metric_at(u);
    const Vec a = oneill_A(phi, u, fr.horizontal.col(0), fr.horizontal.col(1));
    EXPECT_NEAR(g_norm(g, a), 1.0, 1e-5);
    EXPECT_LT((fr.horizontal.transpose() * g * a).norm(), 1e-5);  // vertical
    const Vec aa = oneill_A(phi, u, fr.horizontal.col(0), fr.horizontal.col(0));
    EXPECT_LT(g_norm(g, aa), 1e-5);
}

TEST(OneillA, VanishesForProjection) {
    const SmoothMap phi = euclidean_projection();
    const Vec p = vec({0.1, 0.2, 0.3});
    EXPECT_LT(oneill_A(phi, p, vec({1, 0, 0}), vec({0, 1, 0})).norm(), 1e-10);
    EXPECT_LT(oneill_A(phi, p, vec({1, 0, 0}), vec({0, 0, 1})).norm(), 1e-10);
}

TEST(OneillT, CircleShapeOperatorIsSkew) {
    // g(T_U X, V) = -g(X, T_U V) for U, V vertical and X horizontal
    const SmoothMap phi = circle_map();
    const Vec p = vec({1.2, 0.9, 0.4, -0.7});
    const SubmersionFrame fr = split_frame(phi, p);
    const Vec U = fr.vertical.col(0);
    for (int k = 0; k < fr.horizontal.cols(); ++k) {
        const Vec X = fr.horizontal.col(k);
        EXPECT_NEAR(oneill_T(phi, p, U, X).dot(U), -X.dot(oneill_T(phi, p, U, U)), 1e-6);
    }
}

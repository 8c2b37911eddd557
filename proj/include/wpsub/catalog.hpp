#pragma once

#include "verifier.hpp"

#include <map>

namespace wpsub {

struct CatalogEntry {
    std::string name;
    WarpedSubmersion ws;
    FiberCharts fiber_charts;
    Box box;
    bool is_clairaut = true;
    std::string notes;
    // Closed form of Lap psi + |grad psi|^2, when known.
    std::function<double(const Vec&)> subharmonic_oracle;
    // Overrides of the default expectation (PASS when evaluable, SKIP when structurally impossible).
    std::map<std::string, Status> expected_overrides;
};

namespace charts {

inline double planar_radius(const Vec& x) { return std::hypot(x[0], x[1]); }

// d/dx of r = |(x0, x1)| embedded in n coordinates.
inline Vec radius_gradient(const Vec& x) {
    Vec d = Vec::Zero(x.size());
    const double r = planar_radius(x);
    d[0] = x[0] / r;
    d[1] = x[1] / r;
    return d;
}

inline Mat radius_hessian(const Vec& x) {
    Mat h = Mat::Zero(x.size(), x.size());
    const double r = planar_radius(x);
    const double r3 = r * r * r;
    h(0, 0) = x[1] * x[1] / r3;
    h(1, 1) = x[0] * x[0] / r3;
    h(0, 1) = h(1, 0) = -x[0] * x[1] / r3;
    return h;
}

// ln r in the first two coordinates, times `scale`.
inline ScalarField log_radius(double scale) {
    return {[scale](const Vec& x) { return scale * std::log(planar_radius(x)); },
            [scale](const Vec& x) {
                Vec d = Vec::Zero(x.size());
                const double r2 = x[0] * x[0] + x[1] * x[1];
                d[0] = scale * x[0] / r2;
                d[1] = scale * x[1] / r2;
                return d;
            },
            [scale](const Vec& x) {
                Mat h = Mat::Zero(x.size(), x.size());
                const double r2 = x[0] * x[0] + x[1] * x[1];
                const double r4 = r2 * r2;
                h(0, 0) = scale * (x[1] * x[1] - x[0] * x[0]) / r4;
                h(1, 1) = -h(0, 0);
                h(0, 1) = h(1, 0) = -2.0 * scale * x[0] * x[1] / r4;
                return h;
            }};
}

// Linear function x -> x[k].
inline ScalarField coordinate(int dim, int k) {
    return {[k](const Vec& x) { return x[k]; },
            [dim, k](const Vec&) {
                Vec d = Vec::Zero(dim);
                d[k] = 1.0;
                return d;
            },
            [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); }};
}

// ln x[k]
inline ScalarField log_coordinate(int dim, int k) {
    return {[k](const Vec& x) { return std::log(x[k]); },
            [dim, k](const Vec& x) {
                Vec d = Vec::Zero(dim);
                d[k] = 1.0 / x[k];
                return d;
            },
            [dim, k](const Vec& x) {
                Mat h = Mat::Zero(dim, dim);
                h(k, k) = -1.0 / (x[k] * x[k]);
                return h;
            }};
}

inline MetricField guarded(MetricField m, std::function<double(const Vec&)> boundary) {
    m.boundary_distance = std::move(boundary);
    return m;
}

// Round sphere of radius a in the stereographic chart from the north pole: 4 a^2 / (1 + |u|^2)^2 delta.
inline MetricField stereographic_sphere(int n, double a) {
    const double k = a * a;
    ScalarField conformal{[k](const Vec& u) { return 4.0 * k / std::pow(1.0 + u.squaredNorm(), 2); },
                          [k](const Vec& u) { return Vec(-16.0 * k * u / std::pow(1.0 + u.squaredNorm(), 3)); },
                          [k, n](const Vec& u) {
                              const double s = 1.0 + u.squaredNorm();
                              return Mat(k * (-16.0 * Mat::Identity(n, n) / std::pow(s, 3) +
                                              96.0 * u * u.transpose() / std::pow(s, 4)));
                          }};
    return conformally_flat(n, conformal);
}

// Inverse stereographic projection R^3 -> S^3 in R^4, and its Jacobian.
inline Vec s3_point(const Vec& u) {
    const double s = u.squaredNorm();
    Vec x(4);
    x << 2.0 * u / (s + 1.0), (s - 1.0) / (s + 1.0);
    return x;
}

inline Mat s3_point_jacobian(const Vec& u) {
    const double s = u.squaredNorm();
    Mat j(4, 3);
    j.topRows(3) = 2.0 * Mat::Identity(3, 3) / (s + 1.0) - 4.0 * u * u.transpose() / std::pow(s + 1.0, 2);
    j.row(3) = 4.0 * u.transpose() / std::pow(s + 1.0, 2);
    return j;
}

inline Vec s3_chart(const Vec& x) { return x.head(3) / (1.0 - x[3]); }

inline Mat s3_chart_jacobian(const Vec& x) {
    Mat j = Mat::Zero(3, 4);
    const double d = 1.0 - x[3];
    j.leftCols(3) = Mat::Identity(3, 3) / d;
    j.col(3) = x.head(3) / (d * d);
    return j;
}

// Hopf map onto the sphere of radius 1/2 in R^3.
inline Vec hopf(const Vec& x) {
    Vec p(3);
    p << x[0] * x[2] + x[1] * x[3], x[1] * x[2] - x[0] * x[3],
        0.5 * (x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3]);
    return p;
}

inline Mat hopf_jacobian(const Vec& x) {
    Mat j(3, 4);
    j << x[2], x[3], x[0], x[1],
         -x[3], x[2], x[1], -x[0],
         x[0], x[1], -x[2], -x[3];
    return j;
}

// Stereographic chart of the radius-1/2 sphere from its north pole.
inline Vec s2_chart(const Vec& p) { return p.head(2) / (0.5 - p[2]); }

inline Mat s2_chart_jacobian(const Vec& p) {
    Mat j = Mat::Zero(2, 3);
    const double d = 0.5 - p[2];
    j.leftCols(2) = Mat::Identity(2, 2) / d;
    j.col(2) = p.head(2) / (d * d);
    return j;
}

// Unit-circle action e^{it} on C^2 = R^4.
inline Vec hopf_rotate(const Vec& x, double t) {
    const double c = std::cos(t), s = std::sin(t);
    Vec y(4);
    y << c * x[0] - s * x[1], s * x[0] + c * x[1], c * x[2] - s * x[3], s * x[2] + c * x[3];
    return y;
}

inline Vec hopf_generator(const Vec& x) {
    Vec y(4);
    y << -x[1], x[0], -x[3], x[2];
    return y;
}

// Coordinate projection onto the first k coordinates.
inline SmoothMap projection(MetricField source, MetricField target) {
    const int n = source.dim, k = target.dim;
    SmoothMap m;
    m.source = std::move(source);
    m.target = std::move(target);
    m.value = [k](const Vec& x) { return Vec(x.head(k)); };
    m.jacobian = [n, k](const Vec&) { return Mat(Mat::Identity(k, n)); };
    return m;
}

// Fiber of a coordinate projection: the remaining coordinates.
inline FiberChart trailing_coordinates(int n, int k) {
    return {n - k, [k](const Vec& base, const Vec& u) {
                Vec q = base;
                q.tail(q.size() - k) += u;
                return q;
            },
            [n, k](const Vec&, const Vec&) {
                Mat j = Mat::Zero(n, n - k);
                j.bottomRows(n - k) = Mat::Identity(n - k, n - k);
                return j;
            }};
}

} // namespace charts

inline CatalogEntry flat_product_entry() {
    const WarpedProductSpace source = build_warped(euclidean(2), euclidean(2), ScalarField::constant(2, 1.0));
    const WarpedProductSpace target = build_warped(euclidean(2), euclidean(2), ScalarField::constant(2, 1.0));
    CatalogEntry e;
    e.name = "flat-product";
    e.ws = make_warped_submersion(source, target, charts::projection(euclidean(2), euclidean(2)),
                                  charts::projection(euclidean(2), euclidean(2)), ScalarField::constant(4, 0.0));
    e.box = {Vec::Constant(4, -1.0), Vec::Constant(4, 1.0)};
    e.notes = "R^2 x R^2 with unit warping, identity factors and zero girth exponent";
    e.subharmonic_oracle = [](const Vec&) { return 0.0; };
    return e;
}

namespace detail {

// R^4 x_r R^m2 -> R^3 x_rho R^2, phi1 = (r, x3, x4), phi2 the first two coordinates.
inline CatalogEntry r4_girth_family(std::string name, int m2, double psi_scale) {
    const auto radius_guard = [](const Vec& x) { return charts::planar_radius(x); };
    const MetricField m1 = charts::guarded(euclidean(4), radius_guard);
    const ScalarField f{[](const Vec& x) { return charts::planar_radius(x); }, charts::radius_gradient,
                        charts::radius_hessian};
    const MetricField n1 = charts::guarded(euclidean(3), [](const Vec& z) { return z[0]; });
    const WarpedProductSpace source = build_warped(m1, euclidean(m2), f);
    const WarpedProductSpace target = build_warped(n1, euclidean(2), charts::coordinate(3, 0));

    SmoothMap phi1;
    phi1.source = m1;
    phi1.target = n1;
    phi1.value = [](const Vec& x) {
        Vec y(3);
        y << charts::planar_radius(x), x[2], x[3];
        return y;
    };
    phi1.jacobian = [](const Vec& x) {
        const double r = charts::planar_radius(x);
        Mat j = Mat::Zero(3, 4);
        j(0, 0) = x[0] / r;
        j(0, 1) = x[1] / r;
        j(1, 2) = 1.0;
        j(2, 3) = 1.0;
        return j;
    };

    // ln r on the combined coordinates: only the first two enter
    const ScalarField psi = charts::log_radius(psi_scale);
    const int total = 4 + m2;
    ScalarField psi_combined{psi.value, [psi, total](const Vec& p) {
                                 Vec d = Vec::Zero(total);
                                 d.head(4) = psi.grad(p.head(4));
                                 return d;
                             },
                             [psi, total](const Vec& p) {
                                 Mat h = Mat::Zero(total, total);
                                 h.topLeftCorner(4, 4) = psi.hess(p.head(4));
                                 return h;
                             }};

    CatalogEntry e;
    e.name = std::move(name);
    e.ws = make_warped_submersion(source, target, phi1, charts::projection(euclidean(m2), euclidean(2)), psi_combined);
    // circle of radius r around the x3-x4 plane
    e.fiber_charts.first = FiberChart{1,
                                      [](const Vec& base, const Vec& u) {
                                          const double r = charts::planar_radius(base);
                                          const double a = std::atan2(base[1], base[0]) + u[0];
                                          Vec q = base;
                                          q[0] = r * std::cos(a);
                                          q[1] = r * std::sin(a);
                                          return q;
                                      },
                                      [](const Vec& base, const Vec& u) {
                                          const double r = charts::planar_radius(base);
                                          const double a = std::atan2(base[1], base[0]) + u[0];
                                          Mat j = Mat::Zero(4, 1);
                                          j(0, 0) = -r * std::sin(a);
                                          j(1, 0) = r * std::cos(a);
                                          return j;
                                      }};
    e.fiber_charts.second = charts::trailing_coordinates(m2, 2);
    Vec lo = Vec::Constant(total, -1.0), hi = Vec::Constant(total, 1.0);
    lo[0] = 1.5;
    hi[0] = 2.2;
    lo[1] = 0.8;
    hi[1] = 1.4;
    e.box = {lo, hi};
    // Lap psi = m2 scale / r^2 since ln r is harmonic in the plane; |grad psi|^2 = scale^2 / r^2
    e.subharmonic_oracle = [m2, psi_scale](const Vec& p) {
        const double r = charts::planar_radius(p);
        return (m2 * psi_scale + psi_scale * psi_scale) / (r * r);
    };
    e.expected_overrides = {{"einstein", Status::fail},
                            {"kulkarni", Status::fail},
                            {"weyl", Status::fail},
                            {"divergence-identity", Status::skip},
                            {"harmonic-tension", Status::fail},
                            {"hlaplacian", Status::fail}};
    return e;
}

} // namespace detail

inline CatalogEntry r4_girth_entry() {
    CatalogEntry e = detail::r4_girth_family("r4-girth", 3, 1.0);
    e.notes = "R^4 x_r R^3 -> R^3 x_rho R^2 with phi1 = (r, x3, x4); circle and line fiber charts";
    return e;
}

// Same construction with two-dimensional flat fibers on the second factor, so that
// the relations involving two independent V2 directions are exercised.
inline CatalogEntry r4_girth_k2_entry() {
    CatalogEntry e = detail::r4_girth_family("r4-girth-k2", 4, 1.0);
    e.notes = "R^4 x_r R^4 -> R^3 x_rho R^2; plane fibers on the second factor";
    e.expected_overrides.insert({{"curv-phi-02", Status::fail}, {"sec-phi-2", Status::fail}, {"ric-phi-2", Status::fail}});
    return e;
}

inline CatalogEntry non_clairaut_control_entry() {
    CatalogEntry e = detail::r4_girth_family("non-clairaut-control", 3, 2.0);
    e.is_clairaut = false;
    e.notes = "r4-girth with the girth exponent doubled";
    e.expected_overrides["clairaut-ii"] = Status::fail;
    e.expected_overrides["clairaut-law"] = Status::fail;
    // Clairaut corollaries are not asserted here
    e.expected_overrides["harmonic-tension"] = Status::skip;
    e.expected_overrides["hlaplacian"] = Status::skip;
    e.expected_overrides["harmonic-characterization"] = Status::skip;
    return e;
}

inline CatalogEntry polar_plane_entry() {
    const auto radius_guard = [](const Vec& x) { return x[0]; };
    const MetricField line = charts::guarded(euclidean(1), radius_guard);
    const ScalarField r = charts::coordinate(1, 0);
    const WarpedProductSpace source = build_warped(line, euclidean(1), r);
    const WarpedProductSpace target = build_warped(line, euclidean(1), r);
    CatalogEntry e;
    e.name = "polar-plane";
    e.ws = make_warped_submersion(source, target, charts::projection(line, line),
                                  charts::projection(euclidean(1), euclidean(1)), charts::log_coordinate(2, 0));
    Vec lo(2), hi(2);
    lo << 2.0, -1.0;
    hi << 3.0, 1.0;
    e.box = {lo, hi};
    e.notes = "flat plane as R+ x_r R (polar angle unwrapped), identity factors";
    e.subharmonic_oracle = [](const Vec& p) { return 1.0 / (p[0] * p[0]); };
    e.expected_overrides = {{"kulkarni", Status::skip},
                            {"weyl", Status::skip},
                            {"kulkarni-weyl-agreement", Status::skip},
                            {"hlaplacian", Status::fail}};
    return e;
}

inline CatalogEntry hopf_fiber_entry() {
    const auto radius_guard = [](const Vec& x) { return x[0]; };
    const MetricField line = charts::guarded(euclidean(1), radius_guard);
    const ScalarField r = charts::coordinate(1, 0);
    const MetricField s3 = charts::stereographic_sphere(3, 1.0);
    const MetricField s2 = charts::stereographic_sphere(2, 0.5);
    const WarpedProductSpace source = build_warped(line, s3, r);
    const WarpedProductSpace target = build_warped(line, s2, r);

    SmoothMap phi2;
    phi2.source = s3;
    phi2.target = s2;
    phi2.value = [](const Vec& u) { return charts::s2_chart(charts::hopf(charts::s3_point(u))); };
    phi2.jacobian = [](const Vec& u) {
        const Vec x = charts::s3_point(u);
        return Mat(charts::s2_chart_jacobian(charts::hopf(x)) * charts::hopf_jacobian(x) *
                   charts::s3_point_jacobian(u));
    };

    CatalogEntry e;
    e.name = "hopf-fiber";
    e.ws = make_warped_submersion(source, target, charts::projection(line, line), phi2, charts::log_coordinate(4, 0));
    e.fiber_charts.second = FiberChart{1,
                                       [](const Vec& base, const Vec& t) {
                                           return charts::s3_chart(charts::hopf_rotate(charts::s3_point(base), t[0]));
                                       },
                                       [](const Vec& base, const Vec& t) {
                                           const Vec x = charts::hopf_rotate(charts::s3_point(base), t[0]);
                                           return Mat(charts::s3_chart_jacobian(x) * charts::hopf_generator(x));
                                       }};
    Vec lo(4), hi(4);
    lo << 2.0, 0.3, 0.3, 0.3;
    hi << 3.0, 0.6, 0.6, 0.6;
    e.box = {lo, hi};
    e.notes = "R+ x_r S^3 -> R+ x_r S^2(1/2) through the Hopf map; flat R^4 in polar form";
    e.subharmonic_oracle = [](const Vec& p) { return 3.0 / (p[0] * p[0]); };
    e.expected_overrides = {
        {"curv-phi-08", Status::fail}, {"harmonic-tension", Status::fail}, {"hlaplacian", Status::fail}};
    return e;
}

inline std::vector<CatalogEntry> catalog_entries() {
    return {flat_product_entry(), r4_girth_entry(), r4_girth_k2_entry(), polar_plane_entry(), hopf_fiber_entry(),
            non_clairaut_control_entry()};
}

inline std::optional<CatalogEntry> find_entry(std::string_view name) {
    for (CatalogEntry& e : catalog_entries())
        if (e.name == name) return std::move(e);
    return std::nullopt;
}

// Deterministic sample points inside the entry's box.
inline std::vector<Vec> sample_points(const CatalogEntry& e, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pts.push_back(rng.point_in(e.box, e.ws.source.combined));
    return pts;
}

} // namespace wpsub

#pragma once

#include "geometry.hpp"
#include "residual.hpp"
#include "sampling.hpp"

#include <limits>
#include <span>

namespace wpsub {

// Offsets of the two factors inside combined coordinates (x1 || x2).
struct BlockLayout {
    int m1 = 0;
    int m2 = 0;

    int total() const { return m1 + m2; }
    Vec first(const Vec& v) const { return v.head(m1); }
    Vec second(const Vec& v) const { return v.tail(m2); }
    Vec lift_first(const Vec& v1) const {
        Vec v = Vec::Zero(total());
        v.head(m1) = v1;
        return v;
    }
    Vec lift_second(const Vec& v2) const {
        Vec v = Vec::Zero(total());
        v.tail(m2) = v2;
        return v;
    }
    Vec join(const Vec& x1, const Vec& x2) const {
        Vec v(total());
        v << x1, x2;
        return v;
    }
    Mat lift_first_columns(const Mat& c) const {
        Mat out = Mat::Zero(total(), c.cols());
        out.topRows(m1) = c;
        return out;
    }
    Mat lift_second_columns(const Mat& c) const {
        Mat out = Mat::Zero(total(), c.cols());
        out.bottomRows(m2) = c;
        return out;
    }
};

struct WarpedProductSpace {
    MetricField m1;
    MetricField m2;
    ScalarField f;  // on m1, strictly positive
    MetricField combined;
    BlockLayout layout;

    double warp(const Vec& p) const { return f.value(layout.first(p)); }
};

inline WarpedProductSpace build_warped(MetricField m1, MetricField m2, ScalarField f) {
    WarpedProductSpace w{std::move(m1), std::move(m2), std::move(f), {}, {}};
    const BlockLayout L{w.m1.dim, w.m2.dim};
    w.layout = L;
    MetricField& c = w.combined;
    c.dim = L.total();
    const MetricField g1 = w.m1, g2 = w.m2;
    const ScalarField warp = w.f;

    auto checked_warp = [warp](const Vec& x1) {
        const double v = warp.value(x1);
        if (!(v > 0.0)) throw invalid_warping("warping function is not positive");
        return v;
    };

    // A nonpositive warping is reported by the metric evaluators, not treated as a chart edge.
    c.boundary_distance = [g1, g2, L](const Vec& p) {
        double d = std::numeric_limits<double>::infinity();
        if (g1.boundary_distance) d = std::min(d, g1.boundary_distance(L.first(p)));
        if (g2.boundary_distance) d = std::min(d, g2.boundary_distance(L.second(p)));
        return d;
    };
    c.metric = [g1, g2, checked_warp, L](const Vec& p) {
        const double fv = checked_warp(L.first(p));
        Mat g = Mat::Zero(L.total(), L.total());
        g.topLeftCorner(L.m1, L.m1) = g1.metric(L.first(p));
        g.bottomRightCorner(L.m2, L.m2) = fv * fv * g2.metric(L.second(p));
        return g;
    };

    if (g1.d_metric && g2.d_metric && warp.grad) {
        c.d_metric = [g1, g2, warp, checked_warp, L](const Vec& p) {
            const Vec x1 = L.first(p), x2 = L.second(p);
            const double fv = checked_warp(x1);
            const double F = fv * fv;
            const Vec dF = 2.0 * fv * warp.grad(x1);
            const Tensor3 d1 = g1.d_metric(x1), d2 = g2.d_metric(x2);
            const Mat h2 = g2.metric(x2);
            Tensor3 d(L.total());
            for (int k = 0; k < L.m1; ++k)
                for (int i = 0; i < L.m1; ++i)
                    for (int j = 0; j < L.m1; ++j) d(k, i, j) = d1(k, i, j);
            for (int i = 0; i < L.m2; ++i)
                for (int j = 0; j < L.m2; ++j) {
                    for (int k = 0; k < L.m1; ++k) d(k, L.m1 + i, L.m1 + j) = dF[k] * h2(i, j);
                    for (int k = 0; k < L.m2; ++k) d(L.m1 + k, L.m1 + i, L.m1 + j) = F * d2(k, i, j);
                }
            return d;
        };
    }
    if (g1.has_second_derivatives() && g2.has_second_derivatives() && warp.grad && warp.hess) {
        c.dd_metric = [g1, g2, warp, checked_warp, L](const Vec& p) {
            const Vec x1 = L.first(p), x2 = L.second(p);
            const double fv = checked_warp(x1);
            const double F = fv * fv;
            const Vec df = warp.grad(x1);
            const Vec dF = 2.0 * fv * df;
            const Mat ddF = 2.0 * (df * df.transpose() + fv * warp.hess(x1));
            const Tensor4 dd1 = g1.dd_metric(x1), dd2 = g2.dd_metric(x2);
            const Tensor3 d2 = g2.d_metric(x2);
            const Mat h2 = g2.metric(x2);
            Tensor4 dd(L.total());
            for (int l = 0; l < L.m1; ++l)
                for (int k = 0; k < L.m1; ++k)
                    for (int i = 0; i < L.m1; ++i)
                        for (int j = 0; j < L.m1; ++j) dd(l, k, i, j) = dd1(l, k, i, j);
            const int o = L.m1;
            for (int i = 0; i < L.m2; ++i)
                for (int j = 0; j < L.m2; ++j) {
                    for (int l = 0; l < L.m1; ++l)
                        for (int k = 0; k < L.m1; ++k) dd(l, k, o + i, o + j) = ddF(l, k) * h2(i, j);
                    for (int l = 0; l < L.m1; ++l)
                        for (int k = 0; k < L.m2; ++k) {
                            dd(l, o + k, o + i, o + j) = dF[l] * d2(k, i, j);
                            dd(o + k, l, o + i, o + j) = dF[l] * d2(k, i, j);
                        }
                    for (int l = 0; l < L.m2; ++l)
                        for (int k = 0; k < L.m2; ++k) dd(o + l, o + k, o + i, o + j) = F * dd2(l, k, i, j);
                }
            return dd;
        };
    }
    return w;
}

// Vector R(X,Y)Z from the lowered tensor.
inline Vec curvature_vector(const Tensor4& r, const Mat& g_inv, const Vec& x, const Vec& y, const Vec& z) {
    const int n = r.dim();
    Vec lowered(n);
    for (int l = 0; l < n; ++l) {
        Vec e = Vec::Zero(n);
        e[l] = 1.0;
        lowered[l] = r.apply(x, y, z, e);
    }
    return g_inv * lowered;
}

struct WarpedSampling {
    std::span<const Vec> points;
    int vectors_per_point = 8;
    std::uint64_t seed = default_seed;
};

namespace detail {

inline double vec_residual(const Mat& g, const Vec& lhs, std::initializer_list<Vec> rhs_terms) {
    Vec rhs = Vec::Zero(lhs.size());
    double scale = g_norm(g, lhs);
    for (const Vec& t : rhs_terms) {
        rhs += t;
        scale = std::max(scale, g_norm(g, t));
    }
    const double diff = g_norm(g, lhs - rhs);
    return scale < relative_floor ? diff : diff / scale;
}

} // namespace detail

// Connection of a warped product against factor data, clauses (i)-(iv).
inline std::vector<RelationReport> check_wp_connection(const WarpedProductSpace& w, const WarpedSampling& s) {
    const BlockLayout& L = w.layout;
    const Tier tier = tier_of(w.combined.has_first_derivatives() && w.m1.has_first_derivatives() &&
                              w.m2.has_first_derivatives() && w.f.has_grad());
    Rng rng(s.seed);
    ResidualMax c1, c2, c3, c4;
    for (const Vec& p : s.points) {
        const Vec x1 = L.first(p), x2 = L.second(p);
        const Mat g = w.combined.metric_at(p);
        const Mat g1 = w.m1.metric_at(x1), g2 = w.m2.metric_at(x2);
        const Tensor3 gamma = christoffel(w.combined, p);
        const Tensor3 gamma1 = christoffel(w.m1, x1);
        const Tensor3 gamma2 = christoffel(w.m2, x2);
        const double fv = w.f.value(x1);
        const Vec df = differential(w.m1, w.f, x1);
        const Vec grad_ln_f = L.lift_first(inverse_metric(g1) * df / fv);
        for (int t = 0; t < s.vectors_per_point; ++t) {
            const Vec e1 = L.lift_first(rng.unit_vector(g1)), f1 = L.lift_first(rng.unit_vector(g1));
            const Vec e2 = L.lift_second(rng.unit_vector(g2) / fv), f2 = L.lift_second(rng.unit_vector(g2) / fv);
            c1.add(detail::vec_residual(g, gamma.contract(e1, f1), {L.lift_first(gamma1.contract(L.first(e1), L.first(f1)))}), p);
            const Vec expected2 = (df.dot(L.first(e1)) / fv) * e2;
            c2.add(std::max(detail::vec_residual(g, gamma.contract(e1, e2), {expected2}),
                            detail::vec_residual(g, gamma.contract(e2, e1), {expected2})),
                   p);
            const Vec cov22 = gamma.contract(e2, f2);
            const Vec normal_part = L.lift_first(L.first(cov22));
            const Vec tangent_part = L.lift_second(L.second(cov22));
            c3.add(detail::vec_residual(g, normal_part, {Vec(-e2.dot(g * f2) * grad_ln_f)}), p);
            c4.add(detail::vec_residual(g, tangent_part, {L.lift_second(gamma2.contract(L.second(e2), L.second(f2)))}), p);
        }
    }
    return {make_report("wp-connection-i", c1, tier), make_report("wp-connection-ii", c2, tier),
            make_report("wp-connection-iii", c3, tier), make_report("wp-connection-iv", c4, tier)};
}

// Curvature of a warped product against factor data, clauses (i)-(v).
inline std::vector<RelationReport> check_wp_curvature(const WarpedProductSpace& w, const WarpedSampling& s) {
    const BlockLayout& L = w.layout;
    const Tier tier = tier_of(w.combined.has_second_derivatives() && w.m1.has_second_derivatives() &&
                              w.m2.has_second_derivatives() && w.f.has_grad() && w.f.has_hess());
    Rng rng(s.seed);
    ResidualMax c1, c2, c3, c4, c5;
    for (const Vec& p : s.points) {
        const Vec x1 = L.first(p), x2 = L.second(p);
        const Mat g = w.combined.metric_at(p);
        const Mat g_inv = inverse_metric(g);
        const Mat g1 = w.m1.metric_at(x1), g2 = w.m2.metric_at(x2);
        const Mat g1_inv = inverse_metric(g1), g2_inv = inverse_metric(g2);
        const Tensor4 r = riemann(w.combined, p);
        const Tensor4 r1 = riemann(w.m1, x1);
        const Tensor4 r2 = riemann(w.m2, x2);
        const double fv = w.f.value(x1);
        const Vec df = differential(w.m1, w.f, x1);
        const Mat hess_f = hessian(w.m1, w.f, x1);
        const double grad_f_sq = df.dot(g1_inv * df);
        for (int t = 0; t < s.vectors_per_point; ++t) {
            const Vec e1 = L.lift_first(rng.unit_vector(g1)), f1 = L.lift_first(rng.unit_vector(g1)),
                      g1v = L.lift_first(rng.unit_vector(g1));
            const Vec e2 = L.lift_second(rng.unit_vector(g2) / fv), f2 = L.lift_second(rng.unit_vector(g2) / fv),
                      g2v = L.lift_second(rng.unit_vector(g2) / fv);
            const Vec a1 = L.first(e1), b1 = L.first(f1), c1v = L.first(g1v);
            const Vec a2 = L.second(e2), b2 = L.second(f2), c2v = L.second(g2v);

            c1.add(detail::vec_residual(g, curvature_vector(r, g_inv, e1, f1, g1v),
                                        {L.lift_first(curvature_vector(r1, g1_inv, a1, b1, c1v))}),
                   p);
            c2.add(detail::vec_residual(g, curvature_vector(r, g_inv, e1, f2, f1),
                                        {Vec(a1.dot(hess_f * b1) / fv * f2)}),
                   p);
            const double zero = std::max(g_norm(g, curvature_vector(r, g_inv, e1, f1, f2)),
                                         g_norm(g, curvature_vector(r, g_inv, f2, g2v, e1)));
            c3.add(zero, p);
            const Vec nabla_grad_f = L.lift_first(g1_inv * hess_f * a1);
            c4.add(detail::vec_residual(g, curvature_vector(r, g_inv, e1, f2, g2v),
                                        {Vec(-f2.dot(g * g2v) / fv * nabla_grad_f)}),
                   p);
            const Vec warp_term = grad_f_sq / (fv * fv) * (e2.dot(g * g2v) * f2 - f2.dot(g * g2v) * e2);
            c5.add(detail::vec_residual(g, curvature_vector(r, g_inv, e2, f2, g2v),
                                        {L.lift_second(curvature_vector(r2, g2_inv, a2, b2, c2v)), warp_term}),
                   p);
        }
    }
    return {make_report("wp-curvature-i", c1, tier), make_report("wp-curvature-ii", c2, tier),
            make_report("wp-curvature-iii", c3, tier), make_report("wp-curvature-iv", c4, tier),
            make_report("wp-curvature-v", c5, tier)};
}

} // namespace wpsub

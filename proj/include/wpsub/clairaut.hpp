#pragma once

#include "geodesic.hpp"
#include "warped_submersion.hpp"

#include <optional>

namespace wpsub {

// sin of the angle between v and the horizontal space: |V v| / |v|. Empty when |v| < 1e-12.
inline std::optional<double> sin_omega(const WarpedSubmersion& ws, const Vec& p, const Vec& v) {
    const Mat g = ws.source.combined.metric_at(p);
    const double speed = g_norm(g, v);
    if (speed < 1e-12) return std::nullopt;
    return g_norm(g, joint_vertical_projector(ws, p) * v) / speed;
}

inline std::optional<double> clairaut_value(const WarpedSubmersion& ws, const Vec& p, const Vec& v) {
    const auto s = sin_omega(ws, p, v);
    if (!s) return std::nullopt;
    return std::exp(ws.psi.value(p)) * *s;
}

struct ClairautStats {
    std::vector<double> values;
    double max_drift = 0.0;  // relative to the initial value, absolute when that is below 1e-12
    int invalid_steps = 0;
};

inline ClairautStats clairaut_trace(const WarpedSubmersion& ws, const GeodesicTrace& trace) {
    ClairautStats stats;
    stats.values.reserve(trace.size());
    std::optional<double> first;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto value = clairaut_value(ws, trace.points[k], trace.velocities[k]);
        if (!value) {
            ++stats.invalid_steps;
            stats.values.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        stats.values.push_back(*value);
        if (!first) first = *value;
        const double diff = std::abs(*value - *first);
        stats.max_drift = std::max(stats.max_drift, *first > 1e-12 ? diff / *first : diff);
    }
    return stats;
}

struct ClairautConditions {
    RelationReport gradient_horizontal;    // (i)
    RelationReport umbilical_first_fibers; // (ii)
    RelationReport geodesic_second_fibers; // (iii)

    bool all_pass() const {
        return gradient_horizontal.status == Status::pass && umbilical_first_fibers.status == Status::pass &&
               geodesic_second_fibers.status == Status::pass;
    }
};

inline Tier gradient_tier(const WarpedSubmersion& ws) {
    return tier_of(ws.psi.has_grad() && static_cast<bool>(ws.phi1.jacobian) && static_cast<bool>(ws.phi2.jacobian));
}

inline ClairautConditions check_clairaut_conditions(const WarpedSubmersion& ws, std::span<const Vec> samples) {
    const BlockLayout& L = ws.layout();
    const MetricField& M = ws.source.combined;
    ResidualMax horizontal, umbilical, totally_geodesic;
    for (const Vec& p : samples) {
        const Mat g = M.metric_at(p);
        const Vec grad_psi = gradient(M, ws.psi, p);
        horizontal.add(g_norm(g, joint_vertical_projector(ws, p) * grad_psi), p);

        const Vec x1 = L.first(p), x2 = L.second(p);
        const Mat g1 = ws.source.m1.metric_at(x1);
        const Vec psi_first = L.first(grad_psi);
        const Vec grad_ln_f = gradient(ws.source.m1, ws.source.f, x1) / ws.source.f.value(x1);
        double worst = relative_residual(g_norm(g1, psi_first - grad_ln_f), {g_norm(g1, psi_first), g_norm(g1, grad_ln_f)});
        const SubmersionFrame s1 = split_frame(ws.phi1, x1);
        for (int a = 0; a < s1.vertical.cols(); ++a)
            for (int b = 0; b < s1.vertical.cols(); ++b) {
                const Vec t = oneill_T(ws.phi1, x1, s1.vertical.col(a), s1.vertical.col(b));
                const Vec expected = (a == b ? -1.0 : 0.0) * psi_first;
                worst = std::max(worst, relative_residual(g_norm(g1, t - expected), {g_norm(g1, t), g_norm(g1, expected)}));
            }
        umbilical.add(worst, p);

        const Mat g2 = ws.source.m2.metric_at(x2);
        const SubmersionFrame s2 = split_frame(ws.phi2, x2);
        double t2 = 0.0;
        for (int a = 0; a < s2.vertical.cols(); ++a)
            for (int b = 0; b < s2.vertical.cols(); ++b)
                t2 = std::max(t2, g_norm(g2, oneill_T(ws.phi2, x2, s2.vertical.col(a), s2.vertical.col(b))));
        totally_geodesic.add(t2, p);
    }
    return {make_report("clairaut-i", horizontal, gradient_tier(ws)),
            make_report("clairaut-ii", umbilical, Tier::finite_difference),
            make_report("clairaut-iii", totally_geodesic, Tier::finite_difference)};
}

struct GeodesicConditionResidual {
    double horizontal = 0.0;
    double vertical = 0.0;
};

inline constexpr double geodesic_condition_tolerance = 1e-3;

// Evaluates the horizontal and vertical parts of the geodesic equation split along the four blocks.
// Derivatives of the block components along the curve use central differences between trace
// steps; every `stride`-th interior step is evaluated.
inline GeodesicConditionResidual check_geodesic_condition(const WarpedSubmersion& ws, const GeodesicTrace& trace,
                                                          int stride = 25) {
    const BlockLayout& L = ws.layout();
    const MetricField& M = ws.source.combined;
    GeodesicConditionResidual out;
    if (trace.size() < 3) return out;
    struct Parts {
        Vec x1, u1, x2, u2;  // factor coordinates
    };
    auto split = [&](std::size_t k) {
        const Vec& p = trace.points[k];
        const Vec& v = trace.velocities[k];
        const Projectors p1 = projectors(ws.phi1, L.first(p));
        const Projectors p2 = projectors(ws.phi2, L.second(p));
        const Vec a = L.first(v), b = L.second(v);
        return Parts{p1.horizontal * a, p1.vertical * a, p2.horizontal * b, p2.vertical * b};
    };
    for (std::size_t k = 1; k + 1 < trace.size(); k += static_cast<std::size_t>(std::max(1, stride))) {
        const Vec& p = trace.points[k];
        const Vec y1 = L.first(p), y2 = L.second(p);
        const double dt = trace.times[k + 1] - trace.times[k - 1];
        const Parts now = split(k), before = split(k - 1), after = split(k + 1);
        const Projectors p1 = projectors(ws.phi1, y1);
        const Projectors p2 = projectors(ws.phi2, y2);
        const Tensor3 gamma1 = christoffel(ws.source.m1, y1);
        const Tensor3 gamma2 = christoffel(ws.source.m2, y2);
        const Vec alpha_dot = now.x1 + now.u1, beta_dot = now.x2 + now.u2;
        // covariant derivatives along the factor curves
        const Vec dx1 = (after.x1 - before.x1) / dt + gamma1.contract(alpha_dot, now.x1);
        const Vec du1 = (after.u1 - before.u1) / dt + gamma1.contract(alpha_dot, now.u1);
        const Vec dx2 = (after.x2 - before.x2) / dt + gamma2.contract(beta_dot, now.x2);
        const Vec du2 = (after.u2 - before.u2) / dt + gamma2.contract(beta_dot, now.u2);

        const double f = ws.source.f.value(y1);
        const Vec df = differential(ws.source.m1, ws.source.f, y1);
        const double x1f = df.dot(now.x1) / f, u1f = df.dot(now.u1) / f;
        const Mat g = M.metric_at(p);
        const Vec grad_ln_f = L.lift_first(gradient(ws.source.m1, ws.source.f, y1) / f);
        const Mat pv = joint_vertical_projector(ws, p);
        const Vec h_grad_ln_f = grad_ln_f - pv * grad_ln_f;
        const Vec X2 = L.lift_second(now.x2), U2 = L.lift_second(now.u2);

        const Vec horizontal = L.lift_first(p1.horizontal * dx1 + oneill_A(ws.phi1, y1, now.x1, now.u1) +
                                            oneill_T(ws.phi1, y1, now.u1, now.u1)) +
                               L.lift_second(p2.horizontal * dx2 + oneill_A(ws.phi2, y2, now.x2, now.u2) +
                                             oneill_T(ws.phi2, y2, now.u2, now.u2)) +
                               2.0 * x1f * X2 + 2.0 * u1f * X2 - (U2.dot(g * U2) + X2.dot(g * X2)) * h_grad_ln_f;
        const Vec vertical = L.lift_first(p1.vertical * du1 + oneill_T(ws.phi1, y1, now.u1, now.x1)) +
                             L.lift_second(p2.vertical * du2 + oneill_T(ws.phi2, y2, now.u2, now.x2)) +
                             2.0 * x1f * U2 + 2.0 * u1f * U2;
        out.horizontal = std::max(out.horizontal, g_norm(g, horizontal));
        out.vertical = std::max(out.vertical, g_norm(g, vertical));
    }
    return out;
}

// ---- harmonicity ---------------------------------------------------------

// tau^c = g^{ij} (d_i d_j phi^c - Gamma^k_ij d_k phi^c + Gamma'^c_ab d_i phi^a d_j phi^b), in target coordinates.
inline Vec tension_field(const SmoothMap& phi, const Vec& p) {
    const int m = phi.source.dim, n = phi.target.dim;
    const Mat g_inv = inverse_metric(phi.source.metric_at(p));
    const Mat j = phi.jacobian_at(p);
    const Tensor3 gamma = christoffel(phi.source, p);
    const Tensor3 gamma_t = christoffel(phi.target, phi.value(p));
    std::vector<Mat> dj(static_cast<std::size_t>(m));  // dj[i](c, k) = d_i d_k phi^c
    auto jac = [&](const Vec& q) { return phi.jacobian_at(q); };
    for (int i = 0; i < m; ++i) {
        const double h = fd::step(fd::first_order, p[i]);
        Vec plus = p, minus = p;
        plus[i] += h;
        minus[i] -= h;
        dj[static_cast<std::size_t>(i)] = (jac(plus) - jac(minus)) / (2.0 * h);
    }
    Vec tau = Vec::Zero(n);
    for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) {
                if (g_inv(i, k) == 0.0) continue;
                double term = 0.5 * (dj[static_cast<std::size_t>(i)](c, k) + dj[static_cast<std::size_t>(k)](c, i));
                for (int l = 0; l < m; ++l) term -= gamma(l, i, k) * j(c, l);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) term += gamma_t(c, a, b) * j(a, i) * j(b, k);
                s += g_inv(i, k) * term;
            }
        tau[c] = s;
    }
    return tau;
}

inline Vec tension_field(const WarpedSubmersion& ws, const Vec& p) { return tension_field(ws.joint, p); }

// phi_*(sign * ((m1 - n1) + (m2 - n2)) grad psi) in target coordinates.
inline Vec predicted_tension(const WarpedSubmersion& ws, const Vec& p, double sign) {
    const int codim = ws.vertical_dim1() + ws.vertical_dim2();
    return ws.joint.jacobian_at(p) * (sign * codim * gradient(ws.source.combined, ws.psi, p));
}

struct LaplacianPair {
    double full = 0.0;        // Laplacian of psi on the source
    double first_horizontal = 0.0;  // trace of Hess psi over the H1 block
};

inline LaplacianPair horizontal_laplacian_psi(const WarpedSubmersion& ws, const Vec& p) {
    const Mat hess = hessian(ws.source.combined, ws.psi, p);
    const Mat g_inv = inverse_metric(ws.source.combined.metric_at(p));
    const BlockFrame frame = block_frame(ws, p);
    double h1 = 0.0;
    for (int j = 0; j < frame.h1.cols(); ++j) h1 += frame.h1.col(j).dot(hess * frame.h1.col(j));
    return {g_inv.cwiseProduct(hess).sum(), h1};
}

} // namespace wpsub

#pragma once

#include "submersion.hpp"
#include "warped_product.hpp"

#include <array>

namespace wpsub {

// phi = (phi1, phi2) : M1 x_f M2 -> N1 x_rho N2 with girth exponent psi on the source.
struct WarpedSubmersion {
    WarpedProductSpace source;
    WarpedProductSpace target;
    SmoothMap phi1;  // M1 -> N1
    SmoothMap phi2;  // M2 -> N2
    ScalarField psi; // on source.combined
    SmoothMap joint; // source.combined -> target.combined, assembled blockwise

    const BlockLayout& layout() const { return source.layout; }
    int vertical_dim1() const { return phi1.fiber_dim(); }
    int vertical_dim2() const { return phi2.fiber_dim(); }
};

inline WarpedSubmersion make_warped_submersion(WarpedProductSpace source, WarpedProductSpace target, SmoothMap phi1,
                                               SmoothMap phi2, ScalarField psi) {
    WarpedSubmersion ws{std::move(source), std::move(target), std::move(phi1), std::move(phi2), std::move(psi), {}};
    const BlockLayout src = ws.source.layout, dst = ws.target.layout;
    if (ws.phi1.source.dim != src.m1 || ws.phi2.source.dim != src.m2 || ws.phi1.target.dim != dst.m1 ||
        ws.phi2.target.dim != dst.m2)
        throw dimension_error("factor maps do not match the warped product dimensions");
    const SmoothMap p1 = ws.phi1, p2 = ws.phi2;
    ws.joint.source = ws.source.combined;
    ws.joint.target = ws.target.combined;
    ws.joint.value = [p1, p2, src, dst](const Vec& p) {
        return dst.join(p1.value(src.first(p)), p2.value(src.second(p)));
    };
    ws.joint.jacobian = [p1, p2, src, dst](const Vec& p) {
        Mat j = Mat::Zero(dst.total(), src.total());
        j.topLeftCorner(dst.m1, src.m1) = p1.jacobian_at(src.first(p));
        j.bottomRightCorner(dst.m2, src.m2) = p2.jacobian_at(src.second(p));
        return j;
    };
    return ws;
}

// g-orthonormal bases of the four blocks V1, H1, V2, H2 in combined coordinates.
struct BlockFrame {
    Mat v1, h1, v2, h2;
};

inline BlockFrame block_frame(const WarpedSubmersion& ws, const Vec& p) {
    const BlockLayout& L = ws.layout();
    const SubmersionFrame s1 = split_frame(ws.phi1, L.first(p));
    const SubmersionFrame s2 = split_frame(ws.phi2, L.second(p));
    const double f = ws.source.warp(p);
    return {L.lift_first_columns(s1.vertical), L.lift_first_columns(s1.horizontal),
            L.lift_second_columns(s2.vertical) / f, L.lift_second_columns(s2.horizontal) / f};
}

// Vertical projector of the joint submersion, assembled from the factor projectors.
inline Mat joint_vertical_projector(const WarpedSubmersion& ws, const Vec& p) {
    const BlockLayout& L = ws.layout();
    Mat pv = Mat::Zero(L.total(), L.total());
    pv.topLeftCorner(L.m1, L.m1) = projectors(ws.phi1, L.first(p)).vertical;
    pv.bottomRightCorner(L.m2, L.m2) = projectors(ws.phi2, L.second(p)).vertical;
    return pv;
}

// Factor O'Neill tensors on combined-coordinate arguments from one block; results lifted back.
inline Vec factor_T(const WarpedSubmersion& ws, int block, const Vec& p, const Vec& e, const Vec& f) {
    const BlockLayout& L = ws.layout();
    if (block == 1) return L.lift_first(oneill_T(ws.phi1, L.first(p), L.first(e), L.first(f)));
    return L.lift_second(oneill_T(ws.phi2, L.second(p), L.second(e), L.second(f)));
}

inline Vec factor_A(const WarpedSubmersion& ws, int block, const Vec& p, const Vec& e, const Vec& f) {
    const BlockLayout& L = ws.layout();
    if (block == 1) return L.lift_first(oneill_A(ws.phi1, L.first(p), L.first(e), L.first(f)));
    return L.lift_second(oneill_A(ws.phi2, L.second(p), L.second(e), L.second(f)));
}

inline Vec factor_A_derivative(const WarpedSubmersion& ws, int block, const Vec& p, const Vec& w, const Vec& x,
                               const Vec& y) {
    const BlockLayout& L = ws.layout();
    if (block == 1)
        return L.lift_first(oneill_A_derivative(ws.phi1, L.first(p), L.first(w), L.first(x), L.first(y)));
    return L.lift_second(oneill_A_derivative(ws.phi2, L.second(p), L.second(w), L.second(x), L.second(y)));
}

// max |f - rho o phi1| over the samples.
inline double check_warping_compatibility(const WarpedSubmersion& ws, std::span<const Vec> samples) {
    double worst = 0.0;
    for (const Vec& p : samples) {
        const Vec x1 = ws.layout().first(p);
        worst = std::max(worst, std::abs(ws.source.f.value(x1) - ws.target.f.value(ws.phi1.value(x1))));
    }
    return worst;
}

// O'Neill data of the joint submersion against factor data, clauses (i)-(xi).
inline std::vector<RelationReport> check_wpsub_tensors(const WarpedSubmersion& ws, const WarpedSampling& s) {
    const BlockLayout& L = ws.layout();
    const MetricField& M = ws.source.combined;
    const SmoothMap& joint = ws.joint;
    Rng rng(s.seed);
    std::array<ResidualMax, 11> acc;
    for (const Vec& p : s.points) {
        const Vec x1 = L.first(p), x2 = L.second(p);
        const Mat g = M.metric_at(p);
        const BlockFrame fr = block_frame(ws, p);
        const Projectors joint_pr = projectors(joint, p);
        const Projectors pr1 = projectors(ws.phi1, x1), pr2 = projectors(ws.phi2, x2);
        const double f = ws.source.f.value(x1);
        const Vec df = differential(ws.source.m1, ws.source.f, x1);
        const Vec grad_ln_f = L.lift_first(gradient(ws.source.m1, ws.source.f, x1) / f);
        const Vec h_grad_ln_f = joint_pr.horizontal * grad_ln_f;

        // Constant-component extensions projected onto the joint / factor distributions.
        auto joint_h = [&](const Vec& v) { return [&joint, v](const Vec& q) { return Vec(projectors(joint, q).horizontal * v); }; };
        auto joint_v = [&](const Vec& v) { return [&joint, v](const Vec& q) { return Vec(projectors(joint, q).vertical * v); }; };
        auto nabla = [&](const Vec& dir, auto field) { return cov_deriv_field(M, p, dir, field); };
        // factor covariant derivative of a projected field, lifted back
        auto nabla_factor = [&](int block, const Vec& dir, const Vec& v, bool horizontal) {
            const SmoothMap& phi = block == 1 ? ws.phi1 : ws.phi2;
            const Vec base = block == 1 ? x1 : x2;
            const Vec d = block == 1 ? L.first(dir) : L.second(dir);
            const Vec w = block == 1 ? L.first(v) : L.second(v);
            auto field = [&phi, w, horizontal](const Vec& q) {
                const Projectors pr = projectors(phi, q);
                return Vec((horizontal ? pr.horizontal : pr.vertical) * w);
            };
            const Vec out = cov_deriv_field(phi.source, base, d, field);
            return block == 1 ? L.lift_first(out) : L.lift_second(out);
        };
        auto lift_proj = [&](int block, const Vec& v, bool horizontal) {
            if (block == 1) return L.lift_first((horizontal ? pr1.horizontal : pr1.vertical) * L.first(v));
            return L.lift_second((horizontal ? pr2.horizontal : pr2.vertical) * L.second(v));
        };
        auto res = [&](const Vec& lhs, std::initializer_list<Vec> rhs) { return detail::vec_residual(g, lhs, rhs); };
        auto zero = [&](const Vec& v) { return g_norm(g, v); };
        auto T = [&](const Vec& a, const Vec& b) { return oneill_T(joint, p, a, b); };
        auto A = [&](const Vec& a, const Vec& b) { return oneill_A(joint, p, a, b); };

        for (int t = 0; t < s.vectors_per_point; ++t) {
            const Vec U1 = rng.unit_in_span(g, fr.v1), V1 = rng.unit_in_span(g, fr.v1);
            const Vec X1 = rng.unit_in_span(g, fr.h1), Y1 = rng.unit_in_span(g, fr.h1);
            const Vec U2 = rng.unit_in_span(g, fr.v2), V2 = rng.unit_in_span(g, fr.v2);
            const Vec X2 = rng.unit_in_span(g, fr.h2), Y2 = rng.unit_in_span(g, fr.h2);
            const double x1f = df.dot(L.first(X1)) / f, v1f = df.dot(L.first(V1)) / f;

            acc[0].add(res(T(U1, V1), {factor_T(ws, 1, p, U1, V1)}), p);
            acc[1].add(zero(T(U1, U2)), p);
            acc[2].add(res(T(U2, V2), {factor_T(ws, 2, p, U2, V2), Vec(-U2.dot(g * V2) * h_grad_ln_f)}), p);
            acc[3].add(std::max(res(T(V1, X1), {factor_T(ws, 1, p, V1, X1)}),
                                res(joint_pr.horizontal * nabla(V1, joint_h(X1)),
                                    {lift_proj(1, nabla_factor(1, V1, X1, true), true)})),
                       p);
            acc[4].add(std::max({zero(T(V1, X2)), zero(joint_pr.vertical * nabla(X2, joint_v(V1))),
                                 res(A(X2, V1), {Vec(v1f * X2)}),
                                 res(joint_pr.horizontal * nabla(V1, joint_h(X2)), {Vec(v1f * X2)})}),
                       p);
            acc[5].add(std::max({res(T(V2, X1), {Vec(x1f * V2)}),
                                 res(joint_pr.vertical * nabla(X1, joint_v(V2)), {Vec(x1f * V2)}),
                                 zero(A(X1, V2)), zero(joint_pr.horizontal * nabla(V2, joint_h(X1)))}),
                       p);
            // the factor side is the vertical part of the factor derivative
            acc[6].add(std::max(res(T(V2, X2), {factor_T(ws, 2, p, V2, X2)}),
                                res(T(V2, X2), {lift_proj(2, nabla_factor(2, V2, X2, true), false)})),
                       p);
            acc[7].add(std::max(res(A(X1, Y1), {factor_A(ws, 1, p, X1, Y1)}),
                                res(joint_pr.horizontal * nabla(X1, joint_h(Y1)),
                                    {lift_proj(1, nabla_factor(1, X1, Y1, true), true)})),
                       p);
            acc[8].add(std::max({res(joint_pr.horizontal * nabla(X1, joint_h(X2)), {Vec(x1f * X2)}),
                                 res(joint_pr.horizontal * nabla(X2, joint_h(X1)), {Vec(x1f * X2)}),
                                 zero(A(X1, X2)), zero(A(X2, X1))}),
                       p);
            acc[9].add(std::max(res(A(X2, Y2), {factor_A(ws, 2, p, X2, Y2)}), zero(joint_pr.vertical * grad_ln_f)), p);
            acc[10].add(res(joint_pr.horizontal * nabla(X2, joint_h(Y2)),
                            {lift_proj(2, nabla_factor(2, X2, Y2, true), true), Vec(-X2.dot(g * Y2) * h_grad_ln_f)}),
                        p);
        }
    }
    static const std::array<const char*, 11> ids = {"wpsub-i",   "wpsub-ii", "wpsub-iii", "wpsub-iv",
                                                    "wpsub-v",   "wpsub-vi", "wpsub-vii", "wpsub-viii",
                                                    "wpsub-ix",  "wpsub-x",  "wpsub-xi"};
    std::vector<RelationReport> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out.push_back(make_report(ids[i], acc[i], Tier::finite_difference));
    return out;
}

} // namespace wpsub

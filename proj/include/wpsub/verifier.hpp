#pragma once

#include "clairaut.hpp"
#include "fiber_chart.hpp"

#include <array>
#include <map>
#include <optional>

namespace wpsub {

struct FiberCharts {
    std::optional<FiberChart> first;
    std::optional<FiberChart> second;
};

struct SampleSettings {
    std::span<const Vec> points;
    int vectors_per_point = 8;
    std::uint64_t seed = default_seed;
};

// ---- registry ----------------------------------------------------------------

inline std::vector<std::string> relation_registry() {
    std::vector<std::string> ids;
    for (int i = 1; i <= 29; ++i) ids.push_back((i < 10 ? "curv-phi-0" : "curv-phi-") + std::to_string(i));
    for (int i = 1; i <= 6; ++i) ids.push_back("sec-phi-" + std::to_string(i));
    for (int i = 1; i <= 4; ++i) ids.push_back("ric-phi-" + std::to_string(i));
    return ids;
}

enum class Block { v1, h1, v2, h2, tm1, tm2, tm };

inline const char* block_name(Block b) {
    switch (b) {
    case Block::v1: return "V1";
    case Block::h1: return "H1";
    case Block::v2: return "V2";
    case Block::h2: return "H2";
    case Block::tm1: return "TM1";
    case Block::tm2: return "TM2";
    case Block::tm: return "TM";
    }
    return "?";
}

struct BlockDims {
    int v1 = 0, h1 = 0, v2 = 0, h2 = 0;

    static BlockDims of(const WarpedSubmersion& ws) {
        return {ws.vertical_dim1(), ws.phi1.target.dim, ws.vertical_dim2(), ws.phi2.target.dim};
    }
    int operator[](Block b) const {
        switch (b) {
        case Block::v1: return v1;
        case Block::h1: return h1;
        case Block::v2: return v2;
        case Block::h2: return h2;
        case Block::tm1: return v1 + h1;
        case Block::tm2: return v2 + h2;
        case Block::tm: return v1 + h1 + v2 + h2;
        }
        return 0;
    }
};

// Ingredients feeding a relation; any finite-difference ingredient puts it in the finite-difference tier.
enum Ingredient : unsigned {
    curvature = 1u << 0,
    hess_psi = 1u << 1,
    grad_psi = 1u << 2,
    hess_f = 1u << 3,
    oneill = 1u << 4,
    fiber_curvature = 1u << 5,
    target_curvature = 1u << 6,
};

inline Tier ingredient_tier(const WarpedSubmersion& ws, unsigned ingredients) {
    const MetricField& M = ws.source.combined;
    bool analytic = true;
    if (ingredients & curvature) analytic &= M.has_second_derivatives();
    if (ingredients & hess_psi) analytic &= ws.psi.has_grad() && ws.psi.has_hess() && M.has_first_derivatives();
    if (ingredients & grad_psi) analytic &= ws.psi.has_grad();
    if (ingredients & hess_f)
        analytic &= ws.source.f.has_grad() && ws.source.f.has_hess() && ws.source.m1.has_first_derivatives();
    if (ingredients & (oneill | fiber_curvature)) analytic = false;
    if (ingredients & target_curvature)
        analytic &= ws.phi1.target.has_second_derivatives() && ws.phi2.target.has_second_derivatives() &&
                    ws.phi1.jacobian && ws.phi2.jacobian;
    return tier_of(analytic);
}

// Everything the relations need at one sample point.
class PointContext {
public:
    PointContext(const WarpedSubmersion& ws, const FiberCharts& charts, const Vec& p) : ws_(ws), p_(p) {
        const MetricField& M = ws.source.combined;
        const BlockLayout& L = ws.layout();
        g_ = M.metric_at(p);
        g_inv_ = inverse_metric(g_);
        r_ = riemann(M, p);
        ric_ = ricci_from(r_, g_inv_);
        hess_psi_ = hessian(M, ws.psi, p);
        dpsi_ = differential(M, ws.psi, p);
        grad_psi_ = g_inv_ * dpsi_;
        grad_psi_sq_ = dpsi_.dot(grad_psi_);
        const Vec x1 = L.first(p), x2 = L.second(p);
        f_ = ws.source.f.value(x1);
        hess_f_ = hessian(ws.source.m1, ws.source.f, x1);
        grad_f_ = gradient(ws.source.m1, ws.source.f, x1);
        frame_ = block_frame(ws, p);
        if (charts.first) fiber1_ = FiberCurvature(*charts.first, ws.source.m1, x1);
        if (charts.second) fiber2_ = FiberCurvature(*charts.second, ws.source.m2, x2);
        const Vec y1 = ws.phi1.value(x1), y2 = ws.phi2.value(x2);
        j1_ = ws.phi1.jacobian_at(x1);
        j2_ = ws.phi2.jacobian_at(x2);
        target_r1_ = riemann(ws.phi1.target, y1);
        target_r2_ = riemann(ws.phi2.target, y2);
        target_ric1_ = ricci_from(target_r1_, inverse_metric(ws.phi1.target.metric_at(y1)));
        target_ric2_ = ricci_from(target_r2_, inverse_metric(ws.phi2.target.metric_at(y2)));
        for (int j = 0; j < frame_.h1.cols(); ++j) laplacian_h1_ += hess_psi(frame_.h1.col(j), frame_.h1.col(j));
    }

    const Vec& point() const { return p_; }
    const Mat& metric() const { return g_; }
    const BlockFrame& frame() const { return frame_; }
    double warp() const { return f_; }
    double grad_psi_sq() const { return grad_psi_sq_; }
    const Vec& grad_psi() const { return grad_psi_; }
    double laplacian_h1_psi() const { return laplacian_h1_; }

    double g(const Vec& a, const Vec& b) const { return a.dot(g_ * b); }
    double R(const Vec& a, const Vec& b, const Vec& c, const Vec& d) const { return r_.apply(a, b, c, d); }
    double ric(const Vec& a, const Vec& b) const { return a.dot(ric_ * b); }
    double hess_psi(const Vec& a, const Vec& b) const { return a.dot(hess_psi_ * b); }
    double dpsi(const Vec& a) const { return dpsi_.dot(a); }
    double hess_f(const Vec& a, const Vec& b) const {
        const BlockLayout& L = ws_.layout();
        return L.first(a).dot(hess_f_ * L.first(b));
    }
    // nabla_a grad f, lifted from the first factor
    Vec nabla_grad_f(const Vec& a) const {
        const BlockLayout& L = ws_.layout();
        return L.lift_first(inverse_metric(ws_.source.m1.metric_at(L.first(p_))) * hess_f_ * L.first(a));
    }

    bool has_fiber_chart(int block) const { return block == 1 ? fiber1_.has_value() : fiber2_.has_value(); }

    // Intrinsic fiber curvature, lowered with the metric the fiber inherits from the source.
    double fiber_R(int block, const Vec& a, const Vec& b, const Vec& c, const Vec& d) const {
        const BlockLayout& L = ws_.layout();
        if (block == 1) return fiber1_.value()(L.first(a), L.first(b), L.first(c), L.first(d));
        return f_ * f_ * fiber2_.value()(L.second(a), L.second(b), L.second(c), L.second(d));
    }

    // Target-factor curvature on pushed-forward vectors, lowered with the source-side scaling.
    double target_R(int block, const Vec& a, const Vec& b, const Vec& c, const Vec& d) const {
        const BlockLayout& L = ws_.layout();
        if (block == 1)
            return target_r1_.apply(j1_ * L.first(a), j1_ * L.first(b), j1_ * L.first(c), j1_ * L.first(d));
        return f_ * f_ *
               target_r2_.apply(j2_ * L.second(a), j2_ * L.second(b), j2_ * L.second(c), j2_ * L.second(d));
    }

    double target_ric(int block, const Vec& a, const Vec& b) const {
        const BlockLayout& L = ws_.layout();
        if (block == 1) return (j1_ * L.first(a)).dot(target_ric1_ * (j1_ * L.first(b)));
        return (j2_ * L.second(a)).dot(target_ric2_ * (j2_ * L.second(b)));
    }

    Vec A(int block, const Vec& e, const Vec& f) const { return factor_A(ws_, block, p_, e, f); }
    // (nabla_w A)_x y
    Vec dA(int block, const Vec& w, const Vec& x, const Vec& y) const {
        return factor_A_derivative(ws_, block, p_, w, x, y);
    }

private:
    const WarpedSubmersion& ws_;
    Vec p_;
    Mat g_, g_inv_, ric_, hess_psi_, hess_f_, j1_, j2_, target_ric1_, target_ric2_;
    Vec dpsi_, grad_psi_, grad_f_;
    double grad_psi_sq_ = 0.0, f_ = 1.0, laplacian_h1_ = 0.0;
    Tensor4 r_, target_r1_, target_r2_;
    BlockFrame frame_;
    std::optional<FiberCurvature> fiber1_, fiber2_;
};

// One random draw of block vectors, each g-unit (zero for empty blocks).
struct Draw {
    Vec U1, V1, W1, F1, X1, Y1, Z1, H1;
    Vec U2, V2, W2, F2, X2, Y2, Z2, H2;
    Vec E1, E2, G2, E;

    static Draw sample(Rng& rng, const PointContext& c) {
        const Mat& g = c.metric();
        const BlockFrame& fr = c.frame();
        Mat tm1(fr.v1.rows(), fr.v1.cols() + fr.h1.cols());
        tm1 << fr.v1, fr.h1;
        Mat tm2(fr.v2.rows(), fr.v2.cols() + fr.h2.cols());
        tm2 << fr.v2, fr.h2;
        Draw d;
        d.U1 = rng.unit_in_span(g, fr.v1); d.V1 = rng.unit_in_span(g, fr.v1);
        d.W1 = rng.unit_in_span(g, fr.v1); d.F1 = rng.unit_in_span(g, fr.v1);
        d.X1 = rng.unit_in_span(g, fr.h1); d.Y1 = rng.unit_in_span(g, fr.h1);
        d.Z1 = rng.unit_in_span(g, fr.h1); d.H1 = rng.unit_in_span(g, fr.h1);
        d.U2 = rng.unit_in_span(g, fr.v2); d.V2 = rng.unit_in_span(g, fr.v2);
        d.W2 = rng.unit_in_span(g, fr.v2); d.F2 = rng.unit_in_span(g, fr.v2);
        d.X2 = rng.unit_in_span(g, fr.h2); d.Y2 = rng.unit_in_span(g, fr.h2);
        d.Z2 = rng.unit_in_span(g, fr.h2); d.H2 = rng.unit_in_span(g, fr.h2);
        d.E1 = rng.unit_in_span(g, tm1);
        d.E2 = rng.unit_in_span(g, tm2);
        d.G2 = rng.unit_in_span(g, tm2);
        d.E = rng.unit_vector(g);
        return d;
    }
};

// lhs = sum(terms); `alternate` holds the terms of a second reading when one is tracked.
struct Evaluation {
    double lhs = 0.0;
    std::vector<double> terms;
    std::optional<std::vector<double>> alternate;
};

inline double evaluation_residual(double lhs, const std::vector<double>& terms, bool zero) {
    if (zero) return std::abs(lhs);
    double rhs = 0.0;
    std::vector<double> all = terms;
    for (double t : terms) rhs += t;
    all.push_back(lhs);
    return relative_residual(lhs - rhs, all);
}

struct RelationSpec {
    std::string id;
    std::vector<Block> blocks;
    unsigned ingredients = curvature;
    int fiber_block = 0;  // 1 or 2 when an intrinsic fiber curvature is needed
    bool zero = false;
    std::string alternate_label;
    std::function<Evaluation(const PointContext&, const Draw&, const WarpedSubmersion&)> eval;
};

namespace detail {

inline double wedge(const PointContext& c, const Vec& a, const Vec& b, const Vec& x, const Vec& y) {
    // g(a, y) g(b, x) - g(a, x) g(b, y)
    return c.g(a, y) * c.g(b, x) - c.g(a, x) * c.g(b, y);
}

} // namespace detail

// The 29 curvature relations of a Clairaut warped-product submersion.
inline std::vector<RelationSpec> curvature_relation_specs() {
    using B = Block;
    using detail::wedge;
    std::vector<RelationSpec> s;
    auto add = [&](int n, std::vector<Block> blocks, unsigned ingredients, auto fn) {
        RelationSpec r;
        r.id = (n < 10 ? "curv-phi-0" : "curv-phi-") + std::to_string(n);
        r.blocks = std::move(blocks);
        r.ingredients = ingredients | curvature;
        r.eval = fn;
        s.push_back(std::move(r));
    };
    auto add_zero = [&](int n, std::vector<Block> blocks, auto lhs) {
        add(n, std::move(blocks), curvature, [lhs](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
            return Evaluation{lhs(c, d), {}, {}};
        });
        s.back().zero = true;
    };

    add(1, {B::v1}, grad_psi | fiber_curvature, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.U1, d.V1, d.W1, d.F1),
                          {c.fiber_R(1, d.U1, d.V1, d.W1, d.F1), -c.grad_psi_sq() * wedge(c, d.U1, d.V1, d.W1, d.F1)},
                          {}};
    });
    s.back().fiber_block = 1;
    add(2, {B::v2}, grad_psi | fiber_curvature, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        const double fib = c.fiber_R(2, d.U2, d.V2, d.W2, d.F2);
        const double w = wedge(c, d.U2, d.V2, d.W2, d.F2);
        return Evaluation{c.R(d.U2, d.V2, d.W2, d.F2), {fib, -2.0 * c.grad_psi_sq() * w},
                          std::vector<double>{fib, -c.grad_psi_sq() * w}};
    });
    s.back().fiber_block = 2;
    s.back().alternate_label = "unit coefficient on the gradient term";
    add(3, {B::v1, B::h1}, hess_psi, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.U1, d.V1, d.W1, d.X1),
                          {c.g(d.U1, d.W1) * c.hess_psi(d.V1, d.X1), -c.g(d.V1, d.W1) * c.hess_psi(d.U1, d.X1)},
                          {}};
    });
    add_zero(4, {B::v2, B::h2}, [](const PointContext& c, const Draw& d) { return c.R(d.U2, d.V2, d.W2, d.X2); });
    add(5, {B::v1, B::h1}, hess_psi | oneill, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        const double uv = c.g(d.U1, d.V1);
        return Evaluation{c.R(d.U1, d.X1, d.Y1, d.V1),
                          {-uv * c.hess_psi(d.X1, d.Y1), -c.dpsi(d.X1) * c.dpsi(d.Y1) * uv,
                           c.g(c.dA(1, d.U1, d.X1, d.Y1), d.V1), c.g(c.A(1, d.X1, d.V1), c.A(1, d.Y1, d.U1))},
                          {}};
    });
    add(6, {B::v2, B::h2}, grad_psi | oneill, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.U2, d.X2, d.Y2, d.V2),
                          {c.g(c.dA(2, d.U2, d.X2, d.Y2), d.V2), c.g(c.A(2, d.X2, d.V2), c.A(2, d.Y2, d.U2)),
                           -c.grad_psi_sq() * c.g(d.X2, d.Y2) * c.g(d.U2, d.V2)},
                          {}};
    });
    auto horizontal_gauss = [](int b, const PointContext& c, const Vec& X, const Vec& Y, const Vec& Z, const Vec& H,
                               double sign_last) {
        return std::vector<double>{c.target_R(b, X, Y, Z, H), 2.0 * c.g(c.A(b, Z, H), c.A(b, X, Y)),
                                   c.g(c.A(b, Y, H), c.A(b, X, Z)), sign_last * c.g(c.A(b, X, H), c.A(b, Y, Z))};
    };
    add(7, {B::h1}, oneill | target_curvature, [horizontal_gauss](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.X1, d.Y1, d.Z1, d.H1), horizontal_gauss(1, c, d.X1, d.Y1, d.Z1, d.H1, 1.0),
                          horizontal_gauss(1, c, d.X1, d.Y1, d.Z1, d.H1, -1.0)};
    });
    s.back().alternate_label = "negative sign on the last A-term";
    add(8, {B::h2}, oneill | target_curvature | grad_psi, [horizontal_gauss](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        const double warp = c.grad_psi_sq() * (c.g(d.X2, d.Z2) * c.g(d.Y2, d.H2) - c.g(d.Y2, d.Z2) * c.g(d.X2, d.H2));
        auto stated = horizontal_gauss(2, c, d.X2, d.Y2, d.Z2, d.H2, 1.0);
        auto corrected = horizontal_gauss(2, c, d.X2, d.Y2, d.Z2, d.H2, -1.0);
        stated.push_back(warp);
        corrected.push_back(warp);
        return Evaluation{c.R(d.X2, d.Y2, d.Z2, d.H2), stated, corrected};
    });
    s.back().alternate_label = "negative sign on the last A-term";
    add(9, {B::v1, B::v2}, grad_psi, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.U1, d.U2, d.V1, d.V2), {c.g(d.U1, d.V1) * c.g(d.U2, d.V2) * c.grad_psi_sq()}, {}};
    });
    add(10, {B::h1, B::h2}, hess_f, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.X1, d.X2, d.Y1, d.Y2), {c.hess_f(d.X1, d.Y1) * c.g(d.X2, d.Y2) / c.warp()}, {}};
    });
    add(11, {B::v1, B::v2, B::h1}, hess_f, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.U1, d.U2, d.V2, d.X1), {-c.hess_f(d.U1, d.X1) * c.g(d.U2, d.V2) / c.warp()}, {}};
    });
    add(12, {B::v1, B::v2}, hess_f, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        const double second = -c.g(d.U2, d.V2) * c.g(c.nabla_grad_f(d.U1), d.V2) / c.warp();
        return Evaluation{c.R(d.U1, d.U2, d.V2, d.V2), {}, std::vector<double>{second}};
    });
    s.back().zero = true;
    s.back().alternate_label = "magnitude of the second stated expression";
    add(13, {B::h1, B::v2, B::v1}, hess_f, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.X1, d.U2, d.V2, d.U1), {-c.hess_f(d.X1, d.U1) * c.g(d.U2, d.V2) / c.warp()}, {}};
    });
    add(14, {B::h1, B::v2}, hess_f, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.X1, d.U2, d.V2, d.Y1), {-c.hess_f(d.X1, d.Y1) * c.g(d.U2, d.V2) / c.warp()}, {}};
    });
    add(15, {B::v1, B::h2}, grad_psi, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.U1, d.X2, d.Y2, d.V1), {-c.g(d.U1, d.V1) * c.g(d.X2, d.Y2) * c.grad_psi_sq()}, {}};
    });
    add(16, {B::v1, B::h2, B::h1}, hess_f, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.U1, d.X2, d.Y2, d.X1), {-c.hess_f(d.U1, d.X1) * c.g(d.X2, d.Y2) / c.warp()}, {}};
    });
    add(17, {B::h1, B::h2, B::v1}, hess_f, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.X1, d.X2, d.Y2, d.V1), {-c.hess_f(d.X1, d.V1) * c.g(d.X2, d.Y2) / c.warp()}, {}};
    });
    add(18, {B::h1, B::h2}, hess_f, [](const PointContext& c, const Draw& d, const WarpedSubmersion&) {
        return Evaluation{c.R(d.X1, d.X2, d.Y2, d.Y1), {-c.hess_f(d.X1, d.Y1) * c.g(d.X2, d.Y2) / c.warp()}, {}};
    });
    add_zero(19, {B::v1, B::v2}, [](const PointContext& c, const Draw& d) { return c.R(d.U1, d.U2, d.V1, d.E1); });
    add_zero(20, {B::v1, B::v2, B::h2}, [](const PointContext& c, const Draw& d) { return c.R(d.U1, d.U2, d.V1, d.X2); });
    add_zero(21, {B::h1, B::h2}, [](const PointContext& c, const Draw& d) { return c.R(d.X1, d.X2, d.Y1, d.E1); });
    add_zero(22, {B::h1, B::h2, B::v2}, [](const PointContext& c, const Draw& d) { return c.R(d.X1, d.X2, d.Y1, d.U2); });
    add_zero(23, {B::tm1, B::tm2}, [](const PointContext& c, const Draw& d) { return c.R(d.E2, d.G2, d.E1, d.E); });
    add_zero(24, {B::v1, B::v2, B::h2}, [](const PointContext& c, const Draw& d) { return c.R(d.U1, d.U2, d.V2, d.X2); });
    add_zero(25, {B::v1, B::v2, B::h2}, [](const PointContext& c, const Draw& d) { return c.R(d.U1, d.U2, d.Y2, d.V2); });
    add_zero(26, {B::v1, B::v2, B::h2, B::h1}, [](const PointContext& c, const Draw& d) { return c.R(d.U1, d.U2, d.Y2, d.Y1); });
    add_zero(27, {B::v1, B::v2, B::h2}, [](const PointContext& c, const Draw& d) { return c.R(d.U1, d.U2, d.Y2, d.Y2); });
    add_zero(28, {B::h1, B::v2}, [](const PointContext& c, const Draw& d) { return c.R(d.X1, d.U2, d.V2, d.E2); });
    add_zero(29, {B::h1, B::v2, B::h2}, [](const PointContext& c, const Draw& d) { return c.R(d.X1, d.U2, d.Y2, d.E); });
    return s;
}

// Reason a relation cannot be evaluated on this submersion, empty when it can.
inline std::string structural_skip_reason(const RelationSpec& spec, const BlockDims& dims, const FiberCharts& charts) {
    for (Block b : spec.blocks)
        if (dims[b] == 0) return std::string("block ") + block_name(b) + " is zero-dimensional";
    if (spec.fiber_block == 1 && !charts.first) return "no fiber chart for the first factor";
    if (spec.fiber_block == 2 && !charts.second) return "no fiber chart for the second factor";
    return {};
}

inline void require_clairaut(const WarpedSubmersion& ws, std::span<const Vec> points) {
    if (!check_clairaut_conditions(ws, points).all_pass())
        throw hypothesis_violation("the submersion does not satisfy the Clairaut conditions");
}

namespace detail {

struct Accumulated {
    ResidualMax main;
    ResidualMax alternate;
};

inline RelationReport finish(const std::string& id, const Accumulated& acc, Tier tier, bool has_alternate,
                             const std::string& alternate_label) {
    RelationReport r = make_report(id, acc.main, tier);
    if (has_alternate) {
        r.alternate_residual = acc.alternate.value();
        r.alternate_label = alternate_label;
    }
    return r;
}

} // namespace detail

inline std::vector<RelationReport> verify_curv_relations(const WarpedSubmersion& ws, const FiberCharts& charts,
                                                         const SampleSettings& settings) {
    require_clairaut(ws, settings.points);
    const auto specs = curvature_relation_specs();
    const BlockDims dims = BlockDims::of(ws);
    std::vector<detail::Accumulated> acc(specs.size());
    std::vector<std::string> skip(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) skip[i] = structural_skip_reason(specs[i], dims, charts);
    Rng rng(settings.seed);
    for (const Vec& p : settings.points) {
        const PointContext ctx(ws, charts, p);
        for (int t = 0; t < settings.vectors_per_point; ++t) {
            const Draw d = Draw::sample(rng, ctx);
            for (std::size_t i = 0; i < specs.size(); ++i) {
                if (!skip[i].empty()) continue;
                const Evaluation e = specs[i].eval(ctx, d, ws);
                acc[i].main.add(evaluation_residual(e.lhs, e.terms, specs[i].zero), p);
                if (e.alternate) {
                    // relation (12) tracks the size of its second expression on its own
                    const double alt = specs[i].zero && e.terms.empty()
                                           ? std::abs((*e.alternate)[0])
                                           : evaluation_residual(e.lhs, *e.alternate, false);
                    acc[i].alternate.add(alt, p);
                }
            }
        }
    }
    std::vector<RelationReport> out;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const Tier tier = ingredient_tier(ws, specs[i].ingredients);
        if (!skip[i].empty()) {
            out.push_back(skipped(specs[i].id, skip[i], tier));
            continue;
        }
        out.push_back(detail::finish(specs[i].id, acc[i], tier, !specs[i].alternate_label.empty(),
                                     specs[i].alternate_label));
    }
    return out;
}

// ---- sectional curvature rows -----------------------------------------------

inline std::string empty_block_reason(const BlockDims& dims, std::initializer_list<Block> blocks) {
    for (Block b : blocks)
        if (dims[b] == 0) return std::string("block ") + block_name(b) + " is zero-dimensional";
    return {};
}

inline std::array<std::string, 6> sec_skip_reasons(const BlockDims& dims, const FiberCharts& charts) {
    auto plane = [&](Block b) -> std::string {
        if (dims[b] < 2)
            return std::string("block ") + block_name(b) + " has dimension " + std::to_string(dims[b]) + ": no 2-plane";
        return {};
    };
    std::array<std::string, 6> r = {plane(Block::v1),
                                    plane(Block::v2),
                                    plane(Block::h1),
                                    plane(Block::h2),
                                    empty_block_reason(dims, {Block::v1, Block::h1}),
                                    empty_block_reason(dims, {Block::v2, Block::h2})};
    if (r[0].empty() && !charts.first) r[0] = "no fiber chart for the first factor";
    if (r[1].empty() && !charts.second) r[1] = "no fiber chart for the second factor";
    return r;
}

inline std::array<std::string, 4> ric_skip_reasons(const BlockDims& dims, const FiberCharts& charts) {
    std::array<std::string, 4> r = {empty_block_reason(dims, {Block::v1}), empty_block_reason(dims, {Block::v2}),
                                    empty_block_reason(dims, {Block::h1}), empty_block_reason(dims, {Block::h2})};
    if (r[0].empty() && !charts.first) r[0] = "no fiber chart for the first factor";
    if (r[1].empty() && !charts.second) r[1] = "no fiber chart for the second factor";
    return r;
}

// Registry ids that cannot be evaluated on this submersion, with the reason.
inline std::map<std::string, std::string> structural_skips(const WarpedSubmersion& ws, const FiberCharts& charts) {
    const BlockDims dims = BlockDims::of(ws);
    std::map<std::string, std::string> out;
    for (const RelationSpec& spec : curvature_relation_specs())
        if (auto why = structural_skip_reason(spec, dims, charts); !why.empty()) out[spec.id] = why;
    const auto sec = sec_skip_reasons(dims, charts);
    for (std::size_t i = 0; i < sec.size(); ++i)
        if (!sec[i].empty()) out["sec-phi-" + std::to_string(i + 1)] = sec[i];
    const auto ric = ric_skip_reasons(dims, charts);
    for (std::size_t i = 0; i < ric.size(); ++i)
        if (!ric[i].empty()) out["ric-phi-" + std::to_string(i + 1)] = ric[i];
    return out;
}

inline std::vector<RelationReport> verify_sec_relations(const WarpedSubmersion& ws, const FiberCharts& charts,
                                                        const SampleSettings& settings) {
    require_clairaut(ws, settings.points);
    const BlockDims dims = BlockDims::of(ws);
    struct Row {
        std::string id;
        std::string skip;
        Tier tier;
        std::string alternate_label;  // empty when no alternate reading is tracked
    };
    const std::array<std::string, 6> reasons = sec_skip_reasons(dims, charts);
    std::vector<Row> rows = {
        {"sec-phi-1", reasons[0], ingredient_tier(ws, curvature | fiber_curvature | grad_psi), ""},
        {"sec-phi-2", reasons[1], ingredient_tier(ws, curvature | fiber_curvature | grad_psi),
         "unit coefficient on the gradient term"},
        {"sec-phi-3", reasons[2], ingredient_tier(ws, curvature | oneill | target_curvature), ""},
        {"sec-phi-4", reasons[3], ingredient_tier(ws, curvature | oneill | target_curvature | grad_psi), ""},
        {"sec-phi-5", reasons[4], ingredient_tier(ws, curvature | oneill | hess_psi), ""},
        {"sec-phi-6", reasons[5], ingredient_tier(ws, curvature | oneill | grad_psi), ""},
    };

    std::vector<detail::Accumulated> acc(rows.size());
    Rng rng(settings.seed);
    for (const Vec& p : settings.points) {
        const PointContext c(ws, charts, p);
        const Mat& gm = c.metric();
        const BlockLayout& L = ws.layout();
        const Mat g1 = ws.source.m1.metric_at(L.first(p));
        const Tensor4 r1 = riemann(ws.source.m1, L.first(p));
        const Tensor4 r2 = riemann(ws.source.m2, L.second(p));
        const Mat g2 = ws.source.m2.metric_at(L.second(p));
        for (int t = 0; t < settings.vectors_per_point; ++t) {
            const Draw d = Draw::sample(rng, c);
            auto sec = [&](const Vec& a, const Vec& b) { return c.R(a, b, b, a) / plane_gram(gm, a, b); };
            auto wedge_sq = [&](const Vec& a, const Vec& b) { return plane_gram(gm, a, b); };
            if (rows[0].skip.empty()) {
                const double lhs = sec(d.U1, d.V1);
                const double factor = sectional_from(r1, g1, L.first(d.U1), L.first(d.V1));
                const double fiber = c.fiber_R(1, d.U1, d.V1, d.V1, d.U1) / wedge_sq(d.U1, d.V1) - c.grad_psi_sq();
                acc[0].main.add(std::max(relative_residual(lhs - factor, {lhs, factor}),
                                         relative_residual(lhs - fiber, {lhs, fiber, c.grad_psi_sq()})),
                                p);
            }
            if (rows[1].skip.empty()) {
                const double lhs = sec(d.U2, d.V2);
                // the fiber {x1} x M2 carries f^2 g2, so its sectional curvature is sec(g2) / f^2
                const double factor = sectional_from(r2, g2, L.second(d.U2), L.second(d.V2)) / (c.warp() * c.warp()) -
                                      c.grad_psi_sq();
                const double fiber_sec = c.fiber_R(2, d.U2, d.V2, d.V2, d.U2) / wedge_sq(d.U2, d.V2);
                const double stated = fiber_sec - 2.0 * c.grad_psi_sq();
                const double unit = fiber_sec - c.grad_psi_sq();
                const double first = relative_residual(lhs - factor, {lhs, factor, c.grad_psi_sq()});
                acc[1].main.add(std::max(first, relative_residual(lhs - stated, {lhs, fiber_sec, 2.0 * c.grad_psi_sq()})), p);
                acc[1].alternate.add(std::max(first, relative_residual(lhs - unit, {lhs, fiber_sec, c.grad_psi_sq()})), p);
            }
            if (rows[2].skip.empty()) {
                const double lhs = sec(d.X1, d.Y1);
                const double w = wedge_sq(d.X1, d.Y1);
                const Vec a = c.A(1, d.X1, d.Y1);
                const double star = c.target_R(1, d.X1, d.Y1, d.Y1, d.X1) / w, aa = 3.0 * c.g(a, a) / w;
                acc[2].main.add(relative_residual(lhs - (star - aa), {lhs, star, aa}), p);
            }
            if (rows[3].skip.empty()) {
                const double lhs = sec(d.X2, d.Y2);
                const double w = wedge_sq(d.X2, d.Y2);
                const Vec a = c.A(2, d.X2, d.Y2);
                const double star = c.target_R(2, d.X2, d.Y2, d.Y2, d.X2) / w, aa = 3.0 * c.g(a, a) / w;
                acc[3].main.add(relative_residual(lhs - (star - aa - c.grad_psi_sq()), {lhs, star, aa, c.grad_psi_sq()}), p);
            }
            if (rows[4].skip.empty()) {
                const double lhs = sec(d.U1, d.X1);
                const double uu = c.g(d.U1, d.U1), xx = c.g(d.X1, d.X1);
                const Vec a = c.A(1, d.X1, d.U1);
                const double hess = -uu * (c.hess_psi(d.X1, d.X1) + c.dpsi(d.X1) * c.dpsi(d.X1)) / (uu * xx);
                const double aa = c.g(a, a) / (uu * xx);
                acc[4].main.add(relative_residual(lhs - (hess + aa), {lhs, hess, aa}), p);
            }
            if (rows[5].skip.empty()) {
                const double lhs = sec(d.U2, d.X2);
                const double uu = c.g(d.U2, d.U2), xx = c.g(d.X2, d.X2);
                const Vec a = c.A(2, d.X2, d.U2);
                const double aa = c.g(a, a) / (uu * xx);
                acc[5].main.add(relative_residual(lhs - (aa - c.grad_psi_sq()), {lhs, aa, c.grad_psi_sq()}), p);
            }
        }
    }
    std::vector<RelationReport> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].skip.empty()) out.push_back(skipped(rows[i].id, rows[i].skip, rows[i].tier));
        else out.push_back(detail::finish(rows[i].id, acc[i], rows[i].tier, !rows[i].alternate_label.empty(), rows[i].alternate_label));
    }
    return out;
}

// ---- Ricci rows ------------------------------------------------------------------

inline std::vector<RelationReport> verify_ric_relations(const WarpedSubmersion& ws, const FiberCharts& charts,
                                                        const SampleSettings& settings) {
    require_clairaut(ws, settings.points);
    const BlockDims dims = BlockDims::of(ws);
    const int m2 = ws.source.m2.dim;
    const int k1 = dims.v1, n2 = dims.h2;
    const std::array<std::string, 4> skip = ric_skip_reasons(dims, charts);
    const std::array<Tier, 4> tiers = {
        ingredient_tier(ws, curvature | fiber_curvature | oneill | hess_psi),
        ingredient_tier(ws, curvature | fiber_curvature | oneill | hess_psi),
        ingredient_tier(ws, curvature | target_curvature | oneill | hess_psi),
        ingredient_tier(ws, curvature | target_curvature | oneill | hess_psi),
    };
    std::array<detail::Accumulated, 4> acc;
    double block_norm_gap = 0.0;
    Rng rng(settings.seed);
    for (const Vec& p : settings.points) {
        const PointContext c(ws, charts, p);
        const BlockFrame& fr = c.frame();
        const BlockLayout& L = ws.layout();
        {
            // the first-block norm of grad psi agrees with the full norm when grad psi lies in M1
            const Mat g1 = ws.source.m1.metric_at(L.first(p));
            const Vec gp1 = L.first(c.grad_psi());
            const double first_sq = gp1.dot(g1 * gp1);
            block_norm_gap = std::max(block_norm_gap, relative_residual(first_sq - c.grad_psi_sq(), {first_sq, c.grad_psi_sq()}));
        }
        auto fiber_ric = [&](int b, const Mat& frame, const Vec& u, const Vec& v) {
            double s = 0.0;
            for (int a = 0; a < frame.cols(); ++a) s += c.fiber_R(b, frame.col(a), u, v, frame.col(a));
            return s;
        };
        // sum_j g(A(e_j, u), A(e_j, v)) over the columns of frame
        auto a_trace_left = [&](int b, const Mat& frame, const Vec& u, const Vec& v) {
            double s = 0.0;
            for (int j = 0; j < frame.cols(); ++j) s += c.g(c.A(b, frame.col(j), u), c.A(b, frame.col(j), v));
            return s;
        };
        auto a_trace_right = [&](int b, const Mat& frame, const Vec& x, const Vec& y) {
            double s = 0.0;
            for (int j = 0; j < frame.cols(); ++j) s += c.g(c.A(b, x, frame.col(j)), c.A(b, y, frame.col(j)));
            return s;
        };
        auto a_divergence = [&](int b, const Mat& vertical, const Vec& x, const Vec& y) {
            double s = 0.0;
            for (int i = 0; i < vertical.cols(); ++i) s += c.g(c.dA(b, vertical.col(i), x, y), vertical.col(i));
            return s;
        };
        const double lap = c.laplacian_h1_psi();
        const double gp = c.grad_psi_sq();
        for (int t = 0; t < settings.vectors_per_point; ++t) {
            const Draw d = Draw::sample(rng, c);
            if (skip[0].empty()) {
                const double lhs = c.ric(d.U1, d.V1), uv = c.g(d.U1, d.V1);
                const double fib = fiber_ric(1, fr.v1, d.U1, d.V1);
                const double coeff = (k1 + m2) * gp * uv;
                const double tr = a_trace_left(1, fr.h1, d.U1, d.V1);
                acc[0].main.add(evaluation_residual(lhs, {fib, -coeff, -uv * lap, tr}, false), p);
                acc[0].alternate.add(evaluation_residual(lhs, {fib, coeff, uv * lap, -tr}, false), p);
            }
            if (skip[1].empty()) {
                const double lhs = c.ric(d.U2, d.V2), uv = c.g(d.U2, d.V2);
                const double fib = fiber_ric(2, fr.v2, d.U2, d.V2);
                const double tr = a_trace_left(2, fr.h2, d.U2, d.V2);
                const double stated = (lap + (k1 + 2 * m2 - n2 - 1) * gp) * uv;
                const double unit = (lap + (k1 + m2) * gp) * uv;
                acc[1].main.add(evaluation_residual(lhs, {fib, tr, -stated}, false), p);
                acc[1].alternate.add(evaluation_residual(lhs, {fib, tr, -unit}, false), p);
            }
            if (skip[2].empty()) {
                const double lhs = c.ric(d.X1, d.Y1);
                const double hor = c.target_ric(1, d.X1, d.Y1);
                const double psi_term = -(m2 + k1) * (c.hess_psi(d.X1, d.Y1) + c.dpsi(d.X1) * c.dpsi(d.Y1));
                const double div = a_divergence(1, fr.v1, d.X1, d.Y1);
                const double h_tr = -3.0 * a_trace_right(1, fr.h1, d.X1, d.Y1);
                const double v_tr = a_trace_right(1, fr.v1, d.X1, d.Y1);
                acc[2].main.add(evaluation_residual(lhs, {hor, psi_term, div, h_tr, v_tr}, false), p);
            }
            if (skip[3].empty()) {
                const double lhs = c.ric(d.X2, d.Y2);
                const double hor = c.target_ric(2, d.X2, d.Y2);
                const double psi_term = -((k1 + m2) * gp + lap) * c.g(d.X2, d.Y2);
                const double div = a_divergence(2, fr.v2, d.X2, d.Y2);
                const double h_tr = -3.0 * a_trace_right(2, fr.h2, d.X2, d.Y2);
                const double v_tr = a_trace_right(2, fr.v2, d.X2, d.Y2);
                acc[3].main.add(evaluation_residual(lhs, {hor, psi_term, div, h_tr, v_tr}, false), p);
            }
        }
    }
    std::vector<RelationReport> out;
    const std::array<const char*, 4> ids = {"ric-phi-1", "ric-phi-2", "ric-phi-3", "ric-phi-4"};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!skip[i].empty()) {
            out.push_back(skipped(ids[i], skip[i], tiers[i]));
            continue;
        }
        const bool alt = i < 2;
        out.push_back(detail::finish(ids[i], acc[i], tiers[i], alt,
                                     i == 0 ? "opposite sign on the gradient and Laplacian terms"
                                            : "coefficient m1 - n1 + m2 on the gradient term"));
    }
    if (out[0].status != Status::skip) {
        const bool statement = out[0].residual < out[0].tolerance;
        const bool opposite = out[0].alternate_residual && *out[0].alternate_residual < out[0].tolerance;
        out[0].note = std::string("stated sign ") + (statement ? "holds" : "fails") + ", opposite sign " +
                      (opposite ? "holds" : "fails") + "; first-block and full gradient norms differ by " +
                      format_double(block_norm_gap);
    }
    return out;
}

// ---- consequences ------------------------------------------------------------------

struct EinsteinResult {
    double lambda = 0.0;
    double residual = 0.0;
    double scalar_spread = 0.0;
};

// sqrt(T_ij T^ij) for a symmetric 2-tensor.
inline double two_tensor_norm(const Mat& t, const Mat& g_inv) {
    return std::sqrt(std::max(0.0, (g_inv * t * g_inv * t).trace()));
}

inline EinsteinResult einstein_residual(const MetricField& m, std::span<const Vec> samples) {
    EinsteinResult r;
    if (samples.empty()) return r;
    std::vector<Mat> rics, gs;
    std::vector<double> scal;
    for (const Vec& p : samples) {
        const Mat g = m.metric_at(p);
        const Mat g_inv = inverse_metric(g);
        const Mat ric = ricci_from(riemann(m, p), g_inv);
        rics.push_back(ric);
        gs.push_back(g);
        scal.push_back(g_inv.cwiseProduct(ric).sum());
    }
    double sum = 0.0;
    for (double s : scal) sum += s / m.dim;
    r.lambda = sum / static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        r.residual = std::max(r.residual, two_tensor_norm(rics[i] - r.lambda * gs[i], inverse_metric(gs[i])) /
                                              std::max(1.0, std::abs(r.lambda)));
        for (std::size_t j = 0; j < samples.size(); ++j)
            r.scalar_spread = std::max(r.scalar_spread, std::abs(scal[i] - scal[j]));
    }
    return r;
}

inline double kulkarni_flatness(const MetricField& m, std::span<const Vec> samples, int quads_per_sample,
                                std::uint64_t seed = default_seed) {
    if (m.dim < 4) throw dimension_error("the four-vector criterion needs dimension at least 4");
    Rng rng(seed);
    double worst = 0.0;
    for (const Vec& p : samples) {
        const Mat g = m.metric_at(p);
        const Tensor4 r = riemann(m, p);
        for (int q = 0; q < quads_per_sample; ++q) {
            Mat seed_cols(m.dim, 4);
            for (int c = 0; c < 4; ++c) seed_cols.col(c) = rng.normal_vector(m.dim);
            const Mat e = gram_schmidt(g, seed_cols);
            if (e.cols() < 4) continue;
            auto sec = [&](int a, int b) { return sectional_from(r, g, e.col(a), e.col(b)); };
            worst = std::max(worst, std::abs(sec(0, 1) + sec(2, 3) - sec(0, 3) - sec(1, 2)));
        }
    }
    return worst;
}

inline double weyl_flatness(const MetricField& m, std::span<const Vec> samples) {
    double worst = 0.0;
    for (const Vec& p : samples) {
        const Mat g = m.metric_at(p);
        const WeylResult w = weyl_from(riemann(m, p), g);
        if (!w.defined) continue;
        worst = std::max(worst, tensor_norm(w.tensor, inverse_metric(g)));
    }
    return worst;
}

enum class SignSummary { nonnegative, nonpositive, mixed };

inline const char* to_string(SignSummary s) {
    switch (s) {
    case SignSummary::nonnegative: return "all >= 0";
    case SignSummary::nonpositive: return "all <= 0";
    case SignSummary::mixed: return "mixed";
    }
    return "?";
}

struct SubharmonicityReport {
    std::vector<double> values;  // Laplacian of psi plus |grad psi|^2, per sample
    SignSummary sign = SignSummary::nonnegative;
};

inline SubharmonicityReport subharmonicity_indicator(const WarpedSubmersion& ws, std::span<const Vec> samples) {
    SubharmonicityReport r;
    bool any_pos = false, any_neg = false;
    for (const Vec& p : samples) {
        const double lap = laplacian(ws.source.combined, ws.psi, p);
        const Vec grad = gradient(ws.source.combined, ws.psi, p);
        const double v = lap + ws.source.combined.inner(p, grad, grad);
        r.values.push_back(v);
        any_pos |= v > 0.0;
        any_neg |= v < 0.0;
    }
    r.sign = any_pos && any_neg ? SignSummary::mixed : (any_neg ? SignSummary::nonpositive : SignSummary::nonnegative);
    return r;
}

// X1(Lap_H1 psi) + 2 Hess psi(X1, grad psi) against div_H1(Hess psi + dpsi (x) dpsi)(X1), on Einstein sources.
inline RelationReport divergence_identity(const WarpedSubmersion& ws, std::span<const Vec> samples, int directions,
                                          std::uint64_t seed = default_seed) {
    const MetricField& M = ws.source.combined;
    const EinsteinResult e = einstein_residual(M, samples);
    const double einstein_tol = tolerance_for(ingredient_tier(ws, curvature));
    if (e.residual >= einstein_tol)
        return skipped("divergence-identity", "source is not Einstein (residual " + format_double(e.residual) + ")");
    Rng rng(seed);
    ResidualMax acc;
    const int n = M.dim;
    auto b_tensor = [&](const Vec& q) {
        const Vec d = differential(M, ws.psi, q);
        return Mat(hessian(M, ws.psi, q) + d * d.transpose());
    };
    auto h1_laplacian = [&](const Vec& q) { return horizontal_laplacian_psi(ws, q).first_horizontal; };
    for (const Vec& p : samples) {
        const Mat g = M.metric_at(p);
        const BlockFrame fr = block_frame(ws, p);
        if (fr.h1.cols() == 0) continue;
        const Tensor3 gamma = christoffel(M, p);
        const Mat b = b_tensor(p);
        std::vector<Mat> db(static_cast<std::size_t>(n));  // db[a] = d_a B
        for (int a = 0; a < n; ++a) {
            const double h = fd::step(fd::third_order, p[a]);
            Vec plus = p, minus = p;
            plus[a] += h;
            minus[a] -= h;
            db[static_cast<std::size_t>(a)] = (b_tensor(plus) - b_tensor(minus)) / (2.0 * h);
        }
        // (nabla_a B)_bc
        auto nabla_b = [&](int a, int bi, int ci) {
            double v = db[static_cast<std::size_t>(a)](bi, ci);
            for (int k = 0; k < n; ++k) v -= gamma(k, a, bi) * b(k, ci) + gamma(k, a, ci) * b(bi, k);
            return v;
        };
        const Mat hess = hessian(M, ws.psi, p);
        const Vec grad = gradient(M, ws.psi, p);
        for (int t = 0; t < directions; ++t) {
            const Vec x = rng.unit_in_span(g, fr.h1);
            const double h = fd::step(fd::third_order, p.lpNorm<Eigen::Infinity>()) / x.lpNorm<Eigen::Infinity>();
            const double directional = (h1_laplacian(p + h * x) - h1_laplacian(p - h * x)) / (2.0 * h);
            const double hess_term = 2.0 * x.dot(hess * grad);
            double div = 0.0;
            for (int j = 0; j < fr.h1.cols(); ++j) {
                const Vec ej = fr.h1.col(j);
                for (int a = 0; a < n; ++a)
                    for (int bi = 0; bi < n; ++bi)
                        for (int ci = 0; ci < n; ++ci) {
                            const double w = ej[a] * ej[bi] * x[ci];
                            if (w != 0.0) div += w * nabla_b(a, bi, ci);
                        }
            }
            acc.add(relative_residual(directional + hess_term - div, {directional, hess_term, div}), p);
        }
    }
    return make_report("divergence-identity", acc, Tier::finite_difference, third_derivative_tolerance);
}

} // namespace wpsub

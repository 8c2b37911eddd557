#pragma once

#include "geometry.hpp"

#include <Eigen/QR>

namespace wpsub {

// Explicit parametrization u -> embed(base, u) of the fiber through `base`, with embed(base, 0) = base.
struct FiberChart {
    int dim = 0;
    std::function<Vec(const Vec& base, const Vec& u)> embed;
    std::function<Mat(const Vec& base, const Vec& u)> jacobian;  // factor.dim x dim
};

// Intrinsic curvature of one fiber at its base point, lowered with the induced metric.
class FiberCurvature {
public:
    FiberCurvature() = default;

    FiberCurvature(const FiberChart& chart, const MetricField& factor, const Vec& base) : dim_(chart.dim) {
        j0_ = chart.jacobian(base, Vec::Zero(dim_));
        if (dim_ <= 1) return;  // curves and points carry no intrinsic curvature
        MetricField induced;
        induced.dim = dim_;
        induced.metric = [chart, factor, base](const Vec& u) {
            const Mat j = chart.jacobian(base, u);
            return Mat(j.transpose() * factor.metric_at(chart.embed(base, u)) * j);
        };
        induced.boundary_distance = [chart, factor, base](const Vec& u) {
            const Vec q = chart.embed(base, u);
            return factor.boundary_distance ? factor.boundary_distance(q) : 1.0;
        };
        r_ = riemann(induced, Vec::Zero(dim_));
        has_curvature_ = true;
    }

    // R(a, b, c, d) for factor-coordinate vectors tangent to the fiber.
    double operator()(const Vec& a, const Vec& b, const Vec& c, const Vec& d) const {
        if (!has_curvature_) return 0.0;
        return r_.apply(to_chart(a), to_chart(b), to_chart(c), to_chart(d));
    }

    int dim() const { return dim_; }

private:
    Vec to_chart(const Vec& v) const { return j0_.colPivHouseholderQr().solve(v); }

    int dim_ = 0;
    bool has_curvature_ = false;
    Mat j0_;
    Tensor4 r_;
};

} // namespace wpsub

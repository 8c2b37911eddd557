#pragma once

#include "frames.hpp"
#include "geometry.hpp"

#include <Eigen/QR>

#include <span>

namespace wpsub {

struct SmoothMap {
    MetricField source;
    MetricField target;
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> jacobian;  // optional, target.dim x source.dim

    Mat jacobian_at(const Vec& p) const {
        source.require_valid(p);
        if (jacobian) return jacobian(p);
        Mat j(target.dim, source.dim);
        for (int k = 0; k < source.dim; ++k) j.col(k) = central_difference(value, p, k, fd::first_order);
        return j;
    }

    int fiber_dim() const { return source.dim - target.dim; }
};

struct SubmersionFrame {
    Vec base;
    Mat vertical;    // columns, g-orthonormal, span ker(phi_*)
    Mat horizontal;  // columns, g-orthonormal, span the g-orthogonal complement
};

struct Projectors {
    Mat horizontal;
    Mat vertical;
};

// P_H = g^-1 J^T (J g^-1 J^T)^-1 J, P_V = I - P_H.
inline Projectors projectors(const SmoothMap& phi, const Vec& p) {
    const Mat g_inv = inverse_metric(phi.source.metric_at(p));
    const Mat j = phi.jacobian_at(p);
    const Mat gram = j * g_inv * j.transpose();
    Eigen::LLT<Mat> llt(gram);
    if (j.rows() > 0 && (llt.info() != Eigen::Success || llt.rcond() < 1e-12))
        throw not_a_submersion("Jacobian is rank deficient");
    const Mat ph = j.rows() == 0 ? Mat(Mat::Zero(phi.source.dim, phi.source.dim))
                                 : Mat(g_inv * j.transpose() * llt.solve(j));
    return {ph, Mat::Identity(phi.source.dim, phi.source.dim) - ph};
}

inline SubmersionFrame split_frame(const SmoothMap& phi, const Vec& p) {
    const int m = phi.source.dim, n = phi.target.dim;
    const Mat g = phi.source.metric_at(p);
    const Mat j = phi.jacobian_at(p);
    if (n > m) throw not_a_submersion("target dimension exceeds source dimension");
    Mat kernel(m, 0);
    if (n == 0) {
        kernel = Mat::Identity(m, m);
    } else {
        Eigen::ColPivHouseholderQR<Mat> qr(j.transpose());
        qr.setThreshold(1e-10);
        if (qr.rank() < n) throw not_a_submersion("Jacobian is rank deficient");
        const Mat q = qr.householderQ() * Mat::Identity(m, m);
        kernel = q.rightCols(m - n);
    }
    SubmersionFrame frame;
    frame.base = p;
    frame.vertical = gram_schmidt(g, kernel);
    normalize_signs(frame.vertical);
    if (n > 0) {
        frame.horizontal = gram_schmidt(g, inverse_metric(g) * j.transpose());
        normalize_signs(frame.horizontal);
    } else {
        frame.horizontal = Mat(m, 0);
    }
    if (frame.vertical.cols() != m - n || frame.horizontal.cols() != n)
        throw not_a_submersion("frame construction lost rank");
    return frame;
}

// Max over samples and horizontal frame pairs of |g(X,Y) - g'(phi_* X, phi_* Y)|.
inline double check_riemannian_submersion(const SmoothMap& phi, std::span<const Vec> samples) {
    double worst = 0.0;
    for (const Vec& p : samples) {
        const SubmersionFrame frame = split_frame(phi, p);
        const Mat g = phi.source.metric_at(p);
        const Mat gt = phi.target.metric_at(phi.value(p));
        const Mat j = phi.jacobian_at(p);
        const Mat& h = frame.horizontal;
        const Mat pushed = j * h;
        const Mat diff = h.transpose() * g * h - pushed.transpose() * gt * pushed;
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return worst;
}

// O'Neill tensors. Arguments are extended to fields by projecting their constant-component
// extensions onto the vertical / horizontal distributions at nearby points.
inline Vec oneill_T(const SmoothMap& phi, const Vec& p, const Vec& e, const Vec& f) {
    const Projectors pr = projectors(phi, p);
    const Vec ve = pr.vertical * e;
    auto vertical_f = [&](const Vec& q) { return Vec(projectors(phi, q).vertical * f); };
    auto horizontal_f = [&](const Vec& q) { return Vec(projectors(phi, q).horizontal * f); };
    return pr.horizontal * cov_deriv_field(phi.source, p, ve, vertical_f) +
           pr.vertical * cov_deriv_field(phi.source, p, ve, horizontal_f);
}

inline Vec oneill_A(const SmoothMap& phi, const Vec& p, const Vec& e, const Vec& f) {
    const Projectors pr = projectors(phi, p);
    const Vec he = pr.horizontal * e;
    auto vertical_f = [&](const Vec& q) { return Vec(projectors(phi, q).vertical * f); };
    auto horizontal_f = [&](const Vec& q) { return Vec(projectors(phi, q).horizontal * f); };
    return pr.vertical * cov_deriv_field(phi.source, p, he, horizontal_f) +
           pr.horizontal * cov_deriv_field(phi.source, p, he, vertical_f);
}

// Tensorial derivative (nabla_W A)_X Y = nabla_W (A_X Y) - A_{nabla_W X} Y - A_X nabla_W Y,
// with X, Y extended by constant components. Outer differences use the second-order step.
inline Vec oneill_A_derivative(const SmoothMap& phi, const Vec& p, const Vec& w, const Vec& x, const Vec& y) {
    auto a_xy = [&](const Vec& q) { return oneill_A(phi, q, x, y); };
    const Tensor3 gamma = christoffel(phi.source, p);
    const Vec dx = gamma.contract(w, x);
    const Vec dy = gamma.contract(w, y);
    return cov_deriv_field(phi.source, p, w, a_xy, fd::second_order) - oneill_A(phi, p, dx, y) -
           oneill_A(phi, p, x, dy);
}

struct FiberReport {
    Vec mean_curvature;
    double umbilical_residual = 0.0;
    double geodesic_residual = 0.0;
};

inline FiberReport fiber_report(const SmoothMap& phi, const Vec& p) {
    const SubmersionFrame frame = split_frame(phi, p);
    const Mat g = phi.source.metric_at(p);
    const int k = static_cast<int>(frame.vertical.cols());
    FiberReport report;
    report.mean_curvature = Vec::Zero(phi.source.dim);
    if (k == 0) return report;
    std::vector<std::vector<Vec>> t(static_cast<std::size_t>(k), std::vector<Vec>(static_cast<std::size_t>(k)));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) t[a][b] = oneill_T(phi, p, frame.vertical.col(a), frame.vertical.col(b));
    for (int a = 0; a < k; ++a) report.mean_curvature += t[a][a];
    report.mean_curvature /= k;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            const Vec umb = t[a][b] - (a == b ? 1.0 : 0.0) * report.mean_curvature;
            report.umbilical_residual = std::max(report.umbilical_residual, g_norm(g, umb));
            report.geodesic_residual = std::max(report.geodesic_residual, g_norm(g, t[a][b]));
        }
    return report;
}

} // namespace wpsub

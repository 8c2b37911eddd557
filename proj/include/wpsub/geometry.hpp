#pragma once

#include "metric_field.hpp"

#include <Eigen/Cholesky>

namespace wpsub {

inline constexpr double max_condition_number = 1e12;

// Inverse of a metric matrix; throws when it is not positive definite or badly conditioned.
inline Mat inverse_metric(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw non_invertible_metric("metric is not positive definite");
    if (llt.rcond() * max_condition_number < 1.0) throw non_invertible_metric("metric condition number exceeds 1e12");
    return llt.solve(Mat::Identity(g.rows(), g.cols()));
}

inline Tensor3 metric_derivatives(const MetricField& m, const Vec& p) {
    m.require_valid(p);
    if (m.d_metric) return m.d_metric(p);
    const int n = m.dim;
    Tensor3 d(n);
    for (int k = 0; k < n; ++k) {
        const double h = fd::step(fd::first_order, p[k]);
        Vec plus = p, minus = p;
        plus[k] += h;
        minus[k] -= h;
        const Mat dg = (m.metric_at(plus) - m.metric_at(minus)) / (2.0 * h);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d(k, i, j) = dg(i, j);
    }
    return d;
}

namespace detail {

// Gamma(k, i, j) = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
inline Tensor3 christoffel_from(const Mat& g_inv, const Tensor3& dg) {
    const int n = static_cast<int>(g_inv.rows());
    Tensor3 lowered(n);  // Gamma_{l i j}
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = 0.5 * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                lowered(l, i, j) = v;
                lowered(l, j, i) = v;
            }
    Tensor3 gamma(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += g_inv(k, l) * lowered(l, i, j);
                gamma(k, i, j) = s;
                gamma(k, j, i) = s;
            }
    return gamma;
}

} // namespace detail

inline Tensor3 christoffel(const MetricField& m, const Vec& p) {
    return detail::christoffel_from(inverse_metric(m.metric_at(p)), metric_derivatives(m, p));
}

// dGamma(l, k, i, j) = d_l Gamma^k_ij
inline Tensor4 christoffel_derivatives(const MetricField& m, const Vec& p) {
    const int n = m.dim;
    Tensor4 out(n);
    if (m.has_second_derivatives()) {
        m.require_valid(p);
        const Mat g_inv = inverse_metric(m.metric(p));
        const Tensor3 dg = m.d_metric(p);
        const Tensor4 ddg = m.dd_metric(p);
        const Tensor3 gamma = detail::christoffel_from(g_inv, dg);
        for (int l = 0; l < n; ++l) {
            // d_l Gamma^k_ij = -g^{ka} d_l g_ab Gamma^b_ij + 1/2 g^{ka} (d_l d_i g_ja + d_l d_j g_ia - d_l d_a g_ij)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) {
                        double s = 0.0;
                        for (int a = 0; a < n; ++a) {
                            double t = 0.5 * (ddg(l, i, j, a) + ddg(l, j, i, a) - ddg(l, a, i, j));
                            for (int b = 0; b < n; ++b) t -= dg(l, a, b) * gamma(b, i, j);
                            s += g_inv(k, a) * t;
                        }
                        out(l, k, i, j) = s;
                        out(l, k, j, i) = s;
                    }
        }
        return out;
    }
    for (int l = 0; l < n; ++l) {
        const double h = fd::step(fd::second_order, p[l]);
        Vec plus = p, minus = p;
        plus[l] += h;
        minus[l] -= h;
        const Tensor3 gp = christoffel(m, plus);
        const Tensor3 gm = christoffel(m, minus);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out(l, k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
    }
    return out;
}

// R(i, j, k, l) = g(R(d_i, d_j) d_k, d_l) with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
// The round unit sphere has sectional curvature +1 in this convention.
inline Tensor4 riemann(const MetricField& m, const Vec& p) {
    const int n = m.dim;
    const Mat g = m.metric_at(p);
    const Tensor3 gamma = christoffel(m, p);
    const Tensor4 dgamma = christoffel_derivatives(m, p);
    // endo(a, i, j, k): component a of R(d_i, d_j) d_k
    Tensor4 endo(n);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = dgamma(i, a, j, k) - dgamma(j, a, i, k);
                    for (int b = 0; b < n; ++b) v += gamma(a, i, b) * gamma(b, j, k) - gamma(a, j, b) * gamma(b, i, k);
                    endo(a, i, j, k) = v;
                }
    Tensor4 r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = 0.0;
                    for (int a = 0; a < n; ++a) v += g(l, a) * endo(a, i, j, k);
                    r(i, j, k, l) = v;
                }
    return r;
}

// Ric(j, k) = g^{il} R(i, j, k, l)
inline Mat ricci_from(const Tensor4& r, const Mat& g_inv) {
    const int n = r.dim();
    Mat ric = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l) s += g_inv(i, l) * r(i, j, k, l);
            ric(j, k) = s;
        }
    return ric;
}

inline Mat ricci(const MetricField& m, const Vec& p) {
    return ricci_from(riemann(m, p), inverse_metric(m.metric_at(p)));
}

inline double scalar_curvature(const MetricField& m, const Vec& p) {
    const Mat g_inv = inverse_metric(m.metric_at(p));
    return (g_inv.cwiseProduct(ricci_from(riemann(m, p), g_inv))).sum();
}

inline double plane_gram(const Mat& g, const Vec& x, const Vec& y) {
    const double gxy = x.dot(g * y);
    return x.dot(g * x) * y.dot(g * y) - gxy * gxy;
}

inline double sectional_from(const Tensor4& r, const Mat& g, const Vec& x, const Vec& y) {
    const double xx = x.dot(g * x), yy = y.dot(g * y);
    const double gram = plane_gram(g, x, y);
    if (gram <= 1e-12 * xx * yy) throw degenerate_plane("sectional curvature requested on a degenerate plane");
    return r.apply(x, y, y, x) / gram;
}

inline double sectional(const MetricField& m, const Vec& p, const Vec& x, const Vec& y) {
    return sectional_from(riemann(m, p), m.metric_at(p), x, y);
}

struct WeylResult {
    Tensor4 tensor;
    bool defined = true;  // false when dim <= 3; tensor is then exactly zero
};

// W = R - P (.) g, P the Schouten tensor and (.) the Kulkarni-Nomizu product, laid out to match
// R(i, j, k, l) = g(R(d_i, d_j) d_k, d_l).
inline WeylResult weyl_from(const Tensor4& r, const Mat& g) {
    const int n = r.dim();
    if (n <= 3) return {Tensor4(n), false};
    const Mat g_inv = inverse_metric(g);
    const Mat ric = ricci_from(r, g_inv);
    const double scal = g_inv.cwiseProduct(ric).sum();
    const Mat schouten = (ric - scal / (2.0 * (n - 1)) * g) / (n - 2);
    Tensor4 w(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    w(i, j, k, l) = r(i, j, k, l) - (schouten(j, k) * g(i, l) + schouten(i, l) * g(j, k) -
                                                     schouten(i, k) * g(j, l) - schouten(j, l) * g(i, k));
    return {std::move(w), true};
}

inline WeylResult weyl(const MetricField& m, const Vec& p) { return weyl_from(riemann(m, p), m.metric_at(p)); }

// sqrt(T_{ijkl} T^{ijkl})
inline double tensor_norm(const Tensor4& t, const Mat& g_inv) {
    const int n = t.dim();
    // raise all four slots one at a time
    Tensor4 cur = t;
    for (int slot = 0; slot < 4; ++slot) {
        Tensor4 next(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        double s = 0.0;
                        for (int e = 0; e < n; ++e) {
                            int idx[4] = {a, b, c, d};
                            const int target = idx[slot];
                            idx[slot] = e;
                            s += g_inv(target, e) * cur(idx[0], idx[1], idx[2], idx[3]);
                        }
                        next(a, b, c, d) = s;
                    }
        cur = std::move(next);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < t.data().size(); ++i) s += t.data()[i] * cur.data()[i];
    return std::sqrt(std::max(0.0, s));
}

// ---- scalar fields --------------------------------------------------------

inline Vec differential(const MetricField& m, const ScalarField& s, const Vec& p) {
    m.require_valid(p);
    if (s.grad) return s.grad(p);
    Vec d(m.dim);
    for (int k = 0; k < m.dim; ++k) d[k] = central_difference_scalar(s.value, p, k, fd::first_order);
    return d;
}

inline Mat second_partials(const MetricField& m, const ScalarField& s, const Vec& p) {
    m.require_valid(p);
    if (s.hess) return s.hess(p);
    const int n = m.dim;
    Mat h(n, n);
    if (s.grad) {
        for (int k = 0; k < n; ++k) h.col(k) = central_difference(s.grad, p, k, fd::first_order);
    } else {
        auto first = [&](const Vec& q) {
            Vec d(n);
            for (int k = 0; k < n; ++k) d[k] = central_difference_scalar(s.value, q, k, fd::second_order);
            return d;
        };
        for (int k = 0; k < n; ++k) h.col(k) = central_difference(first, p, k, fd::second_order);
    }
    return 0.5 * (h + h.transpose());
}

inline Vec gradient(const MetricField& m, const ScalarField& s, const Vec& p) {
    return inverse_metric(m.metric_at(p)) * differential(m, s, p);
}

// Hess(i, j) = d_i d_j s - Gamma^k_ij d_k s
inline Mat hessian(const MetricField& m, const ScalarField& s, const Vec& p) {
    const Mat dd = second_partials(m, s, p);
    const Vec d = differential(m, s, p);
    const Tensor3 gamma = christoffel(m, p);
    Mat h = dd;
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j)
            for (int k = 0; k < m.dim; ++k) h(i, j) -= gamma(k, i, j) * d[k];
    return h;
}

inline double laplacian(const MetricField& m, const ScalarField& s, const Vec& p) {
    return inverse_metric(m.metric_at(p)).cwiseProduct(hessian(m, s, p)).sum();
}

// (nabla_X V)^k = X(V^k) + Gamma^k_ij X^i V^j, with X(V) by central differences along p + t X.
inline Vec cov_deriv_field(const MetricField& m, const Vec& p, const Vec& direction,
                           const std::function<Vec(const Vec&)>& field, double base_step = fd::first_order) {
    m.require_valid(p);
    const double scale = direction.lpNorm<Eigen::Infinity>();
    const Vec v = field(p);
    Vec out = christoffel(m, p).contract(direction, v);
    if (scale == 0.0) return out;
    const double h = fd::step(base_step, p.lpNorm<Eigen::Infinity>()) / scale;
    const Vec plus = p + h * direction, minus = p - h * direction;
    if (!m.valid(plus) || !m.valid(minus)) throw boundary_error("derivative stencil leaves the chart");
    out += (field(plus) - field(minus)) / (2.0 * h);
    return out;
}

} // namespace wpsub

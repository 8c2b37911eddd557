#pragma once

#include "errors.hpp"
#include "tensor.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace wpsub {

// Finite-difference step sizes, scaled per coordinate.
namespace fd {
inline constexpr double first_order = 1e-5;
inline constexpr double second_order = 1e-4;
inline constexpr double third_order = 1e-3;

inline double step(double base, double x) { return base * std::max(1.0, std::abs(x)); }
} // namespace fd

// A coordinate chart carrying a Riemannian metric. Optional evaluators are empty
// std::functions when absent.
struct MetricField {
    int dim = 0;
    std::function<Mat(const Vec&)> metric;
    // d_metric(p)(k, i, j) = d_k g_ij
    std::function<Tensor3(const Vec&)> d_metric;
    // dd_metric(p)(l, k, i, j) = d_l d_k g_ij
    std::function<Tensor4(const Vec&)> dd_metric;
    // Positive inside the chart, approximately the distance to its boundary.
    std::function<double(const Vec&)> boundary_distance;

    bool has_first_derivatives() const { return static_cast<bool>(d_metric); }
    bool has_second_derivatives() const { return d_metric && dd_metric; }

    bool valid(const Vec& p) const {
        return p.size() == dim && (!boundary_distance || boundary_distance(p) > 0.0);
    }

    void require_valid(const Vec& p) const {
        if (p.size() != dim)
            throw dimension_error("point has " + std::to_string(p.size()) +
                                  " coordinates, chart has dimension " + std::to_string(dim));
        if (!valid(p)) throw boundary_error("point outside chart domain");
    }

    Mat metric_at(const Vec& p) const {
        require_valid(p);
        return metric(p);
    }

    double inner(const Vec& p, const Vec& u, const Vec& v) const { return u.dot(metric_at(p) * v); }

    // Drop analytic derivative evaluators so every derivative goes through finite differences.
    MetricField without_derivatives() const {
        MetricField m = *this;
        m.d_metric = nullptr;
        m.dd_metric = nullptr;
        return m;
    }
};

struct ScalarField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;  // coordinate differential d_i s
    std::function<Mat(const Vec&)> hess;  // coordinate second derivatives d_i d_j s

    bool has_grad() const { return static_cast<bool>(grad); }
    bool has_hess() const { return static_cast<bool>(hess); }

    ScalarField without_derivatives() const { return ScalarField{value, nullptr, nullptr}; }

    static ScalarField from_value(std::function<double(const Vec&)> fn) { return {std::move(fn), nullptr, nullptr}; }

    static ScalarField constant(int dim, double c) {
        return {[c](const Vec&) { return c; }, [dim](const Vec&) { return Vec(Vec::Zero(dim)); },
                [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); }};
    }
};

// Central difference of a vector-valued function along coordinate k.
template <class F>
auto central_difference(const F& fn, const Vec& p, int k, double base_step) {
    const double h = fd::step(base_step, p[k]);
    Vec plus = p, minus = p;
    plus[k] += h;
    minus[k] -= h;
    return ((fn(plus) - fn(minus)) / (2.0 * h)).eval();
}

inline double central_difference_scalar(const std::function<double(const Vec&)>& fn, const Vec& p,
                                        int k, double base_step) {
    const double h = fd::step(base_step, p[k]);
    Vec plus = p, minus = p;
    plus[k] += h;
    minus[k] -= h;
    return (fn(plus) - fn(minus)) / (2.0 * h);
}

// ---- metric builders -------------------------------------------------------

inline MetricField euclidean(int n) {
    MetricField m;
    m.dim = n;
    m.metric = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
    m.d_metric = [n](const Vec&) { return Tensor3(n); };
    m.dd_metric = [n](const Vec&) { return Tensor4(n); };
    return m;
}

// g = diag(entries[0](p), ..., entries[n-1](p)). Analytic derivatives are composed
// when every entry has grad and hess.
inline MetricField diagonal_metric(std::vector<ScalarField> entries,
                                   std::function<double(const Vec&)> boundary = nullptr) {
    const int n = static_cast<int>(entries.size());
    MetricField m;
    m.dim = n;
    m.boundary_distance = std::move(boundary);
    m.metric = [entries, n](const Vec& p) {
        Mat g = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) g(i, i) = entries[i].value(p);
        return g;
    };
    const bool analytic = std::all_of(entries.begin(), entries.end(),
                                      [](const ScalarField& s) { return s.has_grad() && s.has_hess(); });
    if (analytic) {
        m.d_metric = [entries, n](const Vec& p) {
            Tensor3 d(n);
            for (int i = 0; i < n; ++i) {
                const Vec gi = entries[i].grad(p);
                for (int k = 0; k < n; ++k) d(k, i, i) = gi[k];
            }
            return d;
        };
        m.dd_metric = [entries, n](const Vec& p) {
            Tensor4 dd(n);
            for (int i = 0; i < n; ++i) {
                const Mat hi = entries[i].hess(p);
                for (int l = 0; l < n; ++l)
                    for (int k = 0; k < n; ++k) dd(l, k, i, i) = hi(l, k);
            }
            return dd;
        };
    }
    return m;
}

// g = conformal(p) * identity.
inline MetricField conformally_flat(int n, ScalarField conformal,
                                    std::function<double(const Vec&)> boundary = nullptr) {
    std::vector<ScalarField> entries(static_cast<std::size_t>(n), conformal);
    return diagonal_metric(std::move(entries), std::move(boundary));
}

} // namespace wpsub

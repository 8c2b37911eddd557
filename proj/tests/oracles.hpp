#pragma once

// Independent reference computations used only by the tests. They deliberately avoid the
// library's code paths: plain loops, their own step sizes, closed forms where they exist.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Point = std::vector<double>;
using MetricFn = std::function<std::vector<std::vector<double>>(const Point&)>;

inline std::vector<std::vector<double>> invert2(const std::vector<std::vector<double>>& g) {
    const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    return {{g[1][1] / det, -g[0][1] / det}, {-g[1][0] / det, g[0][0] / det}};
}

// Christoffel symbols of a 2D metric by 4th-order central differences.
inline double christoffel2(const MetricFn& metric, const Point& p, int k, int i, int j) {
    const double h = 1e-3;
    auto dg = [&](int a, int b, int c) {  // d_a g_bc
        Point p1 = p, p2 = p, m1 = p, m2 = p;
        p1[a] += h;
        p2[a] += 2 * h;
        m1[a] -= h;
        m2[a] -= 2 * h;
        return (-metric(p2)[b][c] + 8 * metric(p1)[b][c] - 8 * metric(m1)[b][c] + metric(m2)[b][c]) / (12 * h);
    };
    const auto gi = invert2(metric(p));
    double s = 0.0;
    for (int l = 0; l < 2; ++l) s += 0.5 * gi[k][l] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
    return s;
}

// Gauss curvature of an orthogonal 2D metric E du^2 + G dv^2 (Brioschi), by finite differences.
inline double gauss_curvature_orthogonal(const std::function<double(const Point&)>& E,
                                         const std::function<double(const Point&)>& G, const Point& p) {
    const double h = 1e-4;
    auto root = [&](const Point& q) { return std::sqrt(E(q) * G(q)); };
    auto d = [&](const std::function<double(const Point&)>& fn, const Point& q, int a) {
        Point qp = q, qm = q;
        qp[a] += h;
        qm[a] -= h;
        return (fn(qp) - fn(qm)) / (2 * h);
    };
    auto term_u = [&](const Point& q) { return d(G, q, 0) / root(q); };
    auto term_v = [&](const Point& q) { return d(E, q, 1) / root(q); };
    return -(d(term_u, p, 0) + d(term_v, p, 1)) / (2 * root(p));
}

} // namespace oracle

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace wpsub {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense n x n x n array, index order (a, b, c).
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }

    double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
    double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }

    // Contract the last two slots with u and v: result_a = T(a, b, c) u^b v^c.
    Vec contract(const Vec& u, const Vec& v) const {
        Vec out = Vec::Zero(n_);
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b) {
                if (u[b] == 0.0) continue;
                for (int c = 0; c < n_; ++c) out[a] += (*this)(a, b, c) * u[b] * v[c];
            }
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }

    Tensor3& operator+=(const Tensor3& o) {
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Tensor3& operator*=(double s) {
        for (double& x : data_) x *= s;
        return *this;
    }

private:
    std::size_t index(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * n_ + b) * n_ + c;
    }

    int n_ = 0;
    std::vector<double> data_;
};

// Dense n^4 array, index order (a, b, c, d).
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

    int dim() const { return n_; }

    double& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }
    double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }

    // Full contraction T(a, b, c, d) x^a y^b z^c w^d.
    double apply(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const {
        double s = 0.0;
        for (int a = 0; a < n_; ++a) {
            if (x[a] == 0.0) continue;
            for (int b = 0; b < n_; ++b) {
                if (y[b] == 0.0) continue;
                const double xy = x[a] * y[b];
                for (int c = 0; c < n_; ++c) {
                    if (z[c] == 0.0) continue;
                    double inner = 0.0;
                    for (int d = 0; d < n_; ++d) inner += (*this)(a, b, c, d) * w[d];
                    s += xy * z[c] * inner;
                }
            }
        }
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t index(int a, int b, int c, int d) const {
        return ((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d;
    }

    int n_ = 0;
    std::vector<double> data_;
};

} // namespace wpsub

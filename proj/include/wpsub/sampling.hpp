#pragma once

#include "frames.hpp"
#include "metric_field.hpp"

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

namespace wpsub {

inline constexpr std::uint64_t default_seed = 42;
inline constexpr const char* seed_environment_variable = "WPSUB_SEED";

// Default seed, overridable through the WPSUB_SEED environment variable.
inline std::uint64_t configured_seed() {
    if (const char* env = std::getenv(seed_environment_variable)) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(seed_environment_variable) + " is not an unsigned integer");
        }
    }
    return default_seed;
}

struct Box {
    Vec lo;
    Vec hi;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine_); }

    Vec normal_vector(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    // Uniform point in the box, rejecting points within `margin` of the chart boundary.
    Vec point_in(const Box& box, const MetricField& chart, double margin = 1e-2) {
        for (int attempt = 0; attempt < 10000; ++attempt) {
            Vec p(box.lo.size());
            for (int i = 0; i < p.size(); ++i) p[i] = uniform(box.lo[i], box.hi[i]);
            if (!chart.boundary_distance || chart.boundary_distance(p) > margin) return p;
        }
        throw std::runtime_error("sampling box does not intersect the chart interior");
    }

    // Standard normal combination of the columns, normalized in g. Zero when there are no columns.
    Vec unit_in_span(const Mat& g, const Mat& columns) {
        if (columns.cols() == 0) return Vec::Zero(columns.rows());
        Vec v = columns * normal_vector(static_cast<int>(columns.cols()));
        const double n = g_norm(g, v);
        return n > 0.0 ? Vec(v / n) : v;
    }

    Vec unit_vector(const Mat& g) { return unit_in_span(g, Mat::Identity(g.rows(), g.cols())); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace wpsub

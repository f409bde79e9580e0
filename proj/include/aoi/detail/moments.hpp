#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace aoi::detail {

/// Streaming means and co-moments of a D-dimensional sample (Welford, Chan merge).
template <std::size_t D>
struct CoMoments {
    std::uint64_t n = 0;
    std::array<double, D> mean{};
    std::array<std::array<double, D>, D> comoment{};

    void add(const std::array<double, D>& x) {
        ++n;
        std::array<double, D> delta{};
        for (std::size_t i = 0; i < D; ++i) {
            delta[i] = x[i] - mean[i];
            mean[i] += delta[i] / static_cast<double>(n);
        }
        for (std::size_t i = 0; i < D; ++i)
            for (std::size_t j = 0; j < D; ++j) comoment[i][j] += delta[i] * (x[j] - mean[j]);
    }

    void merge(const CoMoments& other) {
        if (other.n == 0) return;
        if (n == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(other.n);
        const double total = na + nb;
        std::array<double, D> delta{};
        for (std::size_t i = 0; i < D; ++i) delta[i] = other.mean[i] - mean[i];
        for (std::size_t i = 0; i < D; ++i)
            for (std::size_t j = 0; j < D; ++j)
                comoment[i][j] += other.comoment[i][j] + delta[i] * delta[j] * na * nb / total;
        for (std::size_t i = 0; i < D; ++i) mean[i] += delta[i] * nb / total;
        n += other.n;
    }

    double covariance(std::size_t i, std::size_t j) const {
        return n > 1 ? comoment[i][j] / static_cast<double>(n - 1) : 0.0;
    }

    /// Standard error of mean[i].
    double std_error(std::size_t i) const {
        return n > 1 ? std::sqrt(std::max(0.0, covariance(i, i)) / static_cast<double>(n)) : 0.0;
    }
};

/// Per-component streaming mean and variance of a vector-valued sample.
struct VectorMoments {
    std::uint64_t n = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit VectorMoments(std::size_t dim = 0) : mean(dim, 0.0), m2(dim, 0.0) {}

    void add(const std::vector<double>& x) {
        ++n;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double delta = x[i] - mean[i];
            mean[i] += delta / static_cast<double>(n);
            m2[i] += delta * (x[i] - mean[i]);
        }
    }

    void merge(const VectorMoments& other) {
        if (other.n == 0) return;
        if (n == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(other.n);
        const double total = na + nb;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double delta = other.mean[i] - mean[i];
            m2[i] += other.m2[i] + delta * delta * na * nb / total;
            mean[i] += delta * nb / total;
        }
        n += other.n;
    }

    double std_error(std::size_t i) const {
        return n > 1 ? std::sqrt(std::max(0.0, m2[i]) / static_cast<double>(n - 1) / static_cast<double>(n))
                     : 0.0;
    }
};

}  // namespace aoi::detail

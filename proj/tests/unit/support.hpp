#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mars/spline.hpp"

namespace test {

// Gauss-Jordan inverse with partial pivoting; small dense oracle only.
inline std::vector<std::vector<double>> inverse(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        }
        std::swap(a[c], a[p]);
        std::swap(inv[c], inv[p]);
        const double d = a[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] /= d;
            inv[c][k] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0) continue;
            const double f = a[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

inline double inf_norm(const std::vector<std::vector<double>>& a) {
    double best = 0.0;
    for (const auto& row : a) {
        double s = 0.0;
        for (double v : row) s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

// Knots with every interval in [r h, h], starting at 0.
inline std::vector<double> regular_knots(std::mt19937_64& rng, std::size_t n, double r, double h) {
    std::uniform_real_distribution<double> d(r * h, h);
    std::vector<double> l{0.0};
    for (std::size_t i = 0; i < n; ++i) l.push_back(l.back() + d(rng));
    return l;
}

}  // namespace test

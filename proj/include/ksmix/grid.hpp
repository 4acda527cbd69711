#pragma once
#include <array>
#include <cstdint>

namespace ksmix {

// Uniform periodic grid on the unit torus [-1/2, 1/2)^d with n nodes per axis.
// Node j has coordinate x_j = -1/2 + j*h, h = 1/n.  Integer modes run over
// [-n/2, n/2) per axis; the real transform stores the non-negative half of the
// last axis only (n/2+1 columns).
struct Grid {
    int d = 0;              // dimension, 1..3
    int n = 0;              // nodes per axis, even, >= 8
    double h = 0.0;         // 1/n
    std::int64_t cells = 0; // n^d real samples
    std::int64_t specn = 0; // n^(d-1) * (n/2+1) stored complex modes

    friend bool operator==(const Grid&, const Grid&) = default;
};

Grid make_grid(int d, int n);

// Coordinate of a node multi-index (unused axes must be 0 and map to 0).
std::array<double, 3> node_coord(const Grid& g, const std::array<int, 3>& j);

// Linear row-major index of a node multi-index, wrapping each axis.
std::int64_t node_index(const Grid& g, const std::array<int, 3>& j);

// Visit every real-space node: fn(linear_index, x) with x the coordinate array.
template <class F>
void for_each_node(const Grid& g, F&& fn) {
    const int n = g.n;
    const double h = g.h;
    std::int64_t idx = 0;
    if (g.d == 1) {
        for (int j0 = 0; j0 < n; ++j0)
            fn(idx++, std::array<double, 3>{-0.5 + j0 * h, 0.0, 0.0});
    } else if (g.d == 2) {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1)
                fn(idx++, std::array<double, 3>{-0.5 + j0 * h, -0.5 + j1 * h, 0.0});
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1)
                for (int j2 = 0; j2 < n; ++j2)
                    fn(idx++, std::array<double, 3>{-0.5 + j0 * h, -0.5 + j1 * h, -0.5 + j2 * h});
    }
}

// Visit every stored half-spectrum mode: fn(linear_index, k) with k the signed
// integer mode (last axis runs 0..n/2, earlier axes -n/2..n/2-1).
template <class F>
void for_each_mode(const Grid& g, F&& fn) {
    const int n = g.n;
    const int nc = n / 2 + 1;
    auto sgn = [n](int j) { return j <= n / 2 ? j : j - n; };
    std::int64_t idx = 0;
    if (g.d == 1) {
        for (int j0 = 0; j0 < nc; ++j0)
            fn(idx++, std::array<int, 3>{j0, 0, 0});
    } else if (g.d == 2) {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < nc; ++j1)
                fn(idx++, std::array<int, 3>{sgn(j0), j1, 0});
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1)
                for (int j2 = 0; j2 < nc; ++j2)
                    fn(idx++, std::array<int, 3>{sgn(j0), sgn(j1), j2});
    }
}

// Parseval weight of a stored mode: interior last-axis columns represent a
// conjugate pair, the 0 and n/2 columns represent themselves only.
inline double mode_weight(const Grid& g, const std::array<int, 3>& k) {
    const int klast = k[g.d - 1];
    return (klast == 0 || klast == g.n / 2) ? 1.0 : 2.0;
}

}  // namespace ksmix

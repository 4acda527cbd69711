#include "ksmix/grid.hpp"

#include <cmath>
#include <string>

#include "ksmix/errors.hpp"

namespace ksmix {

Grid make_grid(int d, int n) {
    if (d < 1 || d > 3)
        throw config_error("make_grid: dimension d must be 1, 2 or 3 (got " + std::to_string(d) + ")");
    if (n < 8)
        throw config_error("make_grid: n must be at least 8 (got " + std::to_string(n) + ")");
    if (n % 2 != 0)
        throw config_error("make_grid: n must be even so modes pair up across [-n/2, n/2) (got " +
                           std::to_string(n) + ")");
    Grid g;
    g.d = d;
    g.n = n;
    g.h = 1.0 / n;
    g.cells = 1;
    for (int a = 0; a < d; ++a) g.cells *= n;
    g.specn = (g.cells / n) * (n / 2 + 1);
    return g;
}

std::array<double, 3> node_coord(const Grid& g, const std::array<int, 3>& j) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.d; ++a) {
        int ja = ((j[a] % g.n) + g.n) % g.n;
        x[a] = -0.5 + ja * g.h;
    }
    return x;
}

std::int64_t node_index(const Grid& g, const std::array<int, 3>& j) {
    std::int64_t idx = 0;
    for (int a = 0; a < g.d; ++a) {
        int ja = ((j[a] % g.n) + g.n) % g.n;
        idx = idx * g.n + ja;
    }
    return idx;
}

}  // namespace ksmix

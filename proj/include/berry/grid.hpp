#pragma once

#include <cstddef>
#include <vector>

#include "berry/specfun.hpp"

namespace berry {

/// Axis-aligned lattice x_ij = origin + (i, j) * spacing, 0 <= i < nx, 0 <= j < ny.
struct Grid {
    Vec2 origin{0.0, 0.0};
    double spacing = 1.0;
    int nx = 0;
    int ny = 0;

    Vec2 point(int i, int j) const { return {origin[0] + i * spacing, origin[1] + j * spacing}; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    bool empty() const { return nx <= 0 || ny <= 0; }
};

/// Node lattice with spacing at most `delta` whose corners are lo and hi.
Grid node_grid(Vec2 lo, Vec2 hi, double delta);

/// Cell-centred lattice with spacing at most `delta` covering [lo, hi].
Grid midpoint_grid(Vec2 lo, Vec2 hi, double delta);

/// Field samples on a grid, x index fastest.
struct GridField {
    Grid grid;
    std::vector<double> value;
    std::vector<double> d1;
    std::vector<double> d2;

    bool has_gradient() const { return !d1.empty(); }
    double operator()(int i, int j) const { return value[grid.index(i, j)]; }
};

} // namespace berry

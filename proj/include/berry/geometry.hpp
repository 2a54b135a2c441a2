#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "berry/grid.hpp"
#include "berry/specfun.hpp"

namespace berry {

struct Rectangle {
    Vec2 corner;
    Vec2 widths;
};

struct Disk {
    Vec2 center;
    double radius;
};

/// Simple polygon, counterclockwise vertex order.
struct Polygon {
    std::vector<Vec2> vertices;
};

class Domain {
public:
    using Shape = std::variant<Rectangle, Disk, Polygon>;

    Domain() = default;
    explicit Domain(Shape shape);

    static Domain rectangle(double x0, double y0, double w, double h);
    static Domain disk(double cx, double cy, double radius);
    /// Clockwise input is reoriented; self-intersections are rejected.
    static Domain polygon(std::vector<Vec2> vertices);

    const Shape& shape() const { return shape_; }
    bool is_rectangle() const { return std::holds_alternative<Rectangle>(shape_); }
    bool is_disk() const { return std::holds_alternative<Disk>(shape_); }
    bool is_polygon() const { return std::holds_alternative<Polygon>(shape_); }

    bool contains(Vec2 p) const;
    /// Lower-left and upper-right corners of the bounding box.
    std::pair<Vec2, Vec2> bounds() const;
    /// Vertices of the boundary; disks use `disk_vertices` points.
    std::vector<Vec2> outline(int disk_vertices = 1024) const;
    /// "rectangle x0 y0 w h", "disk cx cy r" or "polygon x1 y1 ...".
    std::string describe() const;

private:
    Shape shape_;
};

Domain parse_domain(const std::string& text);

double area(const Domain& D);
double diam(const Domain& D);
double intersection_area(const Domain& A, const Domain& B);
/// Diameter of A ∩ B (0 when the intersection has no interior).
double intersection_diam(const Domain& A, const Domain& B);
double erosion_area(const Domain& D, double eta);
double dilation_area(const Domain& D, double eta);
/// area(A ∩ B^{-eta}).
double intersection_eroded_area(const Domain& A, const Domain& B, double eta);
/// area(D^{-eta}) by counting the centres of an n x n raster over the bounding box.
double raster_erosion_area(const Domain& D, double eta, int n = 2048);

/// Length of the part of segment [a, b] inside D.
double clipped_length(const Domain& D, Vec2 a, Vec2 b);

struct NodalResult {
    double length = 0.0;
    long segment_count = 0;
    double grid_spacing = 0.0;
};

/// Saddle cells are resolved with `center` when given, otherwise with the corner mean.
using PointSampler = std::function<double(Vec2)>;

NodalResult nodal_length(const GridField& f, const Domain& D, const PointSampler& center = {});
/// Nodal length on several domains from one pass over the grid.
std::vector<NodalResult> nodal_lengths(const GridField& f, const std::vector<Domain>& domains,
                                       const PointSampler& center = {});

struct VortexResult {
    long count = 0;
    std::vector<Vec2> locations;
    std::vector<double> residuals;
};

VortexResult vortex_count(const GridField& re, const GridField& im, const Domain& D);
std::vector<VortexResult> vortex_counts(const GridField& re, const GridField& im, const std::vector<Domain>& domains);

/// Grid spacing 1/(grid_factor sqrt(E)).
inline double default_spacing(double E, double grid_factor = 16.0) { return 1.0 / (grid_factor * std::sqrt(E)); }

/// Node grid covering the union of the bounding boxes.
Grid covering_grid(const std::vector<Domain>& domains, double delta);

} // namespace berry

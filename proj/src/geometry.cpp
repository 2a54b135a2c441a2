#include "berry/geometry.hpp"

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "berry/errors.hpp"

namespace berry {

namespace bg = boost::geometry;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kCirclePoints = 1024;

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, true>;
using BMulti = bg::model::multi_polygon<BPolygon>;

double cross(Vec2 a, Vec2 b) { return a[0] * b[1] - a[1] * b[0]; }
Vec2 sub(Vec2 a, Vec2 b) { return {a[0] - b[0], a[1] - b[1]}; }
double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }
double norm(Vec2 a) { return std::hypot(a[0], a[1]); }

double signed_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * s;
}

bool finite(Vec2 p) { return std::isfinite(p[0]) && std::isfinite(p[1]); }

int orient(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(sub(b, a), sub(c, a));
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= p[1] &&
           p[1] <= std::max(a[1], b[1]);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4)
        return true;
    return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
           (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

BPolygon to_bpolygon(const std::vector<Vec2>& v) {
    BPolygon p;
    for (const auto& q : v)
        bg::append(p.outer(), BPoint(q[0], q[1]));
    bg::append(p.outer(), BPoint(v.front()[0], v.front()[1]));
    bg::correct(p);
    return p;
}

BMulti to_bmulti(const Domain& D) {
    BMulti m;
    m.push_back(to_bpolygon(D.outline(kCirclePoints)));
    return m;
}

double rect_overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Signed area of triangle (0, a, b) intersected with the disk of radius R at the origin.
double triangle_disk_area(Vec2 a, Vec2 b, double R) {
    const Vec2 d = sub(b, a);
    const double A = dot(d, d);
    if (A == 0.0)
        return 0.0;
    const double B = 2.0 * dot(a, d);
    const double C = dot(a, a) - R * R;
    std::vector<double> ts{0.0};
    const double disc = B * B - 4.0 * A * C;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        for (double t : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)})
            if (t > 0.0 && t < 1.0)
                ts.push_back(t);
    }
    ts.push_back(1.0);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const Vec2 p{a[0] + ts[i] * d[0], a[1] + ts[i] * d[1]};
        const Vec2 q{a[0] + ts[i + 1] * d[0], a[1] + ts[i + 1] * d[1]};
        const double tm = 0.5 * (ts[i] + ts[i + 1]);
        const Vec2 m{a[0] + tm * d[0], a[1] + tm * d[1]};
        if (dot(m, m) <= R * R)
            s += 0.5 * cross(p, q);
        else
            s += 0.5 * R * R * std::atan2(cross(p, q), dot(p, q));
    }
    return s;
}

double polygon_disk_area(const std::vector<Vec2>& v, const Disk& d) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += triangle_disk_area(sub(v[i], d.center), sub(v[(i + 1) % v.size()], d.center), d.radius);
    return std::abs(s);
}

double lens_area(const Disk& a, const Disk& b) {
    const double d = norm(sub(a.center, b.center));
    const double r1 = a.radius, r2 = b.radius;
    if (r1 <= 0.0 || r2 <= 0.0 || d >= r1 + r2)
        return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return kPi * r * r;
    }
    const double c1 = std::clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1), -1.0, 1.0);
    const double c2 = std::clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2), -1.0, 1.0);
    const double k = std::sqrt(std::max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)));
    return r1 * r1 * std::acos(c1) + r2 * r2 * std::acos(c2) - 0.5 * k;
}

double multi_area(const BMulti& m) { return std::abs(bg::area(m)); }

BMulti buffered(const Domain& D, double eta) {
    bg::strategy::buffer::distance_symmetric<double> dist(eta);
    bg::strategy::buffer::join_round join(4096);
    bg::strategy::buffer::end_round end(4096);
    bg::strategy::buffer::point_circle circle(4096);
    bg::strategy::buffer::side_straight side;
    BMulti out;
    bg::buffer(to_bmulti(D), out, dist, side, join, end, circle);
    return out;
}

double distance_to_boundary(const Domain& D, Vec2 p) {
    if (const auto* d = std::get_if<Disk>(&D.shape()))
        return std::abs(d->radius - norm(sub(p, d->center)));
    const auto v = D.outline();
    double best = INFINITY;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i], b = v[(i + 1) % v.size()];
        const Vec2 ab = sub(b, a);
        const double t = std::clamp(dot(sub(p, a), ab) / dot(ab, ab), 0.0, 1.0);
        best = std::min(best, norm(sub(p, {a[0] + t * ab[0], a[1] + t * ab[1]})));
    }
    return best;
}

} // namespace

Domain::Domain(Shape shape) : shape_(std::move(shape)) {
    if (auto* r = std::get_if<Rectangle>(&shape_)) {
        if (!finite(r->corner) || !finite(r->widths) || !(r->widths[0] > 0.0) || !(r->widths[1] > 0.0))
            throw InvalidArgument("rectangle needs finite corner and positive widths");
    } else if (auto* d = std::get_if<Disk>(&shape_)) {
        if (!finite(d->center) || !(d->radius > 0.0) || !std::isfinite(d->radius))
            throw InvalidArgument("disk needs finite centre and positive radius");
    } else {
        auto& v = std::get<Polygon>(shape_).vertices;
        if (v.size() < 3)
            throw InvalidArgument("polygon needs at least three vertices");
        for (const auto& p : v)
            if (!finite(p))
                throw InvalidArgument("polygon vertex is not finite");
        const double a = signed_area(v);
        if (!(std::abs(a) > 0.0))
            throw InvalidArgument("polygon has zero area");
        if (a < 0.0)
            std::reverse(v.begin(), v.end());
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (j == i + 1 || (i == 0 && j == n - 1))
                    continue;
                if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                    throw InvalidArgument("polygon is not simple");
            }
    }
}

Domain Domain::rectangle(double x0, double y0, double w, double h) { return Domain(Rectangle{{x0, y0}, {w, h}}); }
Domain Domain::disk(double cx, double cy, double radius) { return Domain(Disk{{cx, cy}, radius}); }
Domain Domain::polygon(std::vector<Vec2> vertices) { return Domain(Polygon{std::move(vertices)}); }

bool Domain::contains(Vec2 p) const {
    if (const auto* r = std::get_if<Rectangle>(&shape_))
        return p[0] >= r->corner[0] && p[0] <= r->corner[0] + r->widths[0] && p[1] >= r->corner[1] &&
               p[1] <= r->corner[1] + r->widths[1];
    if (const auto* d = std::get_if<Disk>(&shape_)) {
        const double dx = p[0] - d->center[0], dy = p[1] - d->center[1];
        return dx * dx + dy * dy <= d->radius * d->radius;
    }
    const auto& v = std::get<Polygon>(shape_).vertices;
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i][1] > p[1]) != (v[j][1] > p[1])) {
            const double x = v[j][0] + (p[1] - v[j][1]) * (v[i][0] - v[j][0]) / (v[i][1] - v[j][1]);
            if (p[0] < x)
                inside = !inside;
        }
    }
    return inside;
}

std::pair<Vec2, Vec2> Domain::bounds() const {
    if (const auto* r = std::get_if<Rectangle>(&shape_))
        return {r->corner, {r->corner[0] + r->widths[0], r->corner[1] + r->widths[1]}};
    if (const auto* d = std::get_if<Disk>(&shape_))
        return {{d->center[0] - d->radius, d->center[1] - d->radius}, {d->center[0] + d->radius, d->center[1] + d->radius}};
    const auto& v = std::get<Polygon>(shape_).vertices;
    Vec2 lo = v[0], hi = v[0];
    for (const auto& p : v) {
        lo = {std::min(lo[0], p[0]), std::min(lo[1], p[1])};
        hi = {std::max(hi[0], p[0]), std::max(hi[1], p[1])};
    }
    return {lo, hi};
}

std::vector<Vec2> Domain::outline(int disk_vertices) const {
    if (is_rectangle()) {
        const auto [lo, hi] = bounds();
        return {lo, {hi[0], lo[1]}, hi, {lo[0], hi[1]}};
    }
    if (const auto* d = std::get_if<Disk>(&shape_)) {
        std::vector<Vec2> v(disk_vertices);
        for (int i = 0; i < disk_vertices; ++i) {
            const double t = 2.0 * kPi * i / disk_vertices;
            v[i] = {d->center[0] + d->radius * std::cos(t), d->center[1] + d->radius * std::sin(t)};
        }
        return v;
    }
    return std::get<Polygon>(shape_).vertices;
}

std::string Domain::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (const auto* r = std::get_if<Rectangle>(&shape_)) {
        os << "rectangle " << r->corner[0] << ' ' << r->corner[1] << ' ' << r->widths[0] << ' ' << r->widths[1];
    } else if (const auto* d = std::get_if<Disk>(&shape_)) {
        os << "disk " << d->center[0] << ' ' << d->center[1] << ' ' << d->radius;
    } else {
        os << "polygon";
        for (const auto& p : std::get<Polygon>(shape_).vertices)
            os << ' ' << p[0] << ' ' << p[1];
    }
    return os.str();
}

Domain parse_domain(const std::string& text) {
    std::istringstream is(text);
    std::string type;
    is >> type;
    std::vector<double> nums;
    std::string tok;
    while (is >> tok) {
        std::size_t used = 0;
        double x;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("domain: bad number '" + tok + "'");
        }
        if (used != tok.size())
            throw InvalidArgument("domain: bad number '" + tok + "'");
        nums.push_back(x);
    }
    if (type == "rectangle") {
        if (nums.size() != 4)
            throw InvalidArgument("rectangle takes x0 y0 width height");
        return Domain::rectangle(nums[0], nums[1], nums[2], nums[3]);
    }
    if (type == "disk") {
        if (nums.size() != 3)
            throw InvalidArgument("disk takes cx cy radius");
        return Domain::disk(nums[0], nums[1], nums[2]);
    }
    if (type == "polygon") {
        if (nums.size() < 6 || nums.size() % 2)
            throw InvalidArgument("polygon takes at least three x y pairs");
        std::vector<Vec2> v;
        for (std::size_t i = 0; i < nums.size(); i += 2)
            v.push_back({nums[i], nums[i + 1]});
        return Domain::polygon(std::move(v));
    }
    throw InvalidArgument("unknown domain type '" + type + "'");
}

double area(const Domain& D) {
    if (const auto* r = std::get_if<Rectangle>(&D.shape()))
        return r->widths[0] * r->widths[1];
    if (const auto* d = std::get_if<Disk>(&D.shape()))
        return kPi * d->radius * d->radius;
    return signed_area(std::get<Polygon>(D.shape()).vertices);
}

double diam(const Domain& D) {
    if (const auto* r = std::get_if<Rectangle>(&D.shape()))
        return std::hypot(r->widths[0], r->widths[1]);
    if (const auto* d = std::get_if<Disk>(&D.shape()))
        return 2.0 * d->radius;
    const auto& v = std::get<Polygon>(D.shape()).vertices;
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            best = std::max(best, norm(sub(v[i], v[j])));
    return best;
}

double intersection_area(const Domain& A, const Domain& B) {
    const auto* ra = std::get_if<Rectangle>(&A.shape());
    const auto* rb = std::get_if<Rectangle>(&B.shape());
    const auto* da = std::get_if<Disk>(&A.shape());
    const auto* db = std::get_if<Disk>(&B.shape());
    if (ra && rb) {
        const auto [alo, ahi] = A.bounds();
        const auto [blo, bhi] = B.bounds();
        return rect_overlap(alo[0], ahi[0], blo[0], bhi[0]) * rect_overlap(alo[1], ahi[1], blo[1], bhi[1]);
    }
    if (da && db)
        return lens_area(*da, *db);
    if (da)
        return polygon_disk_area(B.outline(), *da);
    if (db)
        return polygon_disk_area(A.outline(), *db);
    BMulti out;
    bg::intersection(to_bmulti(A), to_bmulti(B), out);
    return multi_area(out);
}

double intersection_diam(const Domain& A, const Domain& B) {
    const auto* ra = std::get_if<Rectangle>(&A.shape());
    const auto* rb = std::get_if<Rectangle>(&B.shape());
    if (ra && rb) {
        const auto [alo, ahi] = A.bounds();
        const auto [blo, bhi] = B.bounds();
        const double w = rect_overlap(alo[0], ahi[0], blo[0], bhi[0]);
        const double h = rect_overlap(alo[1], ahi[1], blo[1], bhi[1]);
        return (w > 0.0 && h > 0.0) ? std::hypot(w, h) : 0.0;
    }
    BMulti out;
    bg::intersection(to_bmulti(A), to_bmulti(B), out);
    std::vector<Vec2> pts;
    for (const auto& poly : out)
        for (const auto& p : poly.outer())
            pts.push_back({p.x(), p.y()});
    if (multi_area(out) <= 0.0)
        return 0.0;
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, norm(sub(pts[i], pts[j])));
    return best;
}

double raster_erosion_area(const Domain& D, double eta, int n) {
    const auto [lo, hi] = D.bounds();
    const double hx = (hi[0] - lo[0]) / n, hy = (hi[1] - lo[1]) / n;
    long count = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 p{lo[0] + (i + 0.5) * hx, lo[1] + (j + 0.5) * hy};
            if (D.contains(p) && distance_to_boundary(D, p) >= eta)
                ++count;
        }
    return count * hx * hy;
}

double erosion_area(const Domain& D, double eta) {
    if (!(eta >= 0.0))
        throw InvalidArgument("erosion_area: eta must be non-negative");
    if (const auto* r = std::get_if<Rectangle>(&D.shape()))
        return std::max(0.0, r->widths[0] - 2.0 * eta) * std::max(0.0, r->widths[1] - 2.0 * eta);
    if (const auto* d = std::get_if<Disk>(&D.shape())) {
        const double rho = std::max(0.0, d->radius - eta);
        return kPi * rho * rho;
    }
    if (eta == 0.0)
        return area(D);
    try {
        const double a = multi_area(buffered(D, -eta));
        if (std::isfinite(a) && a <= area(D))
            return a;
    } catch (const std::exception&) {
    }
    return raster_erosion_area(D, eta);
}

double dilation_area(const Domain& D, double eta) {
    if (!(eta >= 0.0))
        throw InvalidArgument("dilation_area: eta must be non-negative");
    if (const auto* r = std::get_if<Rectangle>(&D.shape()))
        return r->widths[0] * r->widths[1] + 2.0 * eta * (r->widths[0] + r->widths[1]) + kPi * eta * eta;
    if (const auto* d = std::get_if<Disk>(&D.shape()))
        return kPi * (d->radius + eta) * (d->radius + eta);
    if (eta == 0.0)
        return area(D);
    return multi_area(buffered(D, eta));
}

double intersection_eroded_area(const Domain& A, const Domain& B, double eta) {
    if (!(eta >= 0.0))
        throw InvalidArgument("intersection_eroded_area: eta must be non-negative");
    if (const auto* rb = std::get_if<Rectangle>(&B.shape())) {
        const double w = rb->widths[0] - 2.0 * eta, h = rb->widths[1] - 2.0 * eta;
        if (w <= 0.0 || h <= 0.0)
            return 0.0;
        return intersection_area(A, Domain::rectangle(rb->corner[0] + eta, rb->corner[1] + eta, w, h));
    }
    if (const auto* db = std::get_if<Disk>(&B.shape())) {
        if (eta >= db->radius)
            return 0.0;
        return intersection_area(A, Domain::disk(db->center[0], db->center[1], db->radius - eta));
    }
    if (eta == 0.0)
        return intersection_area(A, B);
    BMulti out;
    bg::intersection(to_bmulti(A), buffered(B, -eta), out);
    return multi_area(out);
}

double clipped_length(const Domain& D, Vec2 a, Vec2 b) {
    const Vec2 d = sub(b, a);
    const double len = norm(d);
    if (len == 0.0)
        return 0.0;
    if (const auto* r = std::get_if<Rectangle>(&D.shape())) {
        // Liang-Barsky.
        double t0 = 0.0, t1 = 1.0;
        const double lo[2] = {r->corner[0], r->corner[1]};
        const double hi[2] = {r->corner[0] + r->widths[0], r->corner[1] + r->widths[1]};
        for (int k = 0; k < 2; ++k) {
            if (d[k] == 0.0) {
                if (a[k] < lo[k] || a[k] > hi[k])
                    return 0.0;
                continue;
            }
            double ta = (lo[k] - a[k]) / d[k], tb = (hi[k] - a[k]) / d[k];
            if (ta > tb)
                std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
        }
        return t1 > t0 ? (t1 - t0) * len : 0.0;
    }
    if (const auto* c = std::get_if<Disk>(&D.shape())) {
        const Vec2 f = sub(a, c->center);
        const double A = dot(d, d), B = 2.0 * dot(f, d), C = dot(f, f) - c->radius * c->radius;
        const double disc = B * B - 4.0 * A * C;
        if (disc <= 0.0)
            return 0.0;
        const double sq = std::sqrt(disc);
        const double t0 = std::max(0.0, (-B - sq) / (2.0 * A));
        const double t1 = std::min(1.0, (-B + sq) / (2.0 * A));
        return t1 > t0 ? (t1 - t0) * len : 0.0;
    }
    const auto& v = std::get<Polygon>(D.shape()).vertices;
    std::vector<double> ts{0.0, 1.0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 p = v[i], e = sub(v[(i + 1) % v.size()], p);
        const double den = cross(d, e);
        if (den == 0.0)
            continue;
        const Vec2 ap = sub(p, a);
        const double t = cross(ap, e) / den;
        const double u = cross(ap, d) / den;
        if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0)
            ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    double inside = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double tm = 0.5 * (ts[i] + ts[i + 1]);
        if (ts[i + 1] > ts[i] && D.contains({a[0] + tm * d[0], a[1] + tm * d[1]}))
            inside += ts[i + 1] - ts[i];
    }
    return inside * len;
}

Grid node_grid(Vec2 lo, Vec2 hi, double delta) {
    if (!(delta > 0.0))
        throw InvalidArgument("grid spacing must be positive");
    Grid g;
    g.origin = lo;
    g.spacing = delta;
    g.nx = static_cast<int>(std::ceil((hi[0] - lo[0]) / delta - 1e-9)) + 1;
    g.ny = static_cast<int>(std::ceil((hi[1] - lo[1]) / delta - 1e-9)) + 1;
    return g;
}

Grid midpoint_grid(Vec2 lo, Vec2 hi, double delta) {
    if (!(delta > 0.0))
        throw InvalidArgument("grid spacing must be positive");
    Grid g;
    g.spacing = delta;
    g.origin = {lo[0] + 0.5 * delta, lo[1] + 0.5 * delta};
    g.nx = std::max(1, static_cast<int>(std::ceil((hi[0] - lo[0]) / delta - 1e-9)));
    g.ny = std::max(1, static_cast<int>(std::ceil((hi[1] - lo[1]) / delta - 1e-9)));
    return g;
}

Grid covering_grid(const std::vector<Domain>& domains, double delta) {
    if (domains.empty())
        throw InvalidArgument("covering_grid: no domains");
    auto [lo, hi] = domains[0].bounds();
    for (const auto& D : domains) {
        const auto [l, h] = D.bounds();
        lo = {std::min(lo[0], l[0]), std::min(lo[1], l[1])};
        hi = {std::max(hi[0], h[0]), std::max(hi[1], h[1])};
    }
    return node_grid(lo, hi, delta);
}

namespace {

void check_covers(const Grid& g, const Domain& D) {
    const auto [lo, hi] = D.bounds();
    const double tol = 1e-9 * g.spacing;
    const Vec2 glo = g.origin, ghi = g.point(g.nx - 1, g.ny - 1);
    if (g.nx < 2 || g.ny < 2 || lo[0] < glo[0] - tol || lo[1] < glo[1] - tol || hi[0] > ghi[0] + tol ||
        hi[1] > ghi[1] + tol)
        throw InvalidArgument("grid does not cover the domain");
}

struct Segment {
    Vec2 a, b;
};

// Relation of a grid cell to a domain: 0 outside, 1 inside, 2 straddling.
int cell_relation(const Domain& D, Vec2 lo, Vec2 hi) {
    const auto [dlo, dhi] = D.bounds();
    if (hi[0] < dlo[0] || lo[0] > dhi[0] || hi[1] < dlo[1] || lo[1] > dhi[1])
        return 0;
    if (D.is_rectangle())
        return (lo[0] >= dlo[0] && hi[0] <= dhi[0] && lo[1] >= dlo[1] && hi[1] <= dhi[1]) ? 1 : 2;
    if (D.is_disk())
        return (D.contains(lo) && D.contains(hi) && D.contains({lo[0], hi[1]}) && D.contains({hi[0], lo[1]})) ? 1 : 2;
    return 2;
}

} // namespace

std::vector<NodalResult> nodal_lengths(const GridField& f, const std::vector<Domain>& domains,
                                       const PointSampler& center) {
    const Grid& g = f.grid;
    for (const auto& D : domains)
        check_covers(g, D);
    std::vector<NodalResult> out(domains.size());
    for (auto& r : out)
        r.grid_spacing = g.spacing;
    const double h = g.spacing;
    Segment segs[2];
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double v00 = f(i, j), v10 = f(i + 1, j), v11 = f(i + 1, j + 1), v01 = f(i, j + 1);
            const int code = (v00 > 0.0) | ((v10 > 0.0) << 1) | ((v11 > 0.0) << 2) | ((v01 > 0.0) << 3);
            if (code == 0 || code == 15)
                continue;
            const Vec2 p = g.point(i, j);
            auto lerp = [](double a, double b) { return a / (a - b); };
            const Vec2 bottom{p[0] + h * lerp(v00, v10), p[1]};
            const Vec2 right{p[0] + h, p[1] + h * lerp(v10, v11)};
            const Vec2 top{p[0] + h * lerp(v01, v11), p[1] + h};
            const Vec2 left{p[0], p[1] + h * lerp(v00, v01)};
            int n = 0;
            switch (code) {
            case 1: case 14: segs[n++] = {left, bottom}; break;
            case 2: case 13: segs[n++] = {bottom, right}; break;
            case 3: case 12: segs[n++] = {left, right}; break;
            case 4: case 11: segs[n++] = {right, top}; break;
            case 6: case 9: segs[n++] = {bottom, top}; break;
            case 7: case 8: segs[n++] = {left, top}; break;
            case 5: case 10: {
                const Vec2 mid{p[0] + 0.5 * h, p[1] + 0.5 * h};
                const double vc = center ? center(mid) : 0.25 * (v00 + v10 + v11 + v01);
                // When the centre shares the sign of corner 00, corners 00 and 11 are joined.
                if ((vc > 0.0) == (v00 > 0.0)) {
                    segs[n++] = {bottom, right};
                    segs[n++] = {left, top};
                } else {
                    segs[n++] = {left, bottom};
                    segs[n++] = {right, top};
                }
                break;
            }
            default: break;
            }
            const Vec2 q{p[0] + h, p[1] + h};
            for (std::size_t d = 0; d < domains.size(); ++d) {
                const int rel = cell_relation(domains[d], p, q);
                if (rel == 0)
                    continue;
                for (int s = 0; s < n; ++s) {
                    const double len = rel == 1 ? norm(sub(segs[s].b, segs[s].a))
                                                : clipped_length(domains[d], segs[s].a, segs[s].b);
                    if (len > 0.0) {
                        out[d].length += len;
                        ++out[d].segment_count;
                    }
                }
            }
        }
    }
    return out;
}

NodalResult nodal_length(const GridField& f, const Domain& D, const PointSampler& center) {
    return nodal_lengths(f, {D}, center).front();
}

namespace {

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

bool mixed_signs(double a, double b, double c, double d) {
    const bool pos = a > 0.0 || b > 0.0 || c > 0.0 || d > 0.0;
    const bool neg = a <= 0.0 || b <= 0.0 || c <= 0.0 || d <= 0.0;
    return pos && neg;
}

} // namespace

std::vector<VortexResult> vortex_counts(const GridField& re, const GridField& im, const std::vector<Domain>& domains) {
    const Grid& g = re.grid;
    if (g.nx != im.grid.nx || g.ny != im.grid.ny || re.value.size() != im.value.size())
        throw InvalidArgument("vortex_count: grid shapes differ");
    for (const auto& D : domains)
        check_covers(g, D);
    const double h = g.spacing;
    std::vector<Vec2> roots;
    std::vector<double> residuals;
    std::unordered_map<long long, std::vector<std::size_t>> buckets;
    auto key = [&](Vec2 x) {
        const long long cx = static_cast<long long>(std::floor((x[0] - g.origin[0]) / h));
        const long long cy = static_cast<long long>(std::floor((x[1] - g.origin[1]) / h));
        return cx * 4000003LL + cy;
    };
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double a00 = re(i, j), a10 = re(i + 1, j), a11 = re(i + 1, j + 1), a01 = re(i, j + 1);
            const double b00 = im(i, j), b10 = im(i + 1, j), b11 = im(i + 1, j + 1), b01 = im(i, j + 1);
            if (!mixed_signs(a00, a10, a11, a01) || !mixed_signs(b00, b10, b11, b01))
                continue;
            const double ph[4] = {std::atan2(b00, a00), std::atan2(b10, a10), std::atan2(b11, a11),
                                  std::atan2(b01, a01)};
            double wind = 0.0;
            for (int c = 0; c < 4; ++c)
                wind += wrap_angle(ph[(c + 1) % 4] - ph[c]);
            const long w = std::lround(wind / (2.0 * kPi));
            if (w == 0)
                continue;
            // Bilinear interpolant f(s, t) = c0 + c1 s + c2 t + c3 s t on the unit cell.
            const double ra[4] = {a00, a10 - a00, a01 - a00, a11 - a10 - a01 + a00};
            const double rb[4] = {b00, b10 - b00, b01 - b00, b11 - b10 - b01 + b00};
            double s = 0.5, t = 0.5;
            bool converged = false;
            for (int it = 0; it < 30; ++it) {
                const double fa = ra[0] + ra[1] * s + ra[2] * t + ra[3] * s * t;
                const double fb = rb[0] + rb[1] * s + rb[2] * t + rb[3] * s * t;
                const double as = ra[1] + ra[3] * t, at = ra[2] + ra[3] * s;
                const double bs = rb[1] + rb[3] * t, bt = rb[2] + rb[3] * s;
                const double det = as * bt - at * bs;
                if (det == 0.0)
                    break;
                const double ds = (fa * bt - at * fb) / det;
                const double dt = (as * fb - fa * bs) / det;
                s -= ds;
                t -= dt;
                if (std::hypot(ds, dt) < 1e-10) {
                    converged = true;
                    break;
                }
            }
            if (!converged || s < -1e-6 || s > 1.0 + 1e-6 || t < -1e-6 || t > 1.0 + 1e-6) {
                s = 0.5;
                t = 0.5;
            }
            const Vec2 x = g.point(i, j);
            const Vec2 loc{x[0] + s * h, x[1] + t * h};
            const double fa = ra[0] + ra[1] * s + ra[2] * t + ra[3] * s * t;
            const double fb = rb[0] + rb[1] * s + rb[2] * t + rb[3] * s * t;
            bool duplicate = false;
            const long long k0 = key(loc);
            for (long long dx = -1; dx <= 1 && !duplicate; ++dx)
                for (long long dy = -1; dy <= 1 && !duplicate; ++dy) {
                    auto it = buckets.find(k0 + dx * 4000003LL + dy);
                    if (it == buckets.end())
                        continue;
                    for (auto idx : it->second)
                        if (norm(sub(roots[idx], loc)) < 0.5 * h) {
                            duplicate = true;
                            break;
                        }
                }
            if (duplicate)
                continue;
            buckets[k0].push_back(roots.size());
            roots.push_back(loc);
            residuals.push_back(std::hypot(fa, fb));
        }
    }
    std::vector<VortexResult> out(domains.size());
    for (std::size_t d = 0; d < domains.size(); ++d)
        for (std::size_t r = 0; r < roots.size(); ++r)
            if (domains[d].contains(roots[r])) {
                ++out[d].count;
                out[d].locations.push_back(roots[r]);
                out[d].residuals.push_back(residuals[r]);
            }
    return out;
}

VortexResult vortex_count(const GridField& re, const GridField& im, const Domain& D) {
    return vortex_counts(re, im, {D}).front();
}

} // namespace berry

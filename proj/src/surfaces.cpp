#include "nodaltop/surfaces.hpp"

#include "nodaltop/parallel.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace nodaltop {

std::string to_string(SurfaceKind kind)
{
    switch (kind) {
    case SurfaceKind::Sphere: return "sphere";
    case SurfaceKind::TubeTorus: return "tube-torus";
    case SurfaceKind::SliceTorus: return "slice-torus";
    }
    return "?";
}

LoopPath LoopPath::reversed() const
{
    LoopPath r;
    if (points.empty()) return r;
    r.points.push_back(points.front());
    for (std::size_t i = points.size() - 1; i >= 1; --i) r.points.push_back(points[i]);
    return r;
}

LoopPath LoopPath::repeated(int times) const
{
    LoopPath r;
    for (int t = 0; t < times; ++t) r.points.insert(r.points.end(), points.begin(), points.end());
    return r;
}

std::array<int, 4> ClosedSurface::quad(int i, int j) const
{
    const int a = vertex_id(i, j), b = vertex_id(i + 1, j);
    const int c = vertex_id(i + 1, j + 1), d = vertex_id(i, j + 1);
    if (uv_orientation > 0) return {a, b, c, d};
    return {a, d, c, b};
}

KPoint ClosedSurface::quad_center(int i, int j) const
{
    return 0.25 * (position(i, j) + position(i + 1, j) + position(i + 1, j + 1) + position(i, j + 1));
}

ClosedSurface ClosedSurface::reversed() const
{
    ClosedSurface r = *this;
    r.uv_orientation = -uv_orientation;
    return r;
}

LoopPath ClosedSurface::u_cycle(int j) const
{
    LoopPath p;
    for (int i = 0; i < n_u; ++i) p.points.push_back(position(i, j));
    return p;
}

LoopPath ClosedSurface::v_cycle(int i) const
{
    if (!v_periodic()) throw SurfaceError("v-lines of a sphere are not closed");
    LoopPath p;
    for (int j = 0; j < n_v; ++j) p.points.push_back(position(i, j));
    return p;
}

namespace {

void check_mesh_size(int n_u, int n_v)
{
    if (n_u < 3 || n_v < 2) throw SurfaceError("mesh too small");
}

double image_distance(const KPoint& a, const KPoint& b, bool periodic)
{
    return periodic ? torus_delta(a, b).norm() : (a - b).norm();
}

// Equal-arc-length resampling of a closed polyline (continuous chart, the
// closing point being `closing`).
std::vector<KPoint> resample_closed(const std::vector<KPoint>& pts, const KPoint& closing, int n)
{
    std::vector<KPoint> ring(pts);
    ring.push_back(closing);
    std::vector<double> s(ring.size(), 0.0);
    for (std::size_t i = 1; i < ring.size(); ++i) s[i] = s[i - 1] + (ring[i] - ring[i - 1]).norm();
    const double total = s.back();
    std::vector<KPoint> out;
    out.reserve(n);
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double target = total * k / n;
        while (seg + 2 < ring.size() && s[seg + 1] < target) ++seg;
        const double len = s[seg + 1] - s[seg];
        const double t = len > 0.0 ? (target - s[seg]) / len : 0.0;
        out.push_back(ring[seg] + t * (ring[seg + 1] - ring[seg]));
    }
    return out;
}

Vec3 rotate_between(const Vec3& v, const Vec3& from, const Vec3& to)
{
    return Eigen::Quaterniond::FromTwoVectors(from, to) * v;
}

}  // namespace

ClosedSurface sphere_around(const KPoint& center, double radius, int n_u, int n_v, const Domain& domain)
{
    check_mesh_size(n_u, n_v);
    if (!(radius > 0.0)) throw SurfaceError("sphere radius must be positive");
    if (!domain.is_torus() && (center.cwiseAbs().maxCoeff() + radius > domain.extent))
        throw SurfaceError("sphere exits the continuum box");
    if (domain.is_torus() && radius >= kPi) throw SurfaceError("sphere wraps around the torus");

    ClosedSurface s;
    s.kind = SurfaceKind::Sphere;
    s.n_u = n_u;
    s.n_v = n_v;
    s.uv_orientation = -1;  // (theta, phi) order is outward
    s.vertices.push_back(center + Vec3(0, 0, radius));
    for (int j = 1; j < n_v; ++j) {
        const double th = kPi * j / n_v;
        for (int i = 0; i < n_u; ++i) {
            const double ph = kTwoPi * i / n_u;
            s.vertices.push_back(center + radius * Vec3(std::sin(th) * std::cos(ph),
                                                        std::sin(th) * std::sin(ph), std::cos(th)));
        }
    }
    s.vertices.push_back(center - Vec3(0, 0, radius));
    const int south = static_cast<int>(s.vertices.size()) - 1;
    for (int j = 0; j <= n_v; ++j)
        for (int i = 0; i <= n_u; ++i) {
            int id;
            if (j == 0) id = 0;
            else if (j == n_v) id = south;
            else id = 1 + (j - 1) * n_u + i % n_u;
            s.grid_ids.push_back(id);
            s.grid.push_back(s.vertices[id]);
        }
    return s;
}

ClosedSurface tube_around(const NodalLoop& loop, double radius, int n_u, int n_v,
                          const std::vector<KPoint>& others, const Domain& domain)
{
    check_mesh_size(n_u, n_v);
    if (!(radius > 0.0)) throw SurfaceError("tube radius must be positive");
    const auto& pts = loop.vertices;
    if (pts.size() < 4) throw SurfaceError("loop has too few vertices for a tube");
    const bool periodic = domain.is_torus();

    // Self-approach: pairs far apart along the loop must stay 3 radii apart.
    std::vector<double> s(pts.size() + 1, 0.0);
    const KPoint closing = loop.closing_vertex();
    for (std::size_t i = 1; i <= pts.size(); ++i)
        s[i] = s[i - 1] + ((i < pts.size() ? pts[i] : closing) - pts[i - 1]).norm();
    const double total = s.back();
    const double separation = 2.0 * kPi * radius;
    if (total < 2.0 * separation) throw SurfaceError("tube radius too large for the loop");
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double arc = std::min(s[j] - s[i], total - (s[j] - s[i]));
            if (arc > separation && image_distance(pts[i], pts[j], periodic) < 3.0 * radius)
                throw SurfaceError("tube radius too large: loop comes close to itself");
        }
    for (const auto& o : others)
        for (const auto& p : pts)
            if (image_distance(o, p, periodic) < 3.0 * radius)
                throw SurfaceError("tube radius too large: collides with another component");

    const std::vector<KPoint> c = resample_closed(pts, closing, n_u);
    const Vec3 shift = closing - pts.front();
    auto at = [&](int i) -> KPoint {
        const int n = n_u;
        const int q = (i % n + n) % n;
        const int wraps = (i - q) / n;
        return c[q] + static_cast<double>(wraps) * shift;
    };
    std::vector<Vec3> tangent(n_u + 1), normal(n_u + 1);
    for (int i = 0; i <= n_u; ++i) tangent[i] = (at(i + 1) - at(i - 1)).normalized();
    normal[0] = tangent[0].unitOrthogonal();
    for (int i = 1; i <= n_u; ++i) {
        Vec3 n = rotate_between(normal[i - 1], tangent[i - 1], tangent[i]);
        n -= n.dot(tangent[i]) * tangent[i];
        normal[i] = n.normalized();
    }
    // Spread the holonomy of the transported frame evenly so the seam closes.
    const double twist = std::atan2(normal[0].cross(normal[n_u]).dot(tangent[0]),
                                    normal[0].dot(normal[n_u]));
    for (int i = 0; i <= n_u; ++i)
        normal[i] = Eigen::AngleAxisd(-twist * i / n_u, tangent[i]) * normal[i];

    ClosedSurface t;
    t.kind = SurfaceKind::TubeTorus;
    t.n_u = n_u;
    t.n_v = n_v;
    t.uv_orientation = -1;  // (meridian, longitude) order is outward
    for (int j = 0; j < n_v; ++j)
        for (int i = 0; i < n_u; ++i) {
            const double v = kTwoPi * j / n_v;
            const Vec3 b = tangent[i].cross(normal[i]);
            t.vertices.push_back(c[i] + radius * (std::cos(v) * normal[i] + std::sin(v) * b));
        }
    for (int j = 0; j <= n_v; ++j)
        for (int i = 0; i <= n_u; ++i) {
            const int id = (j % n_v) * n_u + i % n_u;
            t.grid_ids.push_back(id);
            if (i < n_u) {
                t.grid.push_back(t.vertices[id]);
            } else {
                const double v = kTwoPi * j / n_v;
                const Vec3 b = tangent[n_u].cross(normal[n_u]);
                t.grid.push_back(at(n_u) + radius * (std::cos(v) * normal[n_u] + std::sin(v) * b));
            }
        }
    if (!periodic)
        for (const auto& v : t.vertices)
            if (!domain.contains(v)) throw SurfaceError("tube exits the continuum box");
    return t;
}

LoopPath meridian_path(const NodalLoop& loop, double radius, int n_points, std::size_t at)
{
    const auto& pts = loop.vertices;
    if (pts.size() < 3 || at >= pts.size()) throw SurfaceError("invalid loop for a meridian");
    if (n_points < 3) throw SurfaceError("meridian needs at least 3 points");
    const std::size_t n = pts.size();
    const Vec3 shift = loop.closing_vertex() - pts.front();
    const KPoint next = at + 1 < n ? pts[at + 1] : pts[0] + shift;
    const KPoint prev = at > 0 ? pts[at - 1] : pts[n - 1] - shift;
    const Vec3 t = (next - prev).normalized();
    const Vec3 nrm = t.unitOrthogonal();
    const Vec3 b = t.cross(nrm);
    LoopPath p;
    for (int j = 0; j < n_points; ++j) {
        const double v = kTwoPi * j / n_points;
        p.points.push_back(pts[at] + radius * (std::cos(v) * nrm + std::sin(v) * b));
    }
    return p;
}

Axis parse_axis(const std::string& s)
{
    if (s == "x" || s == "X") return Axis::X;
    if (s == "y" || s == "Y") return Axis::Y;
    if (s == "z" || s == "Z") return Axis::Z;
    throw ConfigError("axis must be x, y or z, got '" + s + "'");
}

char axis_name(Axis a) { return "xyz"[static_cast<int>(a)]; }

ClosedSurface slice_torus(Axis axis, double value, int n_u, int n_v)
{
    check_mesh_size(n_u, n_v);
    const int a = static_cast<int>(axis);
    const int du = (a + 1) % 3, dv = (a + 2) % 3;
    ClosedSurface s;
    s.kind = SurfaceKind::SliceTorus;
    s.n_u = n_u;
    s.n_v = n_v;
    s.uv_orientation = 1;  // e_u x e_v = +axis
    auto point = [&](int i, int j) {
        KPoint k;
        k[a] = value;
        k[du] = -kPi + kTwoPi * i / n_u;
        k[dv] = -kPi + kTwoPi * j / n_v;
        return k;
    };
    for (int j = 0; j < n_v; ++j)
        for (int i = 0; i < n_u; ++i) s.vertices.push_back(point(i, j));
    for (int j = 0; j <= n_v; ++j)
        for (int i = 0; i <= n_u; ++i) {
            s.grid_ids.push_back((j % n_v) * n_u + i % n_u);
            s.grid.push_back(point(i, j));
        }
    return s;
}

double validate(ClosedSurface& surface, const BlochModel& model, int gap_index)
{
    const int gi = gap_index > 0 ? gap_index : model.occupied_count();
    const std::size_t nv = surface.vertices.size();
    const std::size_t nq = static_cast<std::size_t>(surface.n_u) * surface.n_v;
    std::vector<double> gaps(nv + nq);
    parallel_for(nv + nq, [&](std::size_t idx) {
        KPoint k;
        if (idx < nv) {
            k = surface.vertices[idx];
        } else {
            const std::size_t q = idx - nv;
            k = surface.quad_center(static_cast<int>(q % surface.n_u), static_cast<int>(q / surface.n_u));
        }
        gaps[idx] = model.gap(k, gi);
    });
    surface.min_gap = *std::min_element(gaps.begin(), gaps.end());
    return surface.min_gap;
}

ClosedSurface gapped_slice(const BlochModel& model, Axis axis, double value, int n, double floor)
{
    if (!model.is_lattice()) throw UnsupportedError("slice tori need a lattice model");
    ClosedSurface s = slice_torus(axis, value, n, n);
    validate(s, model);
    if (s.min_gap < floor)
        throw SurfaceError(std::string("slice k_") + axis_name(axis) + " = " + std::to_string(value) +
                           " meets the nodal set (min gap " + std::to_string(s.min_gap) + ")");
    return s;
}

}  // namespace nodaltop

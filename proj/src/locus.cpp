#include "nodaltop/locus.hpp"

#include "nodaltop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace nodaltop {

KPoint NodalLoop::closing_vertex() const
{
    return vertices.front() + kTwoPi * Vec3(winding[0], winding[1], winding[2]);
}

KPoint NodalLoop::centroid() const
{
    Vec3 c = Vec3::Zero();
    for (const auto& v : vertices) c += v;
    return c / static_cast<double>(vertices.size());
}

double NodalLoop::length() const
{
    double l = 0.0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) l += (vertices[i + 1] - vertices[i]).norm();
    return l + (closing_vertex() - vertices.back()).norm();
}

NodalLoop NodalLoop::reversed() const
{
    // v0, v[n-1] - S, ..., v1 - S keeps the chart continuous from v0
    NodalLoop r = *this;
    const Vec3 shift = kTwoPi * Vec3(winding[0], winding[1], winding[2]);
    r.vertices.clear();
    r.vertices.push_back(vertices.front());
    for (std::size_t i = vertices.size() - 1; i >= 1; --i) r.vertices.push_back(vertices[i] - shift);
    for (auto& w : r.winding) w = -w;
    return r;
}

std::string to_string(ComponentKind kind)
{
    switch (kind) {
    case ComponentKind::Point: return "point";
    case ComponentKind::Loop: return "loop";
    case ComponentKind::Arc: return "arc";
    }
    return "?";
}

KPoint ScanResult::node_position(const std::array<int, 3>& i) const
{
    return origin + spacing * Vec3(i[0], i[1], i[2]);
}

KPoint ScanResult::cell_center(const std::array<int, 3>& c) const
{
    return origin + spacing * Vec3(c[0] + 0.5, c[1] + 0.5, c[2] + 0.5);
}

double ScanResult::node_gap(std::array<int, 3> i) const
{
    const int n = nodes_per_axis();
    if (periodic)
        for (auto& v : i) v = ((v % n) + n) % n;
    return node_gaps[static_cast<std::size_t>(i[0]) +
                     static_cast<std::size_t>(n) * (i[1] + static_cast<std::size_t>(n) * i[2])];
}

ScanResult scan_grid(const BlochModel& model, int resolution, double gap_threshold, int gap_index)
{
    if (resolution < 8) throw ConfigError("scan resolution must be at least 8 per axis");
    ScanResult scan;
    scan.resolution = resolution;
    scan.periodic = model.is_lattice();
    scan.gap_index = gap_index > 0 ? gap_index : model.occupied_count();
    const double half = model.is_lattice() ? kPi : model.domain().extent;
    scan.spacing = 2.0 * half / resolution;
    scan.origin = Vec3::Constant(-half);
    scan.threshold = gap_threshold > 0.0 ? gap_threshold : 1.5 * scan.spacing;

    const int n = scan.nodes_per_axis();
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    scan.node_gaps.assign(total, 0.0);
    parallel_for(total, [&](std::size_t idx) {
        const int i = static_cast<int>(idx % n);
        const int j = static_cast<int>((idx / n) % n);
        const int l = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
        scan.node_gaps[idx] = model.gap(scan.node_position({i, j, l}), scan.gap_index);
    });

    for (int l = 0; l < resolution; ++l)
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i) {
                double g = std::numeric_limits<double>::infinity();
                for (int c = 0; c < 8; ++c)
                    g = std::min(g, scan.node_gap({i + (c & 1), j + ((c >> 1) & 1), l + ((c >> 2) & 1)}));
                if (g < scan.threshold) scan.flagged.push_back({{i, j, l}, g});
            }
    std::sort(scan.flagged.begin(), scan.flagged.end(),
              [](const GridCell& a, const GridCell& b) {
                  return std::tie(a.index[2], a.index[1], a.index[0]) <
                         std::tie(b.index[2], b.index[1], b.index[0]);
              });
    return scan;
}

namespace {

/// Squared gap and its finite-difference derivatives.
struct GapSquared {
    const BlochModel& model;
    int gap_index;

    double value(const KPoint& k) const
    {
        const double g = model.gap(k, gap_index);
        return g * g;
    }

    void derivatives(const KPoint& k, double h, double& f0, Vec3& grad, Eigen::Matrix3d& hess) const
    {
        f0 = value(k);
        std::array<double, 3> fp{}, fm{};
        for (int d = 0; d < 3; ++d) {
            Vec3 e = Vec3::Zero();
            e[d] = h;
            fp[d] = value(k + e);
            fm[d] = value(k - e);
            grad[d] = (fp[d] - fm[d]) / (2.0 * h);
            hess(d, d) = (fp[d] - 2.0 * f0 + fm[d]) / (h * h);
        }
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                Vec3 ea = Vec3::Zero(), eb = Vec3::Zero();
                ea[a] = h;
                eb[b] = h;
                const double v = (value(k + ea + eb) - value(k + ea - eb) - value(k - ea + eb) +
                                  value(k - ea - eb)) / (4.0 * h * h);
                hess(a, b) = v;
                hess(b, a) = v;
            }
    }
};

constexpr double kFdStep = 1e-4;
// keeps every finite-difference stencil inside a continuum box
constexpr double kBoxMargin = 0.02;

/// Newton step on a symmetric system restricted to well-conditioned directions.
Vec3 damped_newton(const Eigen::Matrix3d& hess, const Vec3& grad, double rank_cut, int keep)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(hess);
    const Eigen::Vector3d lam = es.eigenvalues();
    const double top = std::max(std::abs(lam[2]), 1e-300);
    Vec3 step = Vec3::Zero();
    for (int i = 3 - keep; i < 3; ++i) {
        const double l = std::max(lam[i], rank_cut * top);
        const Vec3 v = es.eigenvectors().col(i);
        step -= (v.dot(grad) / l) * v;
    }
    return step;
}

bool in_domain(const BlochModel& model, const KPoint& k, double margin)
{
    if (model.is_lattice()) return true;
    return k.cwiseAbs().maxCoeff() <= model.domain().extent - margin;
}

}  // namespace

WeylPoint refine_point(const BlochModel& model, const KPoint& seed, int gap_index,
                       const RefineOptions& options)
{
    const int gi = gap_index > 0 ? gap_index : model.occupied_count();
    GapSquared f{model, gi};
    KPoint k = seed;
    double g = 0.0;
    try {
        g = model.gap(k, gi);
        int it = 0;
        while (g >= options.tolerance && it < options.max_iterations) {
            double f0;
            Vec3 grad;
            Eigen::Matrix3d hess;
            // stencil shrinks with the gap so the cubic term does not bias the gradient
            f.derivatives(k, std::clamp(g, 1e-8, kFdStep), f0, grad, hess);
            Vec3 step = damped_newton(hess, grad, 1e-8, 3);
            const double len = step.norm();
            if (len > options.max_step) step *= options.max_step / len;
            // backtrack on the squared gap
            double t = 1.0;
            KPoint trial = k + step;
            while (t > 1e-4 && (!in_domain(model, trial, kBoxMargin) || f.value(trial) > f0)) {
                t *= 0.5;
                trial = k + t * step;
            }
            if (t <= 1e-4) break;
            k = trial;
            g = model.gap(k, gi);
            ++it;
            if (len < 1e-15) break;
        }
        if (g < options.tolerance) {
            if (model.is_lattice()) k = reduce_to_zone(k);
            return {k, g, it, gi};
        }
    } catch (const DomainError&) {
    }
    std::ostringstream msg;
    msg << "gap refinement from (" << seed.x() << ", " << seed.y() << ", " << seed.z()
        << ") did not converge; residual gap " << g;
    throw ConvergenceError(msg.str(), g);
}

namespace {

Eigen::Vector3d hessian_spectrum(const BlochModel& model, const KPoint& k, int gi, Eigen::Matrix3d* vecs)
{
    GapSquared f{model, gi};
    double f0;
    Vec3 grad;
    Eigen::Matrix3d hess;
    f.derivatives(k, 1e-3, f0, grad, hess);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(hess);
    if (vecs) *vecs = es.eigenvectors();
    return es.eigenvalues();
}

Vec3 curve_tangent(const BlochModel& model, const KPoint& k, int gi)
{
    Eigen::Matrix3d vecs;
    hessian_spectrum(model, k, gi, &vecs);
    return vecs.col(0).normalized();
}

}  // namespace

ZeroShape classify_zero(const BlochModel& model, const KPoint& zero, int gap_index)
{
    const int gi = gap_index > 0 ? gap_index : model.occupied_count();
    const Eigen::Vector3d lam = hessian_spectrum(model, zero, gi, nullptr);
    const double top = std::abs(lam[2]);
    if (top <= 0.0) return ZeroShape::Ambiguous;
    const double cut = 1e-4 * top;
    if (lam[0] > cut) return ZeroShape::Point;
    if (lam[1] > cut) return ZeroShape::Curve;
    return ZeroShape::Ambiguous;
}

namespace {

/// Newton correction in the plane orthogonal to the tangent.
bool correct_onto_curve(const GapSquared& f, KPoint& q, const Vec3& t, double max_move, double target,
                        double accept)
{
    Vec3 a = t.unitOrthogonal();
    Vec3 b = t.cross(a).normalized();
    const KPoint start = q;
    for (int it = 0; it < 30; ++it) {
        const double g = f.model.gap(q, f.gap_index);
        if (g < target) return true;
        double f0;
        Vec3 grad;
        Eigen::Matrix3d hess;
        f.derivatives(q, kFdStep, f0, grad, hess);
        Eigen::Matrix2d h2;
        h2 << a.dot(hess * a), a.dot(hess * b), b.dot(hess * a), b.dot(hess * b);
        Eigen::Vector2d g2(a.dot(grad), b.dot(grad));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h2);
        const double top = std::max(std::abs(es.eigenvalues()[1]), 1e-300);
        Eigen::Vector2d s = Eigen::Vector2d::Zero();
        for (int i = 0; i < 2; ++i) {
            const double l = std::max(es.eigenvalues()[i], 1e-8 * top);
            s -= (es.eigenvectors().col(i).dot(g2) / l) * es.eigenvectors().col(i);
        }
        Vec3 step = s[0] * a + s[1] * b;
        if (step.norm() > max_move) step *= max_move / step.norm();
        double tt = 1.0;
        KPoint trial = q + step;
        while (tt > 1e-3 && (!in_domain(f.model, trial, kBoxMargin) || f.value(trial) > f0)) {
            tt *= 0.5;
            trial = q + tt * step;
        }
        if (tt <= 1e-3) break;
        q = trial;
        if ((q - start).norm() > max_move) return false;
    }
    return f.model.gap(q, f.gap_index) < accept;
}

struct TracedCurve {
    std::vector<KPoint> vertices;
    bool closed = false;
    std::array<int, 3> winding{0, 0, 0};
};

/// March along the curve in one direction until it closes or leaves the box.
TracedCurve march(const BlochModel& model, int gi, const KPoint& p0, Vec3 t, double step,
                  const TraceOptions& options, bool allow_close)
{
    GapSquared f{model, gi};
    const bool periodic = model.is_lattice();
    const double margin = kBoxMargin;
    TracedCurve out;
    out.vertices.push_back(p0);
    KPoint p = p0;
    bool armed = false;
    for (int n = 0; n < options.max_vertices; ++n) {
        double h = step;
        KPoint q;
        bool ok = false;
        while (h >= step / 32) {
            q = p + h * t;
            if (!in_domain(model, q, margin)) return out;  // open end
            if (correct_onto_curve(f, q, t, 0.75 * h, 1e-11, options.vertex_tolerance)) {
                ok = true;
                break;
            }
            h *= 0.5;
        }
        if (!ok) throw ConvergenceError("nodal curve tracing lost the curve", model.gap(q, gi));
        Vec3 tn = curve_tangent(model, q, gi);
        if (tn.dot(t) < 0) tn = -tn;
        const Vec3 chord = (q - p).normalized();
        if (chord.dot(t) <= 0.0) throw ConvergenceError("nodal curve tracing reversed direction", 0.0);
        t = tn;
        p = q;

        const Vec3 to_start = periodic ? torus_delta(p, p0) : Vec3(p0 - p);
        const double dist = to_start.norm();
        if (dist > 2.0 * step) armed = true;
        if (allow_close && armed && dist < 1.01 * step) {
            out.vertices.push_back(p);
            out.closed = true;
            const Vec3 wrap = (p + to_start - p0) / kTwoPi;
            out.winding = {static_cast<int>(std::lround(wrap.x())), static_cast<int>(std::lround(wrap.y())),
                           static_cast<int>(std::lround(wrap.z()))};
            return out;
        }
        out.vertices.push_back(p);
    }
    throw ConvergenceError("nodal curve tracing exceeded the vertex budget", 0.0);
}

/// Tangent sign rule: first non-negligible component among x, y, z positive.
bool positively_oriented(const Vec3& t)
{
    for (int d = 0; d < 3; ++d)
        if (std::abs(t[d]) > 0.25 * t.norm()) return t[d] > 0;
    return t.x() >= 0;
}

bool lex_less(const Vec3& a, const Vec3& b)
{
    for (int d = 0; d < 3; ++d) {
        if (a[d] < b[d] - 1e-9) return true;
        if (a[d] > b[d] + 1e-9) return false;
    }
    return false;
}

/// Rotate to the lexicographically smallest vertex, anchor it in the zone
/// and orient by the tangent rule.
NodalLoop canonical_loop(NodalLoop loop, bool periodic)
{
    auto& v = loop.vertices;
    const std::size_t n = v.size();
    const Vec3 shift = kTwoPi * Vec3(loop.winding[0], loop.winding[1], loop.winding[2]);
    auto key = [&](const Vec3& p) { return periodic ? reduce_to_zone(p) : p; };
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (lex_less(key(v[i]), key(v[best]))) best = i;
    std::vector<KPoint> rotated;
    rotated.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (best + i) % n;
        rotated.push_back(j >= best ? v[j] : Vec3(v[j] + shift));
    }
    if (periodic) {
        const Vec3 anchor = reduce_to_zone(rotated.front()) - rotated.front();
        for (auto& p : rotated) p += anchor;
    }
    v = std::move(rotated);
    const Vec3 next = v[1];
    const Vec3 prev = v[n - 1] - shift;
    if (!positively_oriented(next - prev)) {
        loop = loop.reversed();
    }
    return loop;
}

OpenArc canonical_arc(OpenArc arc)
{
    if (!positively_oriented(arc.vertices.back() - arc.vertices.front()))
        std::reverse(arc.vertices.begin(), arc.vertices.end());
    return arc;
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b)
{
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * ab - p).norm();
}

/// Distance from p to a polyline; torus-aware by comparing against the
/// image of p closest to each segment start.
double polyline_distance(const Vec3& p, const std::vector<KPoint>& pts, bool closed,
                         const Vec3& closing, bool periodic)
{
    double best = std::numeric_limits<double>::infinity();
    const std::size_t segs = closed ? pts.size() : pts.size() - 1;
    if (pts.size() == 1) {
        Vec3 q = periodic ? Vec3(pts[0] + torus_delta(pts[0], p)) : p;
        return (q - pts[0]).norm();
    }
    for (std::size_t i = 0; i < segs; ++i) {
        const Vec3& a = pts[i];
        const Vec3 b = (i + 1 < pts.size()) ? pts[i + 1] : closing;
        const Vec3 q = periodic ? Vec3(a + torus_delta(a, p)) : p;
        best = std::min(best, point_segment_distance(q, a, b));
    }
    return best;
}

struct Cluster {
    std::vector<GridCell> cells;
};

std::vector<Cluster> cluster_cells(const ScanResult& scan)
{
    const int n = scan.resolution;
    auto key = [n](const std::array<int, 3>& c) {
        return static_cast<long>(c[0]) + static_cast<long>(n) * (c[1] + static_cast<long>(n) * c[2]);
    };
    std::map<long, std::size_t> lookup;
    for (std::size_t i = 0; i < scan.flagged.size(); ++i) lookup[key(scan.flagged[i].index)] = i;
    std::vector<bool> seen(scan.flagged.size(), false);
    std::vector<Cluster> clusters;
    for (std::size_t s = 0; s < scan.flagged.size(); ++s) {
        if (seen[s]) continue;
        Cluster cl;
        std::deque<std::size_t> queue{s};
        seen[s] = true;
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            cl.cells.push_back(scan.flagged[cur]);
            const auto c = scan.flagged[cur].index;
            for (int dz = -1; dz <= 1; ++dz)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        std::array<int, 3> nb{c[0] + dx, c[1] + dy, c[2] + dz};
                        bool valid = true;
                        for (auto& v : nb) {
                            if (scan.periodic) v = ((v % n) + n) % n;
                            else if (v < 0 || v >= n) valid = false;
                        }
                        if (!valid) continue;
                        auto it = lookup.find(key(nb));
                        if (it != lookup.end() && !seen[it->second]) {
                            seen[it->second] = true;
                            queue.push_back(it->second);
                        }
                    }
        }
        clusters.push_back(std::move(cl));
    }
    return clusters;
}

std::array<int, 3> best_corner(const ScanResult& scan, const std::array<int, 3>& c)
{
    std::array<int, 3> best = c;
    double g = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 8; ++k) {
        std::array<int, 3> node{c[0] + (k & 1), c[1] + ((k >> 1) & 1), c[2] + ((k >> 2) & 1)};
        const double v = scan.node_gap(node);
        if (v < g) {
            g = v;
            best = node;
        }
    }
    return best;
}

}  // namespace

ExtractionResult extract_components(const BlochModel& model, const ScanResult& scan,
                                    const TraceOptions& options)
{
    const int gi = scan.gap_index;
    const double h = scan.spacing;
    const double step = options.step > 0.0 ? options.step : h;
    const double cover = 2.5 * h;
    const bool periodic = scan.periodic;
    ExtractionResult out;

    struct Curve {
        std::vector<KPoint> pts;
        bool closed;
        Vec3 closing;
    };
    std::vector<Curve> curves;

    auto near_known = [&](const KPoint& z, double radius) {
        for (const auto& p : out.points) {
            const Vec3 d = periodic ? torus_delta(p.position, z) : Vec3(z - p.position);
            if (d.norm() < radius) return true;
        }
        for (const auto& c : curves)
            if (polyline_distance(z, c.pts, c.closed, c.closing, periodic) < radius) return true;
        return false;
    };

    for (const auto& cluster : cluster_cells(scan)) {
        std::vector<GridCell> cells = cluster.cells;
        std::stable_sort(cells.begin(), cells.end(),
                         [](const GridCell& a, const GridCell& b) { return a.min_gap < b.min_gap; });
        std::vector<bool> covered(cells.size(), false);
        auto cover_near = [&](const std::function<double(const Vec3&)>& dist) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (!covered[i] && dist(scan.cell_center(cells[i].index)) < cover) covered[i] = true;
        };
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (covered[i]) continue;
            covered[i] = true;
            KPoint seed = scan.node_position(best_corner(scan, cells[i].index));
            if (!periodic) {
                const double lim = model.domain().extent - kBoxMargin;
                seed = seed.cwiseMax(Vec3::Constant(-lim)).cwiseMin(Vec3::Constant(lim));
            }
            WeylPoint zero;
            try {
                zero = refine_point(model, seed, gi, {1e-10, 60, 2.0 * h});
            } catch (const ConvergenceError&) {
                // gapped dip: mark the neighbourhood of this cell as explained
                const Vec3 c0 = scan.cell_center(cells[i].index);
                cover_near([&](const Vec3& c) {
                    const Vec3 d = periodic ? torus_delta(c0, c) : Vec3(c - c0);
                    return d.norm() * (cover / (1.75 * h));
                });
                continue;
            }
            if (near_known(zero.position, 0.5 * h)) {
                const KPoint z = zero.position;
                cover_near([&](const Vec3& c) {
                    return (periodic ? torus_delta(z, c) : Vec3(c - z)).norm();
                });
                continue;
            }
            switch (classify_zero(model, zero.position, gi)) {
            case ZeroShape::Point: {
                out.points.push_back(zero);
                const KPoint z = zero.position;
                cover_near([&](const Vec3& c) {
                    return (periodic ? torus_delta(z, c) : Vec3(c - z)).norm();
                });
                break;
            }
            case ZeroShape::Curve: {
                const Vec3 t0 = curve_tangent(model, zero.position, gi);
                TracedCurve fwd = march(model, gi, zero.position, t0, step, options, true);
                Curve curve;
                if (fwd.closed) {
                    fwd.vertices.pop_back();  // last vertex duplicates the start region
                    if (fwd.vertices.size() < 4)
                        throw AmbiguousLocusError("nodal loop with fewer than 4 vertices near (" +
                                                  std::to_string(zero.position.x()) + ", " +
                                                  std::to_string(zero.position.y()) + ", " +
                                                  std::to_string(zero.position.z()) + ")");
                    NodalLoop loop;
                    loop.vertices = fwd.vertices;
                    loop.winding = fwd.winding;
                    loop.gap_index = gi;
                    for (const auto& v : loop.vertices)
                        loop.max_vertex_gap = std::max(loop.max_vertex_gap, model.gap(v, gi));
                    loop = canonical_loop(std::move(loop), periodic);
                    curve = {loop.vertices, true, loop.closing_vertex()};
                    out.loops.push_back(std::move(loop));
                } else {
                    if (periodic)
                        throw AmbiguousLocusError("open nodal curve on a torus model");
                    TracedCurve bwd = march(model, gi, zero.position, -t0, step, options, false);
                    OpenArc arc;
                    arc.gap_index = gi;
                    arc.vertices.assign(bwd.vertices.rbegin(), bwd.vertices.rend());
                    arc.vertices.insert(arc.vertices.end(), fwd.vertices.begin() + 1, fwd.vertices.end());
                    for (const auto& v : arc.vertices)
                        arc.max_vertex_gap = std::max(arc.max_vertex_gap, model.gap(v, gi));
                    arc = canonical_arc(std::move(arc));
                    curve = {arc.vertices, false, arc.vertices.back()};
                    out.open_arcs.push_back(std::move(arc));
                }
                curves.push_back(curve);
                cover_near([&](const Vec3& c) {
                    return polyline_distance(c, curve.pts, curve.closed, curve.closing, periodic);
                });
                break;
            }
            case ZeroShape::Ambiguous: {
                std::ostringstream msg;
                msg << "locus dimension ambiguous: cluster of " << cells.size()
                    << " cells around (" << zero.position.x() << ", " << zero.position.y() << ", "
                    << zero.position.z() << ") is neither point-like nor curve-like";
                throw AmbiguousLocusError(msg.str());
            }
            }
        }
    }

    auto pos_less = [](const KPoint& a, const KPoint& b) { return lex_less(a, b); };
    std::sort(out.points.begin(), out.points.end(),
              [&](const WeylPoint& a, const WeylPoint& b) { return pos_less(a.position, b.position); });
    std::sort(out.loops.begin(), out.loops.end(), [&](const NodalLoop& a, const NodalLoop& b) {
        return pos_less(a.vertices.front(), b.vertices.front());
    });
    std::sort(out.open_arcs.begin(), out.open_arcs.end(), [&](const OpenArc& a, const OpenArc& b) {
        return pos_less(a.vertices.front(), b.vertices.front());
    });
    return out;
}

ExtractionResult trace_loops(const BlochModel& model, const ScanResult& scan, const TraceOptions& options)
{
    ExtractionResult all = extract_components(model, scan, options);
    all.points.clear();
    return all;
}

LocateResult locate(const BlochModel& model, const LocateOptions& options)
{
    LocateResult result;
    auto run = [&](int gi, NodalLocus& into) {
        const ScanResult scan = scan_grid(model, options.resolution, options.gap_threshold, gi);
        ExtractionResult ex = extract_components(model, scan);
        into.fermi_gap = gi;
        into.grid_spacing = scan.spacing;
        into.points = std::move(ex.points);
        into.loops = std::move(ex.loops);
        into.open_arcs = std::move(ex.open_arcs);
    };
    run(model.occupied_count(), result.locus);
    if (options.include_companions && model.reality() && model.occupied_count() >= 2)
        run(model.occupied_count() - 1, result.companion);
    else
        result.companion.fermi_gap = model.occupied_count() - 1;
    return result;
}

std::vector<Component> split_components(const NodalLocus& locus, const std::string& prefix)
{
    std::vector<Component> out;
    for (std::size_t i = 0; i < locus.points.size(); ++i)
        out.push_back({prefix + "P" + std::to_string(i), ComponentKind::Point, i, locus.points[i].gap_index});
    for (std::size_t i = 0; i < locus.loops.size(); ++i)
        out.push_back({prefix + "L" + std::to_string(i), ComponentKind::Loop, i, locus.loops[i].gap_index});
    for (std::size_t i = 0; i < locus.open_arcs.size(); ++i)
        out.push_back({prefix + "A" + std::to_string(i), ComponentKind::Arc, i, locus.open_arcs[i].gap_index});
    return out;
}

double min_component_separation(const NodalLocus& locus, bool periodic)
{
    std::vector<std::vector<KPoint>> sets;
    for (const auto& p : locus.points) sets.push_back({p.position});
    for (const auto& l : locus.loops) sets.push_back(l.vertices);
    for (const auto& a : locus.open_arcs) sets.push_back(a.vertices);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j)
            for (const auto& a : sets[i])
                for (const auto& b : sets[j]) {
                    const Vec3 d = periodic ? torus_delta(a, b) : Vec3(b - a);
                    best = std::min(best, d.norm());
                }
    return best;
}

}  // namespace nodaltop

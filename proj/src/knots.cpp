#include "nodaltop/knots.hpp"

#include "nodaltop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nodaltop {

namespace {

double segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2)
{
    // closest points of two segments (clamped parameters)
    const Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0.0, t = 0.0;
    if (a <= 1e-300 && e <= 1e-300) return r.norm();
    if (a <= 1e-300) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= 1e-300) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2), denom = a * e - b * b;
            s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p1 + s * d1) - (p2 + t * d2)).norm();
}

double max_segment(const std::vector<KPoint>& c)
{
    double m = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) m = std::max(m, (c[(i + 1) % c.size()] - c[i]).norm());
    return m;
}

double safe_asin(double x) { return std::asin(std::clamp(x, -1.0, 1.0)); }

// Signed solid-angle contribution of segment pair (p1 p2), (p3 p4).
double pair_term(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4)
{
    const Vec3 r13 = p3 - p1, r14 = p4 - p1, r23 = p3 - p2, r24 = p4 - p2;
    Vec3 n[4] = {r13.cross(r14), r14.cross(r24), r24.cross(r23), r23.cross(r13)};
    for (auto& v : n) {
        const double len = v.norm();
        if (len < 1e-300) return 0.0;
        v /= len;
    }
    const double omega = safe_asin(n[0].dot(n[1])) + safe_asin(n[1].dot(n[2])) +
                         safe_asin(n[2].dot(n[3])) + safe_asin(n[3].dot(n[0]));
    const double orient = (p4 - p3).cross(p2 - p1).dot(r13);
    return orient > 0.0 ? omega : (orient < 0.0 ? -omega : 0.0);
}

}  // namespace

double polyline_separation(const std::vector<KPoint>& a, const std::vector<KPoint>& b)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            best = std::min(best, segment_distance(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]));
    return best;
}

LinkingResult linking_number(const std::vector<KPoint>& a, const std::vector<KPoint>& b)
{
    if (a.size() < 3 || b.size() < 3) throw InvariantError("linking needs closed polylines of 3+ vertices");
    const double seg = std::max(max_segment(a), max_segment(b));
    const double sep = polyline_separation(a, b);
    if (sep < 0.5 * seg)
        throw InvariantError("curves too close for linking: separation " + std::to_string(sep) +
                             " below half a segment length");

    std::vector<double> rows(a.size());
    parallel_for(a.size(), [&](std::size_t i) {
        const Vec3& p1 = a[i];
        const Vec3& p2 = a[(i + 1) % a.size()];
        double s = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) s += pair_term(p1, p2, b[j], b[(j + 1) % b.size()]);
        rows[i] = s;
    });
    double total = 0.0;
    for (double r : rows) total += r;

    LinkingResult r;
    r.raw = total / (4.0 * kPi);
    r.value = static_cast<int>(std::lround(r.raw));
    r.residual = std::abs(r.raw - r.value);
    if (r.residual >= kLinkingTolerance)
        throw InvariantError("linking sum " + std::to_string(r.raw) + " is not an integer");
    return r;
}

LinkingResult linking_number(const NodalLoop& a, const NodalLoop& b, bool periodic)
{
    if (!periodic) return linking_number(a.vertices, b.vertices);
    if (!a.contractible() || !b.contractible())
        throw UnsupportedError("linking of non-contractible torus loops is not defined");
    const Vec3 shift = a.centroid() - b.centroid();
    Vec3 lattice;
    for (int d = 0; d < 3; ++d) lattice[d] = kTwoPi * std::round(shift[d] / kTwoPi);
    std::vector<KPoint> moved = b.vertices;
    for (auto& v : moved) v += lattice;
    return linking_number(a.vertices, moved);
}

std::vector<KPoint> close_arc_far_field(const OpenArc& arc, double reach)
{
    const auto& v = arc.vertices;
    if (v.size() < 2) throw InvariantError("arc too short to close");
    double len = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) len += (v[i] - v[i - 1]).norm();
    const double step = len / static_cast<double>(v.size() - 1);
    const Vec3 chord = (v.back() - v.front()).normalized();
    const Vec3 out = chord.unitOrthogonal();

    std::vector<KPoint> closed = v;
    const KPoint corners[3] = {v.back() + reach * out, v.front() + reach * out, v.front()};
    KPoint from = v.back();
    for (const KPoint& to : corners) {
        const int pieces = std::max(1, static_cast<int>(std::ceil((to - from).norm() / step)));
        for (int k = 1; k <= pieces; ++k) {
            if (&to == &corners[2] && k == pieces) break;  // first arc vertex closes the loop
            closed.push_back(from + (to - from) * (static_cast<double>(k) / pieces));
        }
        from = to;
    }
    return closed;
}

}  // namespace nodaltop

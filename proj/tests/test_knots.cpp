#include "catch_amalgamated.hpp"

#include "nodaltop/knots.hpp"

#include <functional>

using namespace nodaltop;
using Catch::Matchers::WithinAbs;

namespace {

using Curve = std::function<Vec3(double)>;

std::vector<KPoint> sample(const Curve& c, int n)
{
    std::vector<KPoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back(c(kTwoPi * i / n));
    return pts;
}

/// Gauss double integral by the midpoint rule with analytic-free central
/// differences for the tangents.
double gauss_quadrature(const Curve& a, const Curve& b, int n)
{
    const double d = kTwoPi / n, e = 1e-6;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) * d;
        const Vec3 ra = a(s), ta = (a(s + e) - a(s - e)) / (2 * e);
        for (int j = 0; j < n; ++j) {
            const double t = (j + 0.5) * d;
            const Vec3 rb = b(t), tb = (b(t + e) - b(t - e)) / (2 * e);
            const Vec3 r = ra - rb;
            sum += r.dot(ta.cross(tb)) / std::pow(r.norm(), 3) * d * d;
        }
    }
    return sum / (4 * kPi);
}

Vec3 torus_point(double theta, double phi, double big = 2.0, double small = 1.0)
{
    return {(big + small * std::cos(phi)) * std::cos(theta), (big + small * std::cos(phi)) * std::sin(theta),
            small * std::sin(phi)};
}

struct Pair {
    const char* name;
    Curve a, b;
};

std::vector<Pair> fixtures()
{
    return {
        {"hopf", [](double t) { return Vec3(std::cos(t), std::sin(t), 0); },
         [](double t) { return Vec3(1 + std::cos(t), 0, std::sin(t)); }},
        {"unlinked", [](double t) { return Vec3(std::cos(t), std::sin(t), 0); },
         [](double t) { return Vec3(3 + std::cos(t), 0, std::sin(t)); }},
        {"torus-link", [](double t) { return torus_point(t, 2 * t); },
         [](double t) { return torus_point(t, 2 * t + kPi); }},
        {"tilted-hopf", [](double t) { return Vec3(std::cos(t), std::sin(t), 0.3 * std::sin(3 * t)); },
         [](double t) { return Vec3(1 + 1.2 * std::cos(t), 0.2 * std::sin(2 * t), 1.1 * std::sin(t)); }},
    };
}

}  // namespace

TEST_CASE("polygon linking numbers agree with the gauss integral")
{
    for (const auto& f : fixtures()) {
        const double oracle = gauss_quadrature(f.a, f.b, 400);
        INFO(f.name << " oracle " << oracle);
        CHECK_THAT(oracle, WithinAbs(std::round(oracle), 1e-2));
        const LinkingResult lk = linking_number(sample(f.a, 300), sample(f.b, 300));
        CHECK(lk.value == static_cast<int>(std::lround(oracle)));
        CHECK(lk.residual < kLinkingTolerance);
        CHECK(lk.method == "gauss-sum");
    }
    const auto hopf = fixtures()[0];
    CHECK(std::abs(linking_number(sample(hopf.a, 100), sample(hopf.b, 100)).value) == 1);
    CHECK(std::abs(linking_number(sample(fixtures()[2].a, 400), sample(fixtures()[2].b, 400)).value) == 2);
}

TEST_CASE("linking is symmetric and odd under reversal")
{
    const auto f = fixtures()[3];
    auto a = sample(f.a, 200), b = sample(f.b, 200);
    const int ab = linking_number(a, b).value;
    CHECK(linking_number(b, a).value == ab);
    std::reverse(a.begin(), a.end());
    CHECK(linking_number(a, b).value == -ab);
}

TEST_CASE("polygon linking is exact for coarse polygons")
{
    // square hopf link with eight vertices per component
    const std::vector<KPoint> a{{-1, -1, 0}, {0, -1, 0}, {1, -1, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {-1, 1, 0}, {-1, 0, 0}};
    const std::vector<KPoint> b{{0, 0, -1}, {1, 0, -1}, {2, 0, -1}, {2, 0, 0}, {2, 0, 1}, {1, 0, 1}, {0, 0, 1}, {0, 0, 0}};
    const LinkingResult lk = linking_number(a, b);
    CHECK(std::abs(lk.value) == 1);
    CHECK(lk.residual < 1e-12);
}

TEST_CASE("curves that nearly touch are rejected")
{
    const auto f = fixtures()[0];
    auto b = sample([](double t) { return Vec3(2.02 + std::cos(t), 0, std::sin(t)); }, 20);
    CHECK_THROWS_AS(linking_number(sample(f.a, 20), b), InvariantError);
    CHECK_THAT(polyline_separation(sample(f.a, 400), sample(fixtures()[1].b, 400)), WithinAbs(1.0, 1e-3));
}

TEST_CASE("open arcs are closed far away")
{
    OpenArc axis;
    for (int i = 0; i <= 60; ++i) axis.vertices.push_back({-3.0 + 0.1 * i, 0, 0});
    const auto ring = sample([](double t) { return Vec3(0, std::cos(t), std::sin(t)); }, 200);
    const int near = linking_number(ring, close_arc_far_field(axis, 10.0)).value;
    CHECK(std::abs(near) == 1);
    CHECK(linking_number(ring, close_arc_far_field(axis, 30.0)).value == near);
    const auto closed = close_arc_far_field(axis, 10.0);
    CHECK(closed.front() == axis.vertices.front());
    CHECK(polyline_separation(ring, closed) > 0.9);
    const auto shifted = sample([](double t) { return Vec3(0, 4 + std::cos(t), std::sin(t)); }, 200);
    CHECK(linking_number(shifted, close_arc_far_field(axis, 10.0)).value == 0);
}

TEST_CASE("torus loops link only when contractible")
{
    NodalLoop a, b, wrap;
    for (int i = 0; i < 100; ++i) {
        const double t = kTwoPi * i / 100;
        a.vertices.push_back({std::cos(t), std::sin(t), 0});
        // second ring shifted by a lattice vector: the nearest image links
        b.vertices.push_back({1 + std::cos(t) + kTwoPi, 0, std::sin(t)});
        wrap.vertices.push_back({-kPi + t, 2.0, 0});
    }
    wrap.winding = {1, 0, 0};
    CHECK(std::abs(linking_number(a, b, true).value) == 1);
    CHECK_THROWS_AS(linking_number(a, wrap, true), UnsupportedError);
}

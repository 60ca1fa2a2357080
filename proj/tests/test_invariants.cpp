#include "catch_amalgamated.hpp"

#include "nodaltop/invariants.hpp"
#include "support.hpp"

#include <random>

using namespace nodaltop;
using Catch::Matchers::WithinAbs;

namespace {

LoopPath circle(const KPoint& c, double r, const Vec3& normal, int n)
{
    const Vec3 z = normal.normalized();
    const Vec3 x = z.unitOrthogonal(), y = z.cross(x);
    LoopPath p;
    for (int i = 0; i < n; ++i) {
        const double t = kTwoPi * i / n;
        p.points.push_back(c + r * (std::cos(t) * x + std::sin(t) * y));
    }
    return p;
}

double wrap(double a)
{
    a = std::fmod(a, kTwoPi);
    return a < 0 ? a + kTwoPi : a;
}

double circular_distance(double a, double b)
{
    const double d = std::abs(wrap(a) - wrap(b));
    return std::min(d, kTwoPi - d);
}

/// Half the signed solid angle swept by h/|h| along the path, seen from a
/// reference direction away from the curve.
double half_solid_angle(const TwoBandField& h, const LoopPath& p)
{
    std::vector<Vec3> u;
    Vec3 mean = Vec3::Zero();
    for (const auto& k : p.points) u.push_back(h.normalized(k)), mean += u.back();
    const Vec3 a = -mean.normalized();
    double omega = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec3& b = u[i];
        const Vec3& c = u[(i + 1) % u.size()];
        omega += 2.0 * std::atan2(a.dot(b.cross(c)), 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
    }
    return 0.5 * omega;
}

/// Winding of (h_z, h_x) around the origin along the path.
int planar_winding(const TwoBandField& h, const LoopPath& p)
{
    double total = 0.0;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        const Vec3 a = h(p.points[i]), b = h(p.points[(i + 1) % p.points.size()]);
        total += std::remainder(std::atan2(b.x(), b.z()) - std::atan2(a.x(), a.z()), kTwoPi);
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

double path_gap(const BlochModel& m, const LoopPath& p)
{
    double g = 1e300;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        g = std::min(g, m.direct_gap(p.points[i]));
        g = std::min(g, m.direct_gap(0.5 * (p.points[i] + p.points[(i + 1) % p.points.size()])));
    }
    return g;
}

std::vector<CMatrix> regauged(std::vector<CMatrix> frames, unsigned seed, bool real)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> phase(0, kTwoPi);
    for (auto& f : frames) {
        const int n = static_cast<int>(f.cols());
        if (real) {
            RMatrix a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = g(rng);
            Eigen::HouseholderQR<RMatrix> qr(a);
            const RMatrix q = qr.householderQ();  // random O(n), either determinant
            f = f * q.cast<cplx>();
        } else {
            for (int c = 0; c < n; ++c) f.col(c) *= std::polar(1.0, phase(rng));
        }
    }
    return frames;
}

}  // namespace

TEST_CASE("weyl chiralities from berry flux agree with the degree")
{
    const BlochModel w = builtin("weyl-lattice");
    const TwoBandField h = *w.two_band_field();
    for (const auto& [z, expected] : {std::pair{-kPi / 2, 1}, std::pair{kPi / 2, -1}}) {
        for (int mesh : {32, 64, 128}) {
            ClosedSurface s = sphere_around({0, 0, z}, 0.3, mesh, mesh);
            const IntegerCharge c = chern_flux(w, s);
            CHECK(c.value == expected);
            CHECK(c.residual < kChargeTolerance);
            CHECK(c.method == "berry-flux");
            CHECK(degree(h, s).value == expected);
            const ClosedSurface r = s.reversed();
            CHECK(chern_flux_from_frames(r, surface_frames(w, r)).value == -expected);
            CHECK(degree(h, r).value == -expected);
        }
    }
    ClosedSurface empty = sphere_around({kPi / 2, kPi / 2, 0}, 0.5, 32, 32);
    CHECK(chern_flux(w, empty).value == 0);
    ClosedSurface touching = sphere_around({0, 0, kPi / 2 - 0.3}, 0.3, 32, 32);
    CHECK_THROWS_AS(chern_flux(w, touching), SurfaceError);
}

TEST_CASE("berry flux is gauge invariant")
{
    const BlochModel w = builtin("weyl-lattice");
    ClosedSurface s = sphere_around({0, 0, -kPi / 2}, 0.4, 48, 48);
    validate(s, w);
    const auto frames = surface_frames(w, s);
    const IntegerCharge base = chern_flux_from_frames(s, frames);
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const IntegerCharge c = chern_flux_from_frames(s, regauged(frames, seed, false));
        CHECK(c.value == base.value);
        CHECK_THAT(c.raw, WithinAbs(base.raw, 1e-9));
    }
}

TEST_CASE("slice chern numbers match a curvature quadrature")
{
    for (unsigned seed : {0u, 11u, 12u}) {
        const BlochModel m = seed == 0 ? builtin("weyl-lattice") : testing::random_two_band(seed);
        const TwoBandField h = *m.two_band_field();
        for (double z : {-2.6, -1.0, 0.0, 1.3, 2.9}) {
            ClosedSurface s = slice_torus(Axis::Z, z, 64, 64);
            if (validate(s, m) < 0.05) continue;
            const double quad = testing::slice_chern_quadrature(h, 2, z, 200);
            INFO("seed " << seed << " z " << z);
            CHECK_THAT(quad, WithinAbs(std::round(quad), 0.05));
            CHECK(chern_flux(m, s).value == static_cast<int>(std::lround(quad)));
            CHECK(degree(h, s).value == static_cast<int>(std::lround(quad)));
        }
    }
}

TEST_CASE("chern scan steps across the weyl points")
{
    const BlochModel w = builtin("weyl-lattice");
    const auto scan = chern_scan(w, Axis::Z, {-2.5, -kPi / 2, 0.0, 1.0, 2.5}, 48);
    REQUIRE(scan.size() == 5);
    CHECK(scan[0].valid);
    CHECK(scan[0].chern == 0);
    CHECK_FALSE(scan[1].valid);
    CHECK_FALSE(scan[1].note.empty());
    CHECK(scan[2].chern == 1);
    CHECK(scan[3].chern == 1);
    CHECK(scan[4].chern == 0);
    CHECK_THROWS_AS(chern_scan(builtin("four-band-linked"), Axis::Z, {0.0}), UnsupportedError);
}

TEST_CASE("meridian berry phase of the real nodal loop is pi")
{
    const BlochModel m = builtin("nodal-loop-real");
    const NodalLoop loop = locate(m).locus.loops.at(0);
    for (std::size_t at : {std::size_t{0}, loop.vertices.size() / 3}) {
        const LoopPath mer = meridian_path(loop, 0.15, 400, at);
        const BerryPhaseResult b = berry_phase(m, mer);
        REQUIRE(b.quantized);
        CHECK(*b.quantized == kPi);
        CHECK(b.quantization_residual < kBerryTolerance);
        CHECK(w1_along(m, mer) == 1);
        CHECK(w1_along(m, mer.repeated(2)) == 0);
        CHECK(*berry_phase(m, mer.reversed()).quantized == kPi);
        CHECK(*berry_phase_from_frames(regauged(occupied_frames(m, mer.points), 3, true), true).quantized == kPi);
    }
    const LoopPath gapped = circle({kPi / 2 + 0.4, kPi / 2 + 0.4, 0.5}, 0.3, {0.2, 0.1, 1}, 400);
    const BerryPhaseResult b0 = berry_phase(m, gapped);
    CHECK(*b0.quantized == 0.0);
    CHECK(b0.quantization_residual < kBerryTolerance);
    CHECK(w1_along(m, gapped) == 0);
    // passes through the nodal point (pi/2, 0, 0)
    CHECK_THROWS_AS(berry_phase(m, circle({kPi / 2, 0.5, 0}, 0.5, {0, 0, 1}, 200)), InvariantError);
}

TEST_CASE("real berry phases follow the planar winding of h")
{
    const BlochModel m = builtin("nodal-loop-real");
    const TwoBandField h = *m.two_band_field();
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> pos(-kPi, kPi), rad(0.2, 1.5), dir(-1, 1);
    int accepted = 0, nontrivial = 0;
    while (accepted < 20) {
        const LoopPath p = circle({pos(rng), pos(rng), 0.6 * pos(rng) / kPi}, rad(rng), {dir(rng), dir(rng), dir(rng)}, 400);
        if (path_gap(m, p) < 0.05) continue;
        ++accepted;
        const int winding = planar_winding(h, p);
        const BerryPhaseResult b = berry_phase(m, p);
        CHECK(b.quantization_residual < kBerryTolerance);
        CHECK(*b.quantized == (winding % 2 ? kPi : 0.0));
        CHECK(w1_along(m, p) == static_cast<int>(std::lround(*b.quantized / kPi)) % 2);
        nontrivial += winding % 2 != 0;
    }
    CHECK(nontrivial > 0);
}

TEST_CASE("complex berry phases are half the solid angle of h")
{
    const BlochModel w = builtin("weyl-lattice");
    const TwoBandField h = *w.two_band_field();
    for (const Vec3& n : {Vec3(0, 0, 1), Vec3(1, 0.3, 0.2), Vec3(-0.2, 1, 0.5)})
        for (double r : {0.1, 0.3, 0.6}) {
            const LoopPath p = circle({0, 0, -kPi / 2}, r, n, 300);
            const BerryPhaseResult b = berry_phase(w, p);
            CHECK_FALSE(b.quantized);
            CHECK(circular_distance(b.phase, half_solid_angle(h, p)) < 1e-3);
            CHECK(circular_distance(berry_phase(w, p.reversed()).phase, -b.phase) < 1e-9);
            CHECK(circular_distance(berry_phase(w, p.repeated(2)).phase, 2 * b.phase) < 1e-9);
            CHECK(circular_distance(berry_phase_from_frames(regauged(occupied_frames(w, p.points), 9, false), false).phase,
                                    b.phase) < 1e-9);
        }
    CHECK_THROWS_AS(w1_along(w, circle({0, 0, 0}, 0.5, {0, 0, 1}, 50)), UnsupportedError);
}

TEST_CASE("w2 of the linked four-band loop is one and mesh stable")
{
    const BlochModel m = builtin("four-band-linked");
    const LocateResult r = locate(m);
    const NodalLoop& loop = r.locus.loops.at(0);
    const auto& axis = r.companion.open_arcs.at(0).vertices;
    for (int mesh : {64, 128}) {
        ClosedSurface t = tube_around(loop, 0.15, mesh, mesh, axis, m.domain());
        const W2Result w = w2_on(m, t);
        CHECK(w.value == 1);
        CHECK(w.plaquette_value == 1);
        CHECK(w.crossing_count % 2 == 1);
        CHECK(w.w1_v == 1);  // the meridian sees the Berry phase pi
        CHECK(w.mesh_u == mesh);
        CHECK(w.wilson_phases.size() == static_cast<std::size_t>(mesh) + 1);
        const auto frames = surface_frames(m, t);
        CHECK(w2_from_frames(t, regauged(frames, 4, true)).value == 1);
        CHECK(w2_from_frames(t.reversed(), frames).value == 1);
    }
    ClosedSurface big = sphere_around({0, 0, 0}, 2.0, 64, 64, m.domain());
    CHECK(w2_on(m, big).value == 1);
    ClosedSurface small = sphere_around({0, 0, 2.0}, 0.5, 32, 32, m.domain());
    CHECK(w2_on(m, small).value == 0);
}

TEST_CASE("w2 needs a real bundle of rank two or more")
{
    ClosedSurface s = sphere_around({0, 0, -kPi / 2}, 0.3, 16, 16);
    CHECK_THROWS_AS(w2_on(builtin("weyl-lattice"), s), UnsupportedError);
    ClosedSurface t = sphere_around({kPi / 2, kPi / 2, 0.3}, 0.3, 16, 16);
    CHECK_THROWS_AS(w2_on(builtin("nodal-loop-real"), t), UnsupportedError);
    ClosedSurface g = sphere_around({kPi / 2, kPi / 2, kPi / 2}, 0.3, 32, 32);
    CHECK(w2_on(builtin("four-band-linked-lattice"), g).value == 0);
}

TEST_CASE("polar factors are orthogonal and unitary")
{
    std::mt19937 rng(2);
    std::normal_distribution<double> g;
    RMatrix a(3, 3);
    CMatrix c(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = g(rng), c(i, j) = cplx(g(rng), g(rng));
    const RMatrix o = orthogonal_part(a);
    CHECK((o.transpose() * o - RMatrix::Identity(3, 3)).norm() < 1e-12);
    CHECK(o.determinant() * a.determinant() > 0);
    const CMatrix u = unitary_part(c);
    CHECK((u.adjoint() * u - CMatrix::Identity(3, 3)).norm() < 1e-12);
    // symmetric positive factor
    const RMatrix p = o.transpose() * a;
    CHECK((p - p.transpose()).norm() < 1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<RMatrix>(p).eigenvalues().minCoeff() > 0);
}

#pragma once

#include "nodaltop/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace nodaltop::testing {

inline Harmonic harmonic(HarmonicKind kind, int x, int y, int z, double a) { return {kind, {x, y, z}, a}; }

/// Lattice Weyl model plus small random Fourier perturbations of every
/// component; zeros stay isolated and generic.
inline BlochModel random_two_band(unsigned seed, double strength = 0.15)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-strength, strength);
    std::uniform_real_distribution<double> mass(1.3, 2.7);
    std::uniform_int_distribution<int> freq(-1, 1);
    std::uniform_int_distribution<int> coin(0, 1);
    std::array<Coefficient, 3> c;
    c[0].harmonics.push_back(harmonic(HarmonicKind::Sin, 1, 0, 0, 1.0));
    c[1].harmonics.push_back(harmonic(HarmonicKind::Sin, 0, 1, 0, 1.0));
    c[2].harmonics = {harmonic(HarmonicKind::Cos, 1, 0, 0, 1.0), harmonic(HarmonicKind::Cos, 0, 1, 0, 1.0),
                      harmonic(HarmonicKind::Cos, 0, 0, 1, 1.0), harmonic(HarmonicKind::Cos, 0, 0, 0, -mass(rng))};
    for (auto& coeff : c)
        for (int t = 0; t < 3; ++t) {
            const auto kind = coin(rng) ? HarmonicKind::Cos : HarmonicKind::Sin;
            int x = freq(rng), y = freq(rng), z = freq(rng);
            if (x == 0 && y == 0 && z == 0) x = 1;
            coeff.harmonics.push_back(harmonic(kind, x, y, z, amp(rng)));
        }
    return BlochModel("random-" + std::to_string(seed), 1, false, Domain::torus(),
                      {{"X", c[0]}, {"Y", c[1]}, {"Z", c[2]}});
}

struct SignedZeros {
    int count = 0;
    int chirality_sum = 0;
    std::vector<KPoint> locations;
    std::vector<int> signs;
};

/// Zeros of a two-band field by piecewise-linear interpolation on the six
/// Kuhn tetrahedra of every cube of an n^3 grid over the torus. Each generic
/// zero lies in exactly one tetrahedron; the sign is that of det dh/dk.
inline SignedZeros tetrahedral_zeros(const TwoBandField& h, int n)
{
    const double d = kTwoPi / n;
    // off-lattice origin, different per axis, keeps zeros off cube and Kuhn faces
    const Vec3 o = Vec3::Constant(-kPi) + d * Vec3(0.3183, 0.2718, 0.1414);
    std::vector<Vec3> f(static_cast<std::size_t>(n) * n * n);
    auto at = [&](int i, int j, int k) -> Vec3& { return f[(static_cast<std::size_t>(k % n) * n + j % n) * n + i % n]; };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) at(i, j, k) = h(o + d * Vec3(i, j, k));

    static const std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    SignedZeros out;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                std::array<Vec3, 8> corner;
                for (int c = 0; c < 8; ++c) corner[c] = at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
                bool may_vanish = true;
                for (int comp = 0; comp < 3 && may_vanish; ++comp) {
                    double lo = corner[0][comp], hi = lo;
                    for (const auto& v : corner) lo = std::min(lo, v[comp]), hi = std::max(hi, v[comp]);
                    may_vanish = lo <= 0.0 && hi >= 0.0;
                }
                if (!may_vanish) continue;
                for (const auto& p : perms) {
                    std::array<int, 4> idx{0, 0, 0, 0};
                    Eigen::Matrix3d dk = Eigen::Matrix3d::Zero();
                    for (int s = 0; s < 3; ++s) {
                        idx[s + 1] = idx[s] | (1 << p[s]);
                        dk(p[s], s) = d;
                    }
                    Eigen::Matrix3d dh;
                    for (int s = 0; s < 3; ++s) dh.col(s) = corner[idx[s + 1]] - corner[idx[0]];
                    // barycentric solve: h0 + dh * t = 0
                    const double det = dh.determinant();
                    if (det == 0.0) continue;
                    const Vec3 t = dh.partialPivLu().solve(-corner[idx[0]]);
                    if (t.minCoeff() < 0.0 || t.sum() > 1.0) continue;
                    const int sign = (det > 0) == (dk.determinant() > 0) ? 1 : -1;
                    ++out.count;
                    out.chirality_sum += sign;
                    out.locations.push_back(reduce_to_zone(o + d * Vec3(i, j, k) + dk * t));
                    out.signs.push_back(sign);
                }
            }
    return out;
}

/// Chern number of the lower band on the slice k_axis = value as the
/// continuum integral of h.(d1 h x d2 h)/(4 pi |h|^3), midpoint rule with
/// central differences.
inline double slice_chern_quadrature(const TwoBandField& h, int axis, double value, int n)
{
    const double d = kTwoPi / n, e = 1e-5;
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            KPoint k = KPoint::Zero();
            k[axis] = value;
            k[a1] = -kPi + (i + 0.5) * d;
            k[a2] = -kPi + (j + 0.5) * d;
            KPoint p1 = k, m1 = k, p2 = k, m2 = k;
            p1[a1] += e, m1[a1] -= e, p2[a2] += e, m2[a2] -= e;
            const Vec3 u = h.normalized(k);
            const Vec3 du = (h.normalized(p1) - h.normalized(m1)) / (2 * e);
            const Vec3 dv = (h.normalized(p2) - h.normalized(m2)) / (2 * e);
            sum += u.dot(du.cross(dv)) * d * d;
        }
    return sum / (4 * kPi);
}

}  // namespace nodaltop::testing

#include "catch_amalgamated.hpp"

#include "nodaltop/clifford.hpp"

#include <random>

using namespace nodaltop;
using Catch::Matchers::WithinAbs;

namespace {

RMatrix random_rotation(std::mt19937& rng, int n)
{
    std::normal_distribution<double> g;
    RMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<RMatrix> qr(a);
    RMatrix q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1;
    return q;
}

Multivector basis(int dim, int i)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[i] = 1.0;
    return Multivector::vector(v);
}

}  // namespace

TEST_CASE("clifford products anticommute on orthogonal vectors")
{
    for (int i = 0; i < 4; ++i) {
        CHECK((basis(4, i) * basis(4, i)).scalar_part() == 1.0);
        for (int j = i + 1; j < 4; ++j) {
            const Multivector ab = basis(4, i) * basis(4, j), ba = basis(4, j) * basis(4, i);
            CHECK(ab.dot(-ba) == 1.0);
            CHECK(ab.scalar_part() == 0.0);
            CHECK((ab * ab).scalar_part() == -1.0);
        }
    }
    const Multivector e12 = basis(3, 0) * basis(3, 1);
    CHECK(e12.reverse().dot(-e12) == 1.0);
}

TEST_CASE("spin lifts cover their rotation")
{
    std::mt19937 rng(17);
    for (int n = 2; n <= 5; ++n)
        for (int trial = 0; trial < 40; ++trial) {
            const RMatrix r = random_rotation(rng, n);
            const Multivector psi = spin_lift(r);
            CHECK_THAT(psi.norm(), WithinAbs(1.0, 1e-12));
            CHECK((psi.rotation() - r).norm() < 1e-10);
            CHECK((psi.reverse().rotation() - r.transpose()).norm() < 1e-10);
        }
    CHECK_THAT(std::abs(spin_lift(RMatrix::Identity(3, 3)).scalar_part()), WithinAbs(1.0, 1e-15));
}

TEST_CASE("lifts compose up to sign")
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const RMatrix a = random_rotation(rng, 3), b = random_rotation(rng, 3);
        const Multivector prod = spin_lift(a) * spin_lift(b);
        CHECK_THAT(std::abs(prod.dot(spin_lift(a * b))), WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("a full turn lifts to minus one")
{
    // follow the continuous lift of the rotation by t in the e1 e2 plane
    Multivector current = Multivector::scalar(3, 1.0);
    const int steps = 64;
    for (int s = 1; s <= steps; ++s) {
        const double t = kTwoPi * s / steps;
        RMatrix r = RMatrix::Identity(3, 3);
        r(0, 0) = r(1, 1) = std::cos(t);
        r(1, 0) = std::sin(t);
        r(0, 1) = -std::sin(t);
        Multivector lift = spin_lift(r);
        if (lift.dot(current) < 0) lift = -lift;
        current = lift;
    }
    CHECK_THAT(current.scalar_part(), WithinAbs(-1.0, 1e-12));
}

TEST_CASE("improper or non-orthogonal matrices have no lift")
{
    RMatrix reflect = RMatrix::Identity(3, 3);
    reflect(2, 2) = -1;
    CHECK_THROWS_AS(spin_lift(reflect), InvariantError);
    CHECK_THROWS_AS(spin_lift(2.0 * RMatrix::Identity(2, 2)), InvariantError);
}

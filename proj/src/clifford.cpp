#include "nodaltop/clifford.hpp"

#include <bit>

namespace nodaltop {

namespace {

// Sign from reordering e_A e_B into canonical blade order.
double reorder_sign(unsigned a, unsigned b)
{
    int swaps = 0;
    a >>= 1;
    while (a) {
        swaps += std::popcount(a & b);
        a >>= 1;
    }
    return (swaps & 1) ? -1.0 : 1.0;
}

}  // namespace

Multivector::Multivector(int dim) : dim_(dim), c_(std::size_t{1} << dim, 0.0)
{
    if (dim < 1 || dim > 10) throw InvariantError("Clifford dimension out of range");
}

Multivector Multivector::scalar(int dim, double s)
{
    Multivector m(dim);
    m.c_[0] = s;
    return m;
}

Multivector Multivector::vector(const Eigen::VectorXd& v)
{
    Multivector m(static_cast<int>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) m.c_[std::size_t{1} << i] = v[i];
    return m;
}

Multivector Multivector::operator*(const Multivector& other) const
{
    Multivector r(dim_);
    const unsigned n = static_cast<unsigned>(c_.size());
    for (unsigned a = 0; a < n; ++a) {
        if (c_[a] == 0.0) continue;
        for (unsigned b = 0; b < n; ++b) {
            if (other.c_[b] == 0.0) continue;
            r.c_[a ^ b] += reorder_sign(a, b) * c_[a] * other.c_[b];
        }
    }
    return r;
}

Multivector Multivector::operator-() const
{
    Multivector r = *this;
    for (double& x : r.c_) x = -x;
    return r;
}

Multivector Multivector::reverse() const
{
    Multivector r = *this;
    for (unsigned a = 0; a < r.c_.size(); ++a) {
        const int g = std::popcount(a);
        if ((g * (g - 1) / 2) % 2) r.c_[a] = -r.c_[a];
    }
    return r;
}

double Multivector::dot(const Multivector& other) const
{
    double s = 0.0;
    for (std::size_t a = 0; a < c_.size(); ++a) s += c_[a] * other.c_[a];
    return s;
}

RMatrix Multivector::rotation() const
{
    RMatrix r(dim_, dim_);
    const Multivector rev = reverse();
    for (int j = 0; j < dim_; ++j) {
        const Multivector img = (*this) * Multivector::vector(Eigen::VectorXd::Unit(dim_, j)) * rev;
        for (int i = 0; i < dim_; ++i) r(i, j) = img.c_[std::size_t{1} << i];
    }
    return r;
}

Multivector spin_lift(const RMatrix& rotation)
{
    const int n = static_cast<int>(rotation.rows());
    if (rotation.cols() != n) throw InvariantError("spin lift needs a square matrix");
    if ((rotation.transpose() * rotation - RMatrix::Identity(n, n)).norm() > 1e-8 ||
        rotation.determinant() < 0.0)
        throw InvariantError("spin lift needs a proper rotation");

    // Reduce M to the identity column by column: H_k ... H_1 R = I, so
    // R = H_1 ... H_k and the spinor is v_1 ... v_k.
    RMatrix m = rotation;
    Multivector psi = Multivector::scalar(n, 1.0);
    auto reflect = [&](Eigen::VectorXd v) {
        v.normalize();
        m -= 2.0 * v * (v.transpose() * m);
        psi = psi * Multivector::vector(v);
    };
    for (int j = 0; j < n; ++j) {
        const Eigen::VectorXd a = m.col(j);
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
        const double dist = (a - e).norm();
        if (dist < 1e-14) continue;
        if (dist > 0.5) {
            reflect(a - e);
        } else {
            // a close to e: pass through -e so no reflection vector is tiny
            reflect(a + e);
            reflect(e);
        }
    }
    return psi;
}

}  // namespace nodaltop

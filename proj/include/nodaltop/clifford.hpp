#pragma once

#include "nodaltop/types.hpp"

#include <vector>

namespace nodaltop {

/// Element of the real Clifford algebra of Euclidean R^N, stored on the
/// 2^N blade basis (bit i of the blade index = factor e_i).
class Multivector {
public:
    explicit Multivector(int dim);

    static Multivector scalar(int dim, double s);
    static Multivector vector(const Eigen::VectorXd& v);

    int dim() const { return dim_; }
    double scalar_part() const { return c_[0]; }
    double coefficient(unsigned blade) const { return c_[blade]; }

    Multivector operator*(const Multivector& other) const;
    Multivector operator-() const;
    Multivector reverse() const;

    /// Coefficient-wise Euclidean inner product; for unit spinors a and b,
    /// a.dot(b) = scalar part of a * reverse(b).
    double dot(const Multivector& other) const;
    double norm() const { return std::sqrt(dot(*this)); }

    /// Rotation x -> psi x reverse(psi) on vectors, as an N x N matrix.
    RMatrix rotation() const;

private:
    int dim_;
    std::vector<double> c_;
};

/// One of the two spinors covering rotation R in SO(N), built from a
/// Cartan-Dieudonne reflection chain. Throws InvariantError if R is not a
/// proper rotation.
Multivector spin_lift(const RMatrix& rotation);

}  // namespace nodaltop

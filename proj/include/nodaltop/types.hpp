#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nodaltop {

using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Momentum-space point. Torus points are compared after reduction to [-pi, pi)^3.
using KPoint = Vec3;

/// Reduce a single coordinate into [-pi, pi).
inline double reduce_angle(double k)
{
    double r = k - kTwoPi * std::floor((k + kPi) / kTwoPi);
    if (r >= kPi) r -= kTwoPi;
    if (r < -kPi) r += kTwoPi;
    return r;
}

inline KPoint reduce_to_zone(const KPoint& k)
{
    return {reduce_angle(k.x()), reduce_angle(k.y()), reduce_angle(k.z())};
}

/// Shortest displacement from a to b on the 3-torus.
inline Vec3 torus_delta(const KPoint& a, const KPoint& b)
{
    return {reduce_angle(b.x() - a.x()), reduce_angle(b.y() - a.y()), reduce_angle(b.z() - a.z())};
}

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model evaluated outside its domain, or a geometric object leaving it.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed model config, unknown builtin, parameter out of range.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Iterative refinement did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Cluster of gapless cells that is neither point-like nor curve-like.
class AmbiguousLocusError : public Error {
public:
    using Error::Error;
};

/// Surface construction or validation failure.
class SurfaceError : public Error {
public:
    using Error::Error;
};

/// Invariant could not be rounded to an integer within its tolerance,
/// or the gap closed along the integration path.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Operation not defined for this kind of model (e.g. w1 of a complex bundle).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

}  // namespace nodaltop

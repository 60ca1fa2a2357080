#pragma once

#include "nodaltop/model.hpp"
#include "nodaltop/surfaces.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nodaltop {

/// Occupied eigenframe (band_count x occupied) per point. For real models the
/// frames are real with every column's largest-magnitude entry positive.
std::vector<CMatrix> occupied_frames(const BlochModel& model, const std::vector<KPoint>& points,
                                     int occupied_count = 0);

/// Frames at the unique vertices of a surface.
std::vector<CMatrix> surface_frames(const BlochModel& model, const ClosedSurface& surface,
                                    int occupied_count = 0);

/// Orthogonal / unitary factor of the polar decomposition.
RMatrix orthogonal_part(const RMatrix& m);
CMatrix unitary_part(const CMatrix& m);

struct IntegerCharge {
    int value = 0;
    double raw = 0.0;       // before rounding
    double residual = 0.0;  // |raw - value|
    std::string method;     // berry-flux | degree
    std::string surface_id;
    int mesh_u = 0;
    int mesh_v = 0;
};

/// Rounding tolerance of Chern / degree integers.
inline constexpr double kChargeTolerance = 0.01;

/// Plaquette Berry flux through the surface (outward / +axis orientation).
/// Each quad contributes -arg of its product of unitarized overlap
/// determinants, so the lower band of k.sigma around k = 0 gives +1.
IntegerCharge chern_flux(const BlochModel& model, ClosedSurface& surface, int occupied_count = 0);
IntegerCharge chern_flux_from_frames(const ClosedSurface& surface, const std::vector<CMatrix>& frames);

/// Degree of h/|h| restricted to the surface, from signed spherical triangle areas.
IntegerCharge degree(const TwoBandField& field, const ClosedSurface& surface);

struct BerryPhaseResult {
    double phase = 0.0;                 // in [0, 2pi)
    std::optional<double> quantized;    // 0 or pi for real models
    double quantization_residual = 0.0; // angular distance to `quantized`
};

inline constexpr double kBerryTolerance = 1e-3;

BerryPhaseResult berry_phase(const BlochModel& model, const LoopPath& path, int occupied_count = 0);
BerryPhaseResult berry_phase_from_frames(const std::vector<CMatrix>& frames, bool real);

/// Orientation character of the real occupied bundle along a closed path.
int w1_along(const BlochModel& model, const LoopPath& path, int occupied_count = 0);
int w1_from_frames(const std::vector<CMatrix>& frames);

struct W2Result {
    int value = 0;
    /// Sign changes of the spinor trace of the u-cycle Wilson loop along v,
    /// i.e. passages of a Wilson eigenphase pair through pi.
    int crossing_count = 0;
    /// Same class from the plaquette spin-lift obstruction.
    int plaquette_value = 0;
    int w1_u = 0;
    int w1_v = 0;
    /// max over plaquettes of 1 - |spinor trace|; small on adequate meshes.
    double residual = 0.0;
    std::string surface_id;
    int mesh_u = 0;
    int mesh_v = 0;
    /// Eigenphases of the u-cycle Wilson loop per v row, for plotting.
    std::vector<std::vector<double>> wilson_phases;
};

/// Second Stiefel-Whitney number of the real occupied bundle on a closed
/// surface, evaluated on E + det E so that it stays defined when the bundle is
/// non-orientable along a cycle (w1^2 vanishes on orientable surfaces).
W2Result w2_on(const BlochModel& model, ClosedSurface& surface, int occupied_count = 0);
W2Result w2_from_frames(const ClosedSurface& surface, const std::vector<CMatrix>& frames);

struct SliceChern {
    double value = 0.0;
    bool valid = false;
    int chern = 0;
    double residual = 0.0;
    double min_gap = 0.0;
    std::string note;  // why a slice was skipped
};

std::vector<SliceChern> chern_scan(const BlochModel& model, Axis axis, const std::vector<double>& values,
                                   int mesh = 64);

}  // namespace nodaltop

#pragma once

#include "nodaltop/locus.hpp"
#include "nodaltop/model.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace nodaltop {

enum class SurfaceKind { Sphere, TubeTorus, SliceTorus };

std::string to_string(SurfaceKind kind);

/// Closed discretized 1-cycle; the last point connects back to the first.
struct LoopPath {
    std::vector<KPoint> points;

    LoopPath reversed() const;
    /// The same cycle traversed `times` times.
    LoopPath repeated(int times) const;
};

/// Quadrilateral mesh of a closed surface on an (n_u+1) x (n_v+1) parameter
/// grid. u is always a closed direction; v is closed for tori and runs from
/// the north to the south pole on spheres. Grid nodes map to unique vertex
/// ids, so identified nodes (seams, poles) share one vertex.
class ClosedSurface {
public:
    SurfaceKind kind = SurfaceKind::Sphere;
    std::string id;
    int n_u = 0;
    int n_v = 0;
    /// +1 if the (u, v) parameter order gives the outward (or +axis) normal.
    int uv_orientation = 1;
    std::vector<KPoint> vertices;  // unique vertices
    std::vector<KPoint> grid;      // (n_u+1)*(n_v+1) node positions, continuous chart
    std::vector<int> grid_ids;
    double min_gap = std::numeric_limits<double>::quiet_NaN();

    bool v_periodic() const { return kind != SurfaceKind::Sphere; }
    int vertex_id(int i, int j) const { return grid_ids[node(i, j)]; }
    const KPoint& position(int i, int j) const { return grid[node(i, j)]; }

    /// Vertex ids of quad (i, j) in positive (outward) circulation.
    std::array<int, 4> quad(int i, int j) const;
    KPoint quad_center(int i, int j) const;

    bool validated() const { return !std::isnan(min_gap); }
    ClosedSurface reversed() const;

    LoopPath u_cycle(int j) const;
    LoopPath v_cycle(int i) const;

private:
    std::size_t node(int i, int j) const { return static_cast<std::size_t>(j) * (n_u + 1) + i; }
};

/// Latitude-longitude sphere; pole rows collapse to single vertices.
ClosedSurface sphere_around(const KPoint& center, double radius, int n_u, int n_v,
                            const Domain& domain = Domain::torus());

/// Torus of the given radius around a closed nodal loop, built on a
/// rotation-minimizing frame. `others` are points of other locus components
/// the tube must keep clear of.
ClosedSurface tube_around(const NodalLoop& loop, double radius, int n_u, int n_v,
                          const std::vector<KPoint>& others = {},
                          const Domain& domain = Domain::torus());

/// Meridian circle of the tube around `loop` at loop vertex `at`.
LoopPath meridian_path(const NodalLoop& loop, double radius, int n_points, std::size_t at = 0);

enum class Axis { X = 0, Y = 1, Z = 2 };
Axis parse_axis(const std::string& s);
char axis_name(Axis a);

/// Coordinate 2-torus k_axis = value with +axis normal.
ClosedSurface slice_torus(Axis axis, double value, int n_u, int n_v);

/// Minimal direct gap over vertices and quad centres; stored on the surface.
double validate(ClosedSurface& surface, const BlochModel& model, int gap_index = 0);

/// Surfaces must keep at least this gap before invariants are evaluated on them.
inline constexpr double kSurfaceGapFloor = 1e-2;

/// Validated slice; throws SurfaceError if the slice meets the nodal set.
ClosedSurface gapped_slice(const BlochModel& model, Axis axis, double value, int n,
                           double floor = kSurfaceGapFloor);

}  // namespace nodaltop

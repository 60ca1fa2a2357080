#pragma once

#include "nodaltop/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace nodaltop {

struct WeylPoint {
    KPoint position;
    double residual_gap = 0.0;
    int refinement_iterations = 0;
    int gap_index = 0;
};

/// Closed oriented polyline. Vertices live in a continuous chart: the
/// closing segment runs from the last vertex to first + 2*pi*winding.
struct NodalLoop {
    std::vector<KPoint> vertices;
    std::array<int, 3> winding{0, 0, 0};
    double max_vertex_gap = 0.0;
    int gap_index = 0;

    bool contractible() const { return winding == std::array<int, 3>{0, 0, 0}; }
    KPoint closing_vertex() const;
    KPoint centroid() const;
    double length() const;
    NodalLoop reversed() const;
};

/// Nodal curve of a continuum model that leaves the box.
struct OpenArc {
    std::vector<KPoint> vertices;
    double max_vertex_gap = 0.0;
    int gap_index = 0;
};

struct NodalLocus {
    int fermi_gap = 0;
    double grid_spacing = 0.0;
    std::vector<WeylPoint> points;
    std::vector<NodalLoop> loops;
    std::vector<OpenArc> open_arcs;

    bool empty() const { return points.empty() && loops.empty() && open_arcs.empty(); }
};

struct GridCell {
    std::array<int, 3> index{0, 0, 0};
    double min_gap = 0.0;
};

/// Gap samples on a regular grid plus the cells flagged as gap-closing candidates.
struct ScanResult {
    int resolution = 0;
    double spacing = 0.0;
    KPoint origin;
    bool periodic = true;
    int gap_index = 0;
    double threshold = 0.0;
    std::vector<double> node_gaps;  // (resolution[+1])^3, x fastest
    std::vector<GridCell> flagged;  // sorted by index

    int nodes_per_axis() const { return periodic ? resolution : resolution + 1; }
    KPoint node_position(const std::array<int, 3>& i) const;
    KPoint cell_center(const std::array<int, 3>& c) const;
    double node_gap(std::array<int, 3> i) const;
};

/// Samples the gap above the lowest gap_index bands on a resolution^3 grid
/// over the model's domain and flags every cell whose minimal corner gap is
/// below gap_threshold. gap_index 0 means the occupied gap; a non-positive
/// threshold selects 1.5 grid spacings.
ScanResult scan_grid(const BlochModel& model, int resolution, double gap_threshold = 0.0,
                     int gap_index = 0);

struct RefineOptions {
    double tolerance = 1e-8;
    int max_iterations = 60;
    double max_step = 0.5;
};

/// Newton iteration on the squared gap from seed. Throws ConvergenceError
/// (carrying the final gap) when the gap stays above tolerance.
WeylPoint refine_point(const BlochModel& model, const KPoint& seed, int gap_index = 0,
                       const RefineOptions& options = {});

enum class ZeroShape { Point, Curve, Ambiguous };

/// Rank of the squared-gap Hessian at a gap zero: 3 for isolated crossings,
/// 2 along nodal curves.
ZeroShape classify_zero(const BlochModel& model, const KPoint& zero, int gap_index);

struct TraceOptions {
    double step = 0.0;          // default: scan grid spacing
    double vertex_tolerance = 1e-6;
    int max_vertices = 20000;
};

struct ExtractionResult {
    std::vector<WeylPoint> points;
    std::vector<NodalLoop> loops;
    std::vector<OpenArc> open_arcs;
};

/// Groups flagged cells into clusters and turns every cluster into refined
/// points or traced curves. Throws AmbiguousLocusError for clusters that are
/// neither.
ExtractionResult extract_components(const BlochModel& model, const ScanResult& scan,
                                    const TraceOptions& options = {});

/// Curve part of extract_components: closed loops and (continuum) open arcs.
ExtractionResult trace_loops(const BlochModel& model, const ScanResult& scan,
                             const TraceOptions& options = {});

struct LocateOptions {
    int resolution = 48;
    double gap_threshold = 0.0;
    /// Also extract crossings among occupied bands (gap occupied-1) of real
    /// multi-band models; these are the companion lines entering linking.
    bool include_companions = true;
};

struct LocateResult {
    NodalLocus locus;      // crossings at the Fermi gap
    NodalLocus companion;  // crossings one gap below (may be empty)
};

LocateResult locate(const BlochModel& model, const LocateOptions& options = {});

enum class ComponentKind { Point, Loop, Arc };

struct Component {
    std::string id;
    ComponentKind kind;
    std::size_t index;  // into points / loops / open_arcs
    int gap_index;
};

/// One labelled entry per connected component, in the locus' canonical order.
std::vector<Component> split_components(const NodalLocus& locus, const std::string& prefix = "");

/// Smallest distance between distinct components (torus-aware); +inf for fewer than two.
double min_component_separation(const NodalLocus& locus, bool periodic);

std::string to_string(ComponentKind kind);

}  // namespace nodaltop

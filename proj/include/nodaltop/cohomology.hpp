#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace nodaltop {

using BigInt = boost::multiprecision::cpp_int;

/// Integer matrix stored by columns; entries sorted by row, no explicit zeros.
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<std::pair<int, std::int64_t>>> columns;

    SparseMatrix() = default;
    SparseMatrix(int r, int c) : rows(r), cols(c), columns(static_cast<std::size_t>(c)) {}

    static SparseMatrix from_dense(const std::vector<std::vector<std::int64_t>>& rows);
    std::vector<std::vector<std::int64_t>> to_dense() const;
    std::size_t nonzeros() const;
    bool is_zero() const { return nonzeros() == 0; }
};

/// Product a * b; throws std::overflow_error when an entry leaves int64.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// Cube of the integer lattice: anchor corner plus the set of directions it
/// spans (bit d of mask). dim = popcount(mask).
struct Cube {
    std::array<int, 3> anchor{0, 0, 0};
    unsigned mask = 0;

    int dim() const;
    auto operator<=>(const Cube&) const = default;
};

/// Identifications of the lattice Z^3 defining the ambient space.
struct Gluing {
    enum class Kind { Torus3, KleinBottle };
    Kind kind = Kind::Torus3;
    int n = 8;

    /// Representative of a cube under the identifications, with the
    /// orientation sign picked up on the way.
    std::pair<Cube, int> canonical(const Cube& c) const;
};

/// Finite cubical cell complex with integer boundary matrices.
/// boundary[p] maps p-chains to (p-1)-chains (boundary[0] is 0 x n0).
class CellComplex {
public:
    std::string name;
    std::array<std::vector<Cube>, 4> cells;
    std::array<SparseMatrix, 4> boundary;

    std::size_t count(int p) const { return cells[p].size(); }
    std::array<std::size_t, 4> counts() const;
    int top_dim() const;
    long euler_characteristic() const;
    /// Every composite boundary[p] * boundary[p+1] vanishes exactly.
    bool boundary_squares_to_zero() const;
};

/// Complex of the given cells together with all their faces.
CellComplex closure_complex(const Gluing& gluing, const std::vector<Cube>& top_cells, std::string name);

/// Cubical 3-torus of side `resolution` (>= 4): n^3, 3n^3, 3n^3, n^3 cells.
CellComplex torus_complex(int resolution);

/// Voxel sets on the n^3 torus grid (anchors reduced mod n).
using VoxelSet = std::set<std::array<int, 3>>;

/// All voxels within Chebyshev distance `radius` of the set.
VoxelSet dilate(const VoxelSet& voxels, int radius, int n);

/// Boundary ring of the square [lo0, lo0+side] x [lo1, lo1+side] of voxels in
/// the plane normal to `normal_axis` at height `level`. The plane axes are the
/// other two axes in increasing order.
VoxelSet voxel_square_loop(int normal_axis, int level, std::array<int, 2> lo, int side);

struct MVSpaces {
    CellComplex torus;
    CellComplex complement;  // T^3 minus the open tube
    CellComplex tube;        // closed tube around the locus
    CellComplex interface;   // tube meet complement
    int components = 0;
};

/// Tube of Chebyshev radius `tube_radius` around a voxelized locus and its
/// complement. Throws std::invalid_argument if the tube fills or wraps the torus.
MVSpaces complement_complex(int resolution, const VoxelSet& locus, int tube_radius, int components);

/// Standard fixtures: one voxel, one square loop, two linked square loops.
enum class Fixture { Point, Loop, Link };
std::string to_string(Fixture f);
Fixture parse_fixture(const std::string& s);
/// Largest default tube radius (2 or 1) that keeps the fixture embedded.
int fixture_tube_radius(Fixture f, int resolution);
MVSpaces fixture_spaces(Fixture f, int resolution, int tube_radius = 0);

/// Pixelized Klein bottle (n x n, n >= 3): H^2 with integer coefficients is Z/2.
CellComplex klein_bottle_complex(int n);

struct SmithForm {
    /// Nonzero invariant factors d1 | d2 | ... (all positive).
    std::vector<BigInt> factors;
    bool used_big_integers = false;

    std::size_t rank() const { return factors.size(); }
    /// Factors greater than one.
    std::vector<BigInt> torsion() const;
};

/// Invariant factors by sparse unit-pivot elimination followed by a dense
/// Smith reduction of the remainder. The sparse pass runs in int64 and
/// restarts in arbitrary precision when a value overflows; the dense pass is
/// always arbitrary precision. used_big_integers flags values beyond int64.
SmithForm smith_normal_form(const SparseMatrix& m);

/// Dense Smith form with unimodular transforms: U * A * V = D.
struct SmithDecomposition {
    std::vector<std::vector<BigInt>> u, v, d;
};
SmithDecomposition smith_decomposition(const std::vector<std::vector<BigInt>>& a);

/// Rank over Z/2 (column reduction in GF(2)).
std::size_t rank_mod2(const SparseMatrix& m);
/// Rank over Q (fraction-free column reduction).
std::size_t rank_rational(const SparseMatrix& m);

enum class Coefficients { Z, Q, Z2 };
std::string to_string(Coefficients c);

struct CohomologyGroups {
    Coefficients coefficients = Coefficients::Q;
    std::array<long, 4> rank{0, 0, 0, 0};                    // free rank / dimension
    std::array<std::vector<std::int64_t>, 4> torsion;        // Z only
    bool used_big_integers = false;

    long euler_characteristic() const { return rank[0] - rank[1] + rank[2] - rank[3]; }
    bool torsion_free() const;
};

/// Largest 3-torus resolution for integral (Smith form) cohomology; bigger
/// complexes throw std::length_error.
inline constexpr int kMaxIntegralResolution = 24;

CohomologyGroups cohomology_groups(const CellComplex& complex, Coefficients coefficients);

struct MVRow {
    std::string space;
    std::array<long, 4> dims{};
};

struct MVCheck {
    bool passed = false;
    bool alternating_sum_ok = false;
    bool ranks_consistent = false;
    bool interface_matches_components = false;
    bool kernel_ok = false;
    long alternating_sum = 0;
    long sigma_kernel = 0;
    std::vector<long> implied_ranks;  // ranks of the maps along the sequence
    std::vector<MVRow> table;
    std::string detail;
};

/// Dimension bookkeeping of the Mayer-Vietoris sequence of
/// T = U + D with U meet D = S, for a locus of `components` pieces.
MVCheck mv_dimension_check(const CohomologyGroups& torus, const CohomologyGroups& complement,
                           const CohomologyGroups& tube, const CohomologyGroups& interface, int components);

struct UCTCheck {
    bool passed = false;
    bool torsion_free = false;
    bool dimensions_match = false;
    std::string detail;
};

/// Integral groups are torsion-free and dim over Z/2 equals the Z rank in every degree.
UCTCheck uct_check(const CohomologyGroups& integral, const CohomologyGroups& mod2);

}  // namespace nodaltop

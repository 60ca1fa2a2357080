#include "nodaltop/cohomology.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <stdexcept>

namespace nodaltop {

int Cube::dim() const { return std::popcount(mask); }

namespace {

int floor_div(int a, int n) { return (a >= 0) ? a / n : -((-a + n - 1) / n); }
int mod(int a, int n) { return a - n * floor_div(a, n); }

}  // namespace

std::pair<Cube, int> Gluing::canonical(const Cube& c) const
{
    Cube r = c;
    int sign = 1;
    if (kind == Kind::Torus3) {
        for (int d = 0; d < 3; ++d) r.anchor[d] = mod(r.anchor[d], n);
        return {r, sign};
    }
    // Klein bottle in the (x, y) plane: (x + n, y) ~ (x, -y), (x, y + n) ~ (x, y)
    const int q = floor_div(r.anchor[0], n);
    r.anchor[0] -= q * n;
    if (q % 2 != 0) {
        if (r.mask & 2u) {
            r.anchor[1] = -r.anchor[1] - 1;
            sign = -sign;
        } else {
            r.anchor[1] = -r.anchor[1];
        }
    }
    r.anchor[1] = mod(r.anchor[1], n);
    return {r, sign};
}

std::array<std::size_t, 4> CellComplex::counts() const
{
    return {cells[0].size(), cells[1].size(), cells[2].size(), cells[3].size()};
}

int CellComplex::top_dim() const
{
    for (int p = 3; p >= 0; --p)
        if (!cells[p].empty()) return p;
    return -1;
}

long CellComplex::euler_characteristic() const
{
    long chi = 0;
    for (int p = 0; p < 4; ++p) chi += (p % 2 ? -1L : 1L) * static_cast<long>(cells[p].size());
    return chi;
}

bool CellComplex::boundary_squares_to_zero() const
{
    for (int p = 1; p < 3; ++p)
        if (!multiply(boundary[p], boundary[p + 1]).is_zero()) return false;
    return true;
}

namespace {

// Faces of a cube with their incidence signs (before canonicalization).
std::vector<std::pair<Cube, int>> faces(const Cube& c)
{
    std::vector<std::pair<Cube, int>> out;
    int k = 0;
    for (int d = 0; d < 3; ++d) {
        if (!(c.mask & (1u << d))) continue;
        const int s = (k % 2 == 0) ? 1 : -1;
        Cube top = c, bottom = c;
        top.mask &= ~(1u << d);
        bottom.mask &= ~(1u << d);
        top.anchor[d] += 1;
        out.emplace_back(top, s);
        out.emplace_back(bottom, -s);
        ++k;
    }
    return out;
}

CellComplex complex_from_cells(const Gluing& gluing, const std::array<std::set<Cube>, 4>& sets, std::string name)
{
    CellComplex cx;
    cx.name = std::move(name);
    for (int p = 0; p < 4; ++p) cx.cells[p].assign(sets[p].begin(), sets[p].end());
    cx.boundary[0] = SparseMatrix(0, static_cast<int>(cx.cells[0].size()));
    for (int p = 1; p < 4; ++p) {
        const auto& lower = cx.cells[p - 1];
        SparseMatrix b(static_cast<int>(lower.size()), static_cast<int>(cx.cells[p].size()));
        for (std::size_t j = 0; j < cx.cells[p].size(); ++j) {
            std::map<int, std::int64_t> col;
            for (const auto& [f, s] : faces(cx.cells[p][j])) {
                const auto [cf, cs] = gluing.canonical(f);
                auto it = std::lower_bound(lower.begin(), lower.end(), cf);
                if (it == lower.end() || *it != cf) throw std::logic_error("cell set not closed under faces");
                col[static_cast<int>(it - lower.begin())] += s * cs;
            }
            for (const auto& [r, v] : col)
                if (v != 0) b.columns[j].emplace_back(r, v);
        }
        cx.boundary[p] = std::move(b);
    }
    return cx;
}

std::array<std::set<Cube>, 4> closure_sets(const Gluing& gluing, const std::vector<Cube>& top)
{
    std::array<std::set<Cube>, 4> sets;
    std::vector<Cube> stack;
    for (const auto& c : top) stack.push_back(gluing.canonical(c).first);
    while (!stack.empty()) {
        const Cube c = stack.back();
        stack.pop_back();
        if (!sets[c.dim()].insert(c).second) continue;
        for (const auto& [f, s] : faces(c)) stack.push_back(gluing.canonical(f).first);
    }
    return sets;
}

std::vector<Cube> voxel_cubes(const VoxelSet& voxels)
{
    std::vector<Cube> v;
    for (const auto& a : voxels) v.push_back({a, 7u});
    return v;
}

}  // namespace

CellComplex closure_complex(const Gluing& gluing, const std::vector<Cube>& top_cells, std::string name)
{
    return complex_from_cells(gluing, closure_sets(gluing, top_cells), std::move(name));
}

CellComplex torus_complex(int resolution)
{
    if (resolution < 4) throw std::invalid_argument("torus complex needs resolution >= 4");
    VoxelSet all;
    for (int z = 0; z < resolution; ++z)
        for (int y = 0; y < resolution; ++y)
            for (int x = 0; x < resolution; ++x) all.insert({x, y, z});
    return closure_complex({Gluing::Kind::Torus3, resolution}, voxel_cubes(all), "torus");
}

VoxelSet dilate(const VoxelSet& voxels, int radius, int n)
{
    VoxelSet out;
    for (const auto& v : voxels)
        for (int dz = -radius; dz <= radius; ++dz)
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx)
                    out.insert({mod(v[0] + dx, n), mod(v[1] + dy, n), mod(v[2] + dz, n)});
    return out;
}

VoxelSet voxel_square_loop(int normal_axis, int level, std::array<int, 2> lo, int side)
{
    const int a = (normal_axis + 1) % 3, b = (normal_axis + 2) % 3;
    const int u = std::min(a, b), v = std::max(a, b);
    VoxelSet out;
    for (int s = 0; s <= side; ++s)
        for (const auto& [p, q] : {std::pair{s, 0}, std::pair{s, side}, std::pair{0, s}, std::pair{side, s}}) {
            std::array<int, 3> c{};
            c[normal_axis] = level;
            c[u] = lo[0] + p;
            c[v] = lo[1] + q;
            out.insert(c);
        }
    return out;
}

MVSpaces complement_complex(int resolution, const VoxelSet& locus, int tube_radius, int components)
{
    const int n = resolution;
    if (n < 4) throw std::invalid_argument("resolution must be at least 4");
    if (locus.empty()) throw std::invalid_argument("empty locus");
    const VoxelSet tube = dilate(locus, tube_radius, n);
    // the tube must leave a free layer along every axis, otherwise it wraps
    for (int d = 0; d < 3; ++d) {
        std::vector<char> used(n, 0);
        for (const auto& v : tube) used[v[d]] = 1;
        if (std::all_of(used.begin(), used.end(), [](char c) { return c != 0; }))
            throw std::invalid_argument("tube radius makes the tube wrap around the torus");
    }
    VoxelSet rest;
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if (!tube.count({x, y, z})) rest.insert({x, y, z});

    const Gluing g{Gluing::Kind::Torus3, n};
    const auto d_sets = closure_sets(g, voxel_cubes(tube));
    const auto u_sets = closure_sets(g, voxel_cubes(rest));
    std::array<std::set<Cube>, 4> s_sets;
    for (int p = 0; p < 4; ++p)
        std::set_intersection(d_sets[p].begin(), d_sets[p].end(), u_sets[p].begin(), u_sets[p].end(),
                              std::inserter(s_sets[p], s_sets[p].end()));
    MVSpaces sp;
    sp.torus = torus_complex(n);
    sp.complement = complex_from_cells(g, u_sets, "complement");
    sp.tube = complex_from_cells(g, d_sets, "tube");
    sp.interface = complex_from_cells(g, s_sets, "interface");
    sp.components = components;
    return sp;
}

std::string to_string(Fixture f)
{
    switch (f) {
    case Fixture::Point: return "point";
    case Fixture::Loop: return "loop";
    case Fixture::Link: return "link";
    }
    return "?";
}

Fixture parse_fixture(const std::string& s)
{
    if (s == "point") return Fixture::Point;
    if (s == "loop") return Fixture::Loop;
    if (s == "link") return Fixture::Link;
    throw std::invalid_argument("unknown fixture '" + s + "' (point, loop, link)");
}

int fixture_tube_radius(Fixture f, int resolution)
{
    switch (f) {
    case Fixture::Point: return resolution >= 6 ? 2 : 1;
    case Fixture::Loop: return resolution >= 12 ? 2 : 1;  // square side 2r+2 plus the tube fits in n-1
    case Fixture::Link: return 1;
    }
    return 1;
}

MVSpaces fixture_spaces(Fixture f, int resolution, int tube_radius)
{
    const int n = resolution;
    const int r = tube_radius > 0 ? tube_radius : fixture_tube_radius(f, n);
    switch (f) {
    case Fixture::Point:
        if (n < 2 * r + 2) throw std::invalid_argument("resolution too small for the point fixture");
        return complement_complex(n, {{n / 2, n / 2, n / 2}}, r, 1);
    case Fixture::Loop: {
        const int side = 2 * r + 2;
        if (side + 2 * r + 1 > n - 1) throw std::invalid_argument("resolution too small for the loop fixture");
        return complement_complex(n, voxel_square_loop(2, n / 2, {r, r}, side), r, 1);
    }
    case Fixture::Link: {
        if (n < 16 || r != 1) throw std::invalid_argument("link fixture needs resolution >= 16 and tube radius 1");
        VoxelSet w = voxel_square_loop(2, 8, {1, 1}, 8);      // x, y in [1, 9] at z = 8
        const VoxelSet b = voxel_square_loop(0, 5, {5, 4}, 8);  // y in [5, 13], z in [4, 12] at x = 5
        w.insert(b.begin(), b.end());
        return complement_complex(n, w, r, 2);
    }
    }
    throw std::invalid_argument("unknown fixture");
}

CellComplex klein_bottle_complex(int n)
{
    if (n < 3) throw std::invalid_argument("Klein bottle complex needs n >= 3");
    std::vector<Cube> squares;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) squares.push_back({{x, y, 0}, 3u});
    return closure_complex({Gluing::Kind::KleinBottle, n}, squares, "klein-bottle");
}

std::string to_string(Coefficients c)
{
    switch (c) {
    case Coefficients::Z: return "Z";
    case Coefficients::Q: return "Q";
    case Coefficients::Z2: return "Z2";
    }
    return "?";
}

bool CohomologyGroups::torsion_free() const
{
    return std::all_of(torsion.begin(), torsion.end(), [](const auto& t) { return t.empty(); });
}

CohomologyGroups cohomology_groups(const CellComplex& complex, Coefficients coefficients)
{
    CohomologyGroups g;
    g.coefficients = coefficients;
    std::array<long, 5> rk{0, 0, 0, 0, 0};  // rank of boundary[p], p = 0..4
    if (coefficients == Coefficients::Z) {
        const std::size_t limit = 3u * kMaxIntegralResolution * kMaxIntegralResolution * kMaxIntegralResolution;
        for (int p = 0; p < 4; ++p)
            if (complex.count(p) > limit)
                throw std::length_error("integral cohomology is limited to complexes of resolution <= " + std::to_string(kMaxIntegralResolution));
        for (int p = 1; p < 4; ++p) {
            const SmithForm s = smith_normal_form(complex.boundary[p]);
            rk[p] = static_cast<long>(s.rank());
            g.used_big_integers = g.used_big_integers || s.used_big_integers;
            // torsion of H^p is the torsion of H_{p-1} = coker boundary[p]
            for (const auto& t : s.torsion()) {
                if (t > INT64_MAX) throw std::overflow_error("torsion coefficient exceeds int64");
                g.torsion[p].push_back(static_cast<std::int64_t>(t));
            }
        }
    } else {
        for (int p = 1; p < 4; ++p)
            rk[p] = static_cast<long>(coefficients == Coefficients::Q ? rank_rational(complex.boundary[p])
                                                                      : rank_mod2(complex.boundary[p]));
    }
    for (int p = 0; p < 4; ++p) g.rank[p] = static_cast<long>(complex.count(p)) - rk[p] - rk[p + 1];
    return g;
}

MVCheck mv_dimension_check(const CohomologyGroups& torus, const CohomologyGroups& complement,
                           const CohomologyGroups& tube, const CohomologyGroups& interface, int components)
{
    MVCheck c;
    c.table = {{"torus", torus.rank}, {"complement", complement.rank}, {"tube", tube.rank},
               {"interface", interface.rank}};
    // 0 -> H^0(T) -> H^0(U)+H^0(D) -> H^0(S) -> H^1(T) -> ... -> H^3(S) -> 0
    std::vector<long> dims;
    for (int p = 0; p < 4; ++p) {
        dims.push_back(torus.rank[p]);
        dims.push_back(complement.rank[p] + tube.rank[p]);
        dims.push_back(interface.rank[p]);
    }
    long incoming = 0;
    c.ranks_consistent = true;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const long out = dims[k] - incoming;
        c.implied_ranks.push_back(out);
        const long next = k + 1 < dims.size() ? dims[k + 1] : 0;
        if (out < 0 || out > next) c.ranks_consistent = false;
        incoming = out;
    }
    c.alternating_sum = c.implied_ranks.back();
    c.alternating_sum_ok = c.alternating_sum == 0;
    c.interface_matches_components = interface.rank[2] == components;
    // Sigma: H^2(S) -> H^3(T) is the map leaving position 8
    c.sigma_kernel = interface.rank[2] - c.implied_ranks[8];
    c.kernel_ok = components == 0 ? c.sigma_kernel == 0 : c.sigma_kernel == components - 1;
    c.passed = c.alternating_sum_ok && c.ranks_consistent && c.interface_matches_components && c.kernel_ok;
    std::ostringstream os;
    os << "alternating sum " << c.alternating_sum << ", dim H^2(S) " << interface.rank[2] << " for "
       << components << " components, dim ker Sigma " << c.sigma_kernel;
    if (!c.ranks_consistent) os << ", implied map ranks out of range";
    c.detail = os.str();
    return c;
}

UCTCheck uct_check(const CohomologyGroups& integral, const CohomologyGroups& mod2)
{
    UCTCheck u;
    u.torsion_free = integral.torsion_free();
    u.dimensions_match = integral.rank == mod2.rank;
    u.passed = u.torsion_free && u.dimensions_match;
    std::ostringstream os;
    os << "Z ranks (" << integral.rank[0] << "," << integral.rank[1] << "," << integral.rank[2] << ","
       << integral.rank[3] << "), Z2 dims (" << mod2.rank[0] << "," << mod2.rank[1] << "," << mod2.rank[2]
       << "," << mod2.rank[3] << ")";
    for (int p = 0; p < 4; ++p)
        for (auto t : integral.torsion[p]) os << ", torsion Z/" << t << " in degree " << p;
    u.detail = os.str();
    return u;
}

}  // namespace nodaltop

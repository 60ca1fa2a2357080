#include "nodaltop/invariants.hpp"

#include "nodaltop/clifford.hpp"
#include "nodaltop/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace nodaltop {

namespace {

int resolve_occupied(const BlochModel& model, int occupied_count)
{
    const int occ = occupied_count > 0 ? occupied_count : model.occupied_count();
    if (occ >= model.band_count()) throw ConfigError("occupied count must be below band count");
    return occ;
}

void require_gapped(const BlochModel& model, ClosedSurface& surface, int occ)
{
    if (!surface.validated()) validate(surface, model, occ);
    if (surface.min_gap < kSurfaceGapFloor)
        throw SurfaceError(to_string(surface.kind) + " " + surface.id +
                           " is too close to the nodal set (min gap " +
                           std::to_string(surface.min_gap) + ")");
}

cplx unit_overlap(const CMatrix& a, const CMatrix& b)
{
    const cplx d = (a.adjoint() * b).determinant();
    const double m = std::abs(d);
    if (m < 1e-8) throw InvariantError("overlap determinant vanishes: mesh too coarse or gap closes");
    return d / m;
}

int rounded(double raw) { return static_cast<int>(std::lround(raw)); }

}  // namespace

RMatrix orthogonal_part(const RMatrix& m)
{
    Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

CMatrix unitary_part(const CMatrix& m)
{
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

std::vector<CMatrix> occupied_frames(const BlochModel& model, const std::vector<KPoint>& points,
                                     int occupied_count)
{
    const int occ = resolve_occupied(model, occupied_count);
    std::vector<CMatrix> frames(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        CMatrix v = model.eigensystem(points[i]).vectors.leftCols(occ);
        for (int c = 0; c < occ; ++c) {
            Eigen::Index r = 0;
            v.col(c).cwiseAbs().maxCoeff(&r);
            const cplx z = v(r, c);
            v.col(c) *= std::conj(z) / std::abs(z);
        }
        if (model.reality()) v = v.real().cast<cplx>();
        frames[i] = std::move(v);
    });
    return frames;
}

std::vector<CMatrix> surface_frames(const BlochModel& model, const ClosedSurface& surface,
                                    int occupied_count)
{
    return occupied_frames(model, surface.vertices, occupied_count);
}

IntegerCharge chern_flux_from_frames(const ClosedSurface& surface, const std::vector<CMatrix>& frames)
{
    const int nu = surface.n_u, nv = surface.n_v;
    std::vector<double> flux(static_cast<std::size_t>(nu) * nv);
    parallel_for(static_cast<std::size_t>(nv), [&](std::size_t jj) {
        const int j = static_cast<int>(jj);
        for (int i = 0; i < nu; ++i) {
            const auto q = surface.quad(i, j);
            cplx prod = 1.0;
            for (int e = 0; e < 4; ++e) prod *= unit_overlap(frames[q[e]], frames[q[(e + 1) % 4]]);
            flux[jj * nu + i] = -std::arg(prod);
        }
    });
    double total = 0.0;
    for (double f : flux) total += f;

    IntegerCharge r;
    r.raw = total / kTwoPi;
    r.value = rounded(r.raw);
    r.residual = std::abs(r.raw - r.value);
    r.method = "berry-flux";
    r.surface_id = surface.id;
    r.mesh_u = nu;
    r.mesh_v = nv;
    if (r.residual >= kChargeTolerance)
        throw InvariantError("Berry flux " + std::to_string(r.raw) +
                             " is not an integer: mesh too coarse or surface too close to the nodal set");
    return r;
}

IntegerCharge chern_flux(const BlochModel& model, ClosedSurface& surface, int occupied_count)
{
    const int occ = resolve_occupied(model, occupied_count);
    require_gapped(model, surface, occ);
    return chern_flux_from_frames(surface, surface_frames(model, surface, occ));
}

IntegerCharge degree(const TwoBandField& field, const ClosedSurface& surface)
{
    std::vector<Vec3> img(surface.vertices.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const Vec3 h = field(surface.vertices[i]);
        if (h.norm() < 1e-9) throw InvariantError("two-band field vanishes on the surface");
        img[i] = h.normalized();
    }
    auto solid_angle = [](const Vec3& a, const Vec3& b, const Vec3& c) {
        return 2.0 * std::atan2(a.dot(b.cross(c)), 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
    };
    double total = 0.0;
    for (int j = 0; j < surface.n_v; ++j)
        for (int i = 0; i < surface.n_u; ++i) {
            const auto q = surface.quad(i, j);
            total += solid_angle(img[q[0]], img[q[1]], img[q[2]]);
            total += solid_angle(img[q[0]], img[q[2]], img[q[3]]);
        }
    IntegerCharge r;
    r.raw = total / (4.0 * kPi);
    r.value = rounded(r.raw);
    r.residual = std::abs(r.raw - r.value);
    r.method = "degree";
    r.surface_id = surface.id;
    r.mesh_u = surface.n_u;
    r.mesh_v = surface.n_v;
    if (r.residual >= kChargeTolerance)
        throw InvariantError("degree " + std::to_string(r.raw) + " is not an integer: mesh too coarse");
    return r;
}

BerryPhaseResult berry_phase_from_frames(const std::vector<CMatrix>& frames, bool real)
{
    if (frames.size() < 3) throw InvariantError("path needs at least 3 points");
    cplx prod = 1.0;
    for (std::size_t i = 0; i < frames.size(); ++i)
        prod *= unit_overlap(frames[i], frames[(i + 1) % frames.size()]);
    BerryPhaseResult r;
    r.phase = -std::arg(prod);
    if (r.phase < 0.0) r.phase += kTwoPi;
    if (r.phase >= kTwoPi) r.phase -= kTwoPi;
    if (real) {
        const double to_zero = std::min(r.phase, kTwoPi - r.phase);
        const double to_pi = std::abs(r.phase - kPi);
        r.quantized = to_pi < to_zero ? kPi : 0.0;
        r.quantization_residual = std::min(to_zero, to_pi);
    }
    return r;
}

namespace {

void require_gapped_path(const BlochModel& model, const LoopPath& path, int occ)
{
    for (const auto& k : path.points)
        if (model.gap(k, occ) < 1e-3) throw InvariantError("gap closes along the path");
}

}  // namespace

BerryPhaseResult berry_phase(const BlochModel& model, const LoopPath& path, int occupied_count)
{
    const int occ = resolve_occupied(model, occupied_count);
    require_gapped_path(model, path, occ);
    return berry_phase_from_frames(occupied_frames(model, path.points, occ), model.reality());
}

int w1_from_frames(const std::vector<CMatrix>& frames)
{
    if (frames.size() < 3) throw InvariantError("path needs at least 3 points");
    int parity = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const RMatrix o = frames[i].real().transpose() * frames[(i + 1) % frames.size()].real();
        const double d = o.determinant();
        if (std::abs(d) < 1e-8) throw InvariantError("overlap determinant vanishes along the path");
        if (d < 0.0) parity ^= 1;
    }
    return parity;
}

int w1_along(const BlochModel& model, const LoopPath& path, int occupied_count)
{
    if (!model.reality()) throw UnsupportedError("w1 needs a real model");
    const int occ = resolve_occupied(model, occupied_count);
    require_gapped_path(model, path, occ);
    return w1_from_frames(occupied_frames(model, path.points, occ));
}

namespace {

// Transition of E + det E along an edge: diag(O, det O) in SO(n+1) with O the
// orthogonal part of the frame overlap, together with one spinor lift.
struct EdgeTransition {
    RMatrix rotation;
    Multivector spinor;
    int det_sign;
};

EdgeTransition make_transition(const RMatrix& a, const RMatrix& b)
{
    const RMatrix ov = a.transpose() * b;
    if (std::abs(ov.determinant()) < 1e-8)
        throw InvariantError("frame overlap degenerates: mesh too coarse or gap closes");
    const RMatrix o = orthogonal_part(ov);
    const Eigen::Index n = o.rows();
    RMatrix s = RMatrix::Identity(n + 1, n + 1);
    s.topLeftCorner(n, n) = o;
    const double d = o.determinant();
    s(n, n) = d > 0.0 ? 1.0 : -1.0;
    return {s, spin_lift(s), d > 0.0 ? 0 : 1};
}

class TransitionTable {
public:
    explicit TransitionTable(const std::vector<RMatrix>& frames) : frames_(frames) {}

    // Transition and spinor for the directed edge a -> b.
    std::pair<RMatrix, Multivector> directed(int a, int b)
    {
        const int lo = std::min(a, b), hi = std::max(a, b);
        const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, make_transition(frames_[lo], frames_[hi])).first;
        const EdgeTransition& t = it->second;
        if (a == lo) return {t.rotation, t.spinor};
        return {t.rotation.transpose(), t.spinor.reverse()};
    }

    int det_sign(int a, int b)
    {
        directed(a, b);
        const int lo = std::min(a, b), hi = std::max(a, b);
        return cache_.at((static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi)).det_sign;
    }

private:
    const std::vector<RMatrix>& frames_;
    std::unordered_map<std::uint64_t, EdgeTransition> cache_;
};

// Continuous spinor choice: flip psi to stay on the side of `previous`.
Multivector follow(const Multivector& previous, Multivector psi)
{
    const double d = previous.dot(psi);
    if (std::abs(d) < 0.3) throw InvariantError("Wilson loop jumps between v rows: mesh too coarse");
    if (d < 0.0) psi = -psi;
    return psi;
}

std::vector<double> eigenphases(const RMatrix& w)
{
    Eigen::EigenSolver<RMatrix> es(w, false);
    std::vector<double> ph;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ph.push_back(std::arg(es.eigenvalues()[i]));
    std::sort(ph.begin(), ph.end());
    return ph;
}

}  // namespace

W2Result w2_from_frames(const ClosedSurface& surface, const std::vector<CMatrix>& frames)
{
    const int nu = surface.n_u, nv = surface.n_v;
    std::vector<RMatrix> real_frames;
    real_frames.reserve(frames.size());
    for (const auto& f : frames) real_frames.push_back(f.real());
    const int n = static_cast<int>(real_frames.front().cols());
    TransitionTable table(real_frames);

    W2Result r;
    r.surface_id = surface.id;
    r.mesh_u = nu;
    r.mesh_v = nv;

    // Plaquette obstruction: the spinor holonomy of each quad is close to +-1;
    // edge sign choices cancel in the product over the closed surface.
    int negative = 0;
    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i) {
            const auto q = surface.quad(i, j);
            Multivector hol = Multivector::scalar(n + 1, 1.0);
            for (int e = 0; e < 4; ++e) hol = hol * table.directed(q[e], q[(e + 1) % 4]).second;
            const double s = hol.scalar_part();
            r.residual = std::max(r.residual, 1.0 - std::abs(s));
            if (s < 0.0) negative ^= 1;
        }
    r.plaquette_value = negative;
    if (r.residual > 0.5)
        throw InvariantError("plaquette holonomies far from identity: mesh too coarse");

    // Wilson spectral flow: u-cycle holonomy at row j, transported back to the
    // base vertex along the u = 0 meridian.
    auto u_wilson = [&](int j, int* w1) {
        RMatrix w = RMatrix::Identity(n + 1, n + 1);
        int parity = 0;
        for (int i = 0; i < nu; ++i) {
            const int a = surface.vertex_id(i, j), b = surface.vertex_id(i + 1, j);
            w = w * table.directed(a, b).first;
            parity ^= table.det_sign(a, b);
        }
        if (w1) *w1 = parity;
        return w;
    };

    int j0 = 0;
    if (surface.v_periodic()) {
        // start where the Wilson loop is farthest from a pi crossing
        double best = -1.0;
        for (int j = 0; j < nv; ++j) {
            const double s = std::abs(spin_lift(u_wilson(j, nullptr)).scalar_part());
            if (s > best + 1e-12) {
                best = s;
                j0 = j;
            }
        }
    }
    u_wilson(j0, &r.w1_u);

    RMatrix transport = RMatrix::Identity(n + 1, n + 1);
    Multivector lift = spin_lift(u_wilson(j0, nullptr));
    if (lift.scalar_part() < 0.0) lift = -lift;
    const Multivector first = lift;
    int v_parity = 0;
    for (int step = 0; step <= nv; ++step) {
        const int j = (j0 + step) % (surface.v_periodic() ? nv : nv + 1);
        if (step > 0) {
            const int prev = (j0 + step - 1) % (surface.v_periodic() ? nv : nv + 1);
            const int a = surface.vertex_id(0, prev), b = surface.vertex_id(0, j);
            transport = transport * table.directed(a, b).first;
            v_parity ^= table.det_sign(a, b);
            const RMatrix wb = transport * u_wilson(j, nullptr) * transport.transpose();
            const Multivector next = follow(lift, spin_lift(wb));
            if ((next.scalar_part() < 0.0) != (lift.scalar_part() < 0.0)) ++r.crossing_count;
            lift = next;
        }
        RMatrix w = u_wilson(j, nullptr).topLeftCorner(n, n);
        r.wilson_phases.push_back(eigenphases(w));
    }

    if (surface.v_periodic()) {
        r.w1_v = v_parity;
        // After the full v sweep the loop returns conjugated by the meridian
        // holonomy; compare with the conjugated starting spinor.
        const Multivector mu = spin_lift(transport);
        const Multivector back = mu * first * mu.reverse();
        const double d = lift.dot(back);
        if (std::abs(d) < 0.3) throw InvariantError("Wilson sweep does not close: mesh too coarse");
        r.value = d < 0.0 ? 1 : 0;
    } else {
        // Sphere: the sweep ends at the south pole where the loop is trivial.
        r.value = lift.scalar_part() < 0.0 ? 1 : 0;
    }
    if (r.value != r.crossing_count % 2)
        throw InvariantError("Wilson spectral flow is inconsistent: pi crossing at the sweep ends");
    if (r.value != r.plaquette_value)
        throw InvariantError("Wilson flow and plaquette obstruction disagree: mesh too coarse");
    return r;
}

W2Result w2_on(const BlochModel& model, ClosedSurface& surface, int occupied_count)
{
    if (!model.reality()) throw UnsupportedError("w2 needs a real model");
    const int occ = resolve_occupied(model, occupied_count);
    if (occ < 2)
        throw UnsupportedError("w2 needs at least two occupied bands; with one band only w1 is defined");
    require_gapped(model, surface, occ);
    return w2_from_frames(surface, surface_frames(model, surface, occ));
}

std::vector<SliceChern> chern_scan(const BlochModel& model, Axis axis, const std::vector<double>& values,
                                   int mesh)
{
    if (!model.is_lattice()) throw UnsupportedError("Chern scans need a lattice model");
    std::vector<SliceChern> out;
    for (double v : values) {
        SliceChern s;
        s.value = v;
        ClosedSurface slice = slice_torus(axis, v, mesh, mesh);
        slice.id = std::string("slice-") + axis_name(axis);
        s.min_gap = validate(slice, model);
        if (s.min_gap < kSurfaceGapFloor) {
            s.note = "slice meets the nodal set";
        } else {
            try {
                const IntegerCharge c = chern_flux(model, slice);
                s.valid = true;
                s.chern = c.value;
                s.residual = c.residual;
            } catch (const InvariantError& e) {
                s.note = e.what();
            }
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace nodaltop

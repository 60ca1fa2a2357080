#include "nodaltop/mvcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nodaltop {

int ChargeLedger::chirality_sum() const
{
    int s = 0;
    for (const auto& e : entries)
        if (e.chirality) s += *e.chirality;
    return s;
}

int ChargeLedger::w2_sum_mod2() const
{
    int s = 0;
    for (const auto& e : entries)
        if (e.w2) s ^= *e.w2 & 1;
    return s;
}

std::string to_string(VerdictStatus s)
{
    switch (s) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::Skipped: return "skipped";
    }
    return "?";
}

namespace {

double point_distance(const KPoint& a, const KPoint& b, bool periodic)
{
    return periodic ? torus_delta(a, b).norm() : (a - b).norm();
}

std::vector<KPoint> component_points(const NodalLocus& locus, const Component& c)
{
    switch (c.kind) {
    case ComponentKind::Point: return {locus.points[c.index].position};
    case ComponentKind::Loop: return locus.loops[c.index].vertices;
    case ComponentKind::Arc: return locus.open_arcs[c.index].vertices;
    }
    return {};
}

std::string fmt_radius(const char* what, double r)
{
    std::ostringstream os;
    os << what << " r=" << r;
    return os.str();
}

}  // namespace

ChargeLedger build_ledger(const BlochModel& model, const LocateResult& located, const LedgerOptions& options)
{
    ChargeLedger ledger;
    ledger.model = model.name();
    ledger.reality = model.reality();
    ledger.lattice = model.is_lattice();
    ledger.band_count = model.band_count();
    ledger.occupied_count = model.occupied_count();
    ledger.mesh = options.mesh;
    const bool periodic = model.is_lattice();

    const auto comps = split_components(located.locus);
    const auto companions = split_components(located.companion, "C");
    // every other component, Fermi level or one gap below, as a point cloud
    auto others_of = [&](std::size_t self) {
        std::vector<KPoint> pts;
        for (std::size_t i = 0; i < comps.size(); ++i)
            if (i != self) {
                auto p = component_points(located.locus, comps[i]);
                pts.insert(pts.end(), p.begin(), p.end());
            }
        for (const auto& c : companions) {
            auto p = component_points(located.companion, c);
            pts.insert(pts.end(), p.begin(), p.end());
        }
        return pts;
    };
    auto clearance = [&](const std::vector<KPoint>& own, const std::vector<KPoint>& others) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& a : own)
            for (const auto& b : others) d = std::min(d, point_distance(a, b, periodic));
        return d;
    };
    const auto field = model.two_band_field();

    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const Component& c = comps[ci];
        LedgerEntry e;
        e.id = c.id;
        e.kind = c.kind;
        const auto others = others_of(ci);
        if (c.kind == ComponentKind::Point) {
            const WeylPoint& p = located.locus.points[c.index];
            e.position = periodic ? reduce_to_zone(p.position) : p.position;
            const double r = std::min(options.sphere_radius, clearance({p.position}, others) / 3.0);
            ClosedSurface s = sphere_around(p.position, r, options.mesh, options.mesh, model.domain());
            s.id = c.id;
            const IntegerCharge q = chern_flux(model, s);
            e.chirality = q.value;
            e.chirality_residual = q.residual;
            if (field) e.degree = degree(*field, s).value;
            e.surface = fmt_radius("sphere", r);
            e.surface_min_gap = s.min_gap;
        } else if (c.kind == ComponentKind::Loop) {
            const NodalLoop& loop = located.locus.loops[c.index];
            e.position = loop.centroid();
            const double r = std::min(options.tube_radius, 0.3 * clearance(loop.vertices, others));
            const LoopPath meridian = meridian_path(loop, r, options.meridian_points);
            const BerryPhaseResult bp = berry_phase(model, meridian);
            e.berry_phase = bp.phase;
            e.berry_residual = bp.quantization_residual;
            if (model.reality()) e.berry_w1 = w1_along(model, meridian);
            if (model.reality() && model.occupied_count() >= 2) {
                ClosedSurface t = tube_around(loop, r, options.mesh, options.mesh, others, model.domain());
                t.id = c.id;
                const W2Result w = w2_on(model, t);
                e.w2 = w.value;
                e.w2_crossings = w.crossing_count;
                e.w2_residual = w.residual;
                ledger.wilson_phases[c.id] = w.wilson_phases;
                e.surface = fmt_radius("tube", r);
                e.surface_min_gap = t.min_gap;
            } else {
                e.surface = fmt_radius("meridian", r);
            }
        } else {
            e.position = located.locus.open_arcs[c.index].vertices.front();
            e.surface = "none (open arc)";
        }
        ledger.entries.push_back(std::move(e));
    }
    return ledger;
}

Verdict cancellation_chirality(const ChargeLedger& ledger)
{
    Verdict v{"chirality-cancellation", VerdictStatus::Pass, ""};
    int sum = 0, count = 0;
    for (const auto& e : ledger.entries) {
        if (e.kind != ComponentKind::Point) continue;
        if (!e.chirality) throw InvariantError("ledger entry " + e.id + " has no chirality");
        sum += *e.chirality;
        ++count;
    }
    v.detail = "sum of " + std::to_string(count) + " point chiralities = " + std::to_string(sum);
    if (sum != 0) v.status = VerdictStatus::Fail;
    return v;
}

Verdict cancellation_w2(const ChargeLedger& ledger)
{
    Verdict v{"w2-cancellation", VerdictStatus::Pass, ""};
    if (!ledger.reality || !ledger.lattice || ledger.occupied_count < 2) {
        v.status = VerdictStatus::Skipped;
        v.detail = "needs a real lattice model with two or more occupied bands";
        return v;
    }
    int sum = 0, count = 0;
    for (const auto& e : ledger.entries) {
        if (e.kind != ComponentKind::Loop) continue;
        if (!e.w2) throw InvariantError("ledger entry " + e.id + " has no w2");
        sum += *e.w2;
        ++count;
    }
    v.detail = "sum of " + std::to_string(count) + " loop w2 values = " + std::to_string(sum) + " (mod 2 = " +
               std::to_string(sum % 2) + ")";
    if (sum % 2 != 0) v.status = VerdictStatus::Fail;
    return v;
}

std::vector<double> default_slice_values(int n)
{
    std::vector<double> v;
    for (int j = 0; j < n; ++j) v.push_back(-kPi + kTwoPi * (j + 0.5) / n);
    return v;
}

StokesReport stokes_jump_check(const BlochModel& model, Axis axis, const ChargeLedger& ledger,
                               const std::vector<double>& values, int mesh)
{
    if (!model.is_lattice()) throw UnsupportedError("Stokes jumps need a lattice model");
    StokesReport rep;
    rep.verdict = {std::string("stokes-jump-") + axis_name(axis), VerdictStatus::Pass, ""};
    std::vector<double> sorted(values);
    for (double& s : sorted) s = reduce_angle(s);
    std::sort(sorted.begin(), sorted.end());
    rep.slices = chern_scan(model, axis, sorted, mesh);

    std::vector<const SliceChern*> valid;
    for (const auto& s : rep.slices)
        if (s.valid) valid.push_back(&s);
    if (valid.size() < 2) {
        rep.verdict.status = VerdictStatus::Skipped;
        rep.verdict.detail = "fewer than two gapped slices";
        return rep;
    }
    const int a = static_cast<int>(axis);
    // coordinate c lies in the cyclic interval (lo, hi) of the axis circle
    auto between = [](double c, double lo, double hi) {
        return lo < hi ? (c > lo && c < hi) : (c > lo || c < hi);
    };
    int mismatches = 0;
    for (std::size_t i = 0; i < valid.size(); ++i) {
        const SliceChern& lo = *valid[i];
        const SliceChern& hi = *valid[(i + 1) % valid.size()];
        StokesJump j{lo.value, hi.value, hi.chern - lo.chern, 0};
        for (const auto& e : ledger.entries) {
            if (e.kind == ComponentKind::Point) {
                if (!between(reduce_angle(e.position[a]), lo.value, hi.value)) continue;
                if (!e.chirality) throw InvariantError("point " + e.id + " between slices has no chirality");
                j.enclosed += *e.chirality;
            } else if (between(reduce_angle(e.position[a]), lo.value, hi.value)) {
                throw InvariantError("component " + e.id + " between slices carries no chirality");
            }
        }
        if (j.delta_c != j.enclosed) ++mismatches;
        rep.jumps.push_back(j);
    }
    rep.verdict.detail = std::to_string(rep.jumps.size()) + " jumps, " + std::to_string(mismatches) + " mismatched";
    if (mismatches) rep.verdict.status = VerdictStatus::Fail;
    return rep;
}

}  // namespace nodaltop

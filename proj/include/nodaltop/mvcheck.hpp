#pragma once

#include "nodaltop/invariants.hpp"
#include "nodaltop/locus.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nodaltop {

struct LedgerEntry {
    std::string id;
    ComponentKind kind = ComponentKind::Point;
    KPoint position = KPoint::Zero();  // point position or loop centroid
    std::optional<int> chirality;
    double chirality_residual = 0.0;
    std::optional<int> degree;  // two-band cross-check
    std::optional<double> berry_phase;
    double berry_residual = 0.0;
    std::optional<int> berry_w1;
    std::optional<int> w2;
    int w2_crossings = 0;
    double w2_residual = 0.0;
    std::string surface;  // "sphere r=..." / "tube r=..."
    double surface_min_gap = 0.0;
};

struct ChargeLedger {
    std::string model;
    bool reality = false;
    bool lattice = true;
    int band_count = 2;
    int occupied_count = 1;
    int mesh = 64;
    std::vector<LedgerEntry> entries;
    /// u-cycle Wilson eigenphases per v row of each w2 tube (plot data only).
    std::map<std::string, std::vector<std::vector<double>>> wilson_phases;

    /// Totals recomputed from the entries.
    int chirality_sum() const;
    int w2_sum_mod2() const;
};

struct LedgerOptions {
    int mesh = 64;
    double sphere_radius = 0.3;
    double tube_radius = 0.15;
    int meridian_points = 400;
};

/// Charges of every Fermi-level component. Enclosing surfaces are outward
/// oriented and shrunk to stay a third of the distance to other components.
ChargeLedger build_ledger(const BlochModel& model, const LocateResult& located,
                          const LedgerOptions& options = {});

enum class VerdictStatus { Pass, Fail, Skipped };

struct Verdict {
    std::string name;
    VerdictStatus status = VerdictStatus::Pass;
    std::string detail;

    bool passed() const { return status != VerdictStatus::Fail; }
};

std::string to_string(VerdictStatus s);

/// Sum of point chiralities vanishes. Throws InvariantError if a point lacks one.
Verdict cancellation_chirality(const ChargeLedger& ledger);

/// Loop w2 values sum to 0 mod 2 (real lattice models with two or more
/// occupied bands; skipped otherwise). Throws InvariantError on missing entries.
Verdict cancellation_w2(const ChargeLedger& ledger);

struct StokesJump {
    double from = 0.0;
    double to = 0.0;
    int delta_c = 0;
    int enclosed = 0;
};

struct StokesReport {
    Verdict verdict;
    std::vector<SliceChern> slices;
    std::vector<StokesJump> jumps;
};

/// Centres of n equally spaced slices of the Brillouin zone along an axis.
std::vector<double> default_slice_values(int n = 9);

/// Chern numbers of gapped slices along `axis`; every jump between
/// consecutive slices (cyclically) must equal the chirality passed.
/// Throws InvariantError if a loop or an uncharged point lies between slices.
StokesReport stokes_jump_check(const BlochModel& model, Axis axis, const ChargeLedger& ledger,
                               const std::vector<double>& values = default_slice_values(), int mesh = 64);

}  // namespace nodaltop

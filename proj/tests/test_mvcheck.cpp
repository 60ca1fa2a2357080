#include "catch_amalgamated.hpp"

#include "nodaltop/mvcheck.hpp"
#include "support.hpp"

using namespace nodaltop;
using Catch::Matchers::WithinAbs;

namespace {

ChargeLedger point_ledger(std::vector<std::optional<int>> charges)
{
    ChargeLedger l;
    l.model = "synthetic";
    for (std::size_t i = 0; i < charges.size(); ++i) {
        LedgerEntry e;
        e.id = "P" + std::to_string(i);
        e.chirality = charges[i];
        l.entries.push_back(e);
    }
    return l;
}

ChargeLedger loop_ledger(std::vector<std::optional<int>> w2)
{
    ChargeLedger l;
    l.model = "synthetic";
    l.reality = true;
    l.band_count = 4;
    l.occupied_count = 2;
    for (std::size_t i = 0; i < w2.size(); ++i) {
        LedgerEntry e;
        e.id = "L" + std::to_string(i);
        e.kind = ComponentKind::Loop;
        e.w2 = w2[i];
        l.entries.push_back(e);
    }
    return l;
}

}  // namespace

TEST_CASE("weyl-lattice ledger holds opposite chiralities")
{
    const BlochModel w = builtin("weyl-lattice");
    const ChargeLedger l = build_ledger(w, locate(w));
    REQUIRE(l.entries.size() == 2);
    CHECK(l.entries[0].position.z() < 0);
    CHECK(l.entries[0].chirality == 1);
    CHECK(l.entries[1].chirality == -1);
    for (const auto& e : l.entries) {
        CHECK(e.degree == e.chirality);
        CHECK(e.chirality_residual < kChargeTolerance);
        CHECK(e.surface_min_gap > kSurfaceGapFloor);
        CHECK_FALSE(e.w2);
    }
    CHECK(l.chirality_sum() == 0);
    CHECK(cancellation_chirality(l).status == VerdictStatus::Pass);
    CHECK(cancellation_w2(l).status == VerdictStatus::Skipped);
}

TEST_CASE("chirality cancellation verdicts")
{
    CHECK(cancellation_chirality(point_ledger({1, -1})).status == VerdictStatus::Pass);
    CHECK(cancellation_chirality(point_ledger({})).status == VerdictStatus::Pass);
    const Verdict bad = cancellation_chirality(point_ledger({1, 1}));
    CHECK(bad.status == VerdictStatus::Fail);
    CHECK_FALSE(bad.passed());
    CHECK_THROWS_AS(cancellation_chirality(point_ledger({1, std::nullopt})), InvariantError);
}

TEST_CASE("w2 cancellation verdicts")
{
    CHECK(cancellation_w2(loop_ledger({1, 1})).status == VerdictStatus::Pass);
    CHECK(cancellation_w2(loop_ledger({1})).status == VerdictStatus::Fail);
    CHECK(cancellation_w2(loop_ledger({0, 1, 1, 0})).status == VerdictStatus::Pass);
    CHECK_THROWS_AS(cancellation_w2(loop_ledger({1, std::nullopt})), InvariantError);
    ChargeLedger continuum = loop_ledger({1});
    continuum.lattice = false;
    CHECK(cancellation_w2(continuum).status == VerdictStatus::Skipped);
}

TEST_CASE("real nodal loop ledger records berry phase pi")
{
    const BlochModel m = builtin("nodal-loop-real");
    const ChargeLedger l = build_ledger(m, locate(m));
    REQUIRE(l.entries.size() == 1);
    const LedgerEntry& e = l.entries[0];
    CHECK(e.kind == ComponentKind::Loop);
    REQUIRE(e.berry_phase);
    CHECK_THAT(*e.berry_phase, WithinAbs(kPi, kBerryTolerance));
    CHECK(e.berry_w1 == 1);
    CHECK_FALSE(e.w2);
    CHECK(cancellation_chirality(l).passed());
}

TEST_CASE("lattice four-band loops cancel mod two")
{
    const BlochModel m = builtin("four-band-linked-lattice");
    const ChargeLedger l = build_ledger(m, locate(m));
    CHECK(l.entries.size() == 8);
    for (const auto& e : l.entries) {
        REQUIRE(e.w2);
        CHECK(e.w2_crossings % 2 == *e.w2);
        CHECK(l.wilson_phases.count(e.id) == 1);
    }
    CHECK(l.w2_sum_mod2() == 0);
    CHECK(cancellation_w2(l).status == VerdictStatus::Pass);
}

TEST_CASE("chern jumps equal the chirality passed")
{
    const BlochModel w = builtin("weyl-lattice");
    const ChargeLedger l = build_ledger(w, locate(w));
    const StokesReport r = stokes_jump_check(w, Axis::Z, l);
    CHECK(r.verdict.status == VerdictStatus::Pass);
    CHECK(r.slices.size() == 9);
    CHECK(r.jumps.size() == 9);
    int passed = 0;
    for (const auto& j : r.jumps) {
        CHECK(j.delta_c == j.enclosed);
        passed += j.enclosed != 0;
    }
    CHECK(passed == 2);

    ChargeLedger flipped = l;
    flipped.entries[0].chirality = -*flipped.entries[0].chirality;
    CHECK(stokes_jump_check(w, Axis::Z, flipped).verdict.status == VerdictStatus::Fail);

    // slices along x never separate the two points
    const StokesReport rx = stokes_jump_check(w, Axis::X, l);
    CHECK(rx.verdict.status == VerdictStatus::Pass);
    for (const auto& j : rx.jumps) CHECK(j.delta_c == 0);
}

TEST_CASE("stokes check on gapped and looped models")
{
    const BlochModel gapped("gapped", 1, false, Domain::torus(),
                            {{"Z", {{{HarmonicKind::Cos, {1, 0, 0}, 0.5}, {HarmonicKind::Cos, {0, 0, 0}, 2.0}}}}});
    const ChargeLedger empty = build_ledger(gapped, locate(gapped));
    CHECK(empty.entries.empty());
    const StokesReport r = stokes_jump_check(gapped, Axis::Z, empty, default_slice_values(5), 32);
    CHECK(r.verdict.status == VerdictStatus::Pass);
    for (const auto& s : r.slices) CHECK(s.chern == 0);

    const BlochModel m = builtin("nodal-loop-real");
    CHECK_THROWS_AS(stokes_jump_check(m, Axis::Z, build_ledger(m, locate(m))), InvariantError);
}

TEST_CASE("randomized models conserve chirality")
{
    for (unsigned seed = 100; seed < 106; ++seed) {
        const BlochModel m = testing::random_two_band(seed);
        const ChargeLedger l = build_ledger(m, locate(m));
        const auto oracle = testing::tetrahedral_zeros(*m.two_band_field(), 96);
        INFO("seed " << seed);
        CHECK(static_cast<int>(l.entries.size()) == oracle.count);
        CHECK(l.chirality_sum() == 0);
        for (const auto& e : l.entries) CHECK(e.degree == e.chirality);
        CHECK(cancellation_chirality(l).status == VerdictStatus::Pass);
    }
}

TEST_CASE("default slices sit between grid planes")
{
    const auto v = default_slice_values(4);
    REQUIRE(v.size() == 4);
    CHECK_THAT(v[0], WithinAbs(-kPi + kPi / 4, 1e-15));
    CHECK_THAT(v[3], WithinAbs(kPi - kPi / 4, 1e-15));
}

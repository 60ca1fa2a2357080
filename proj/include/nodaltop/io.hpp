#pragma once

#include "nodaltop/cohomology.hpp"
#include "nodaltop/invariants.hpp"
#include "nodaltop/knots.hpp"
#include "nodaltop/locus.hpp"
#include "nodaltop/model.hpp"
#include "nodaltop/mvcheck.hpp"

#include <json.hpp>

#include <string>

namespace nodaltop {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Model document:
/// {"schema_version": 1, "name": ..., "band_count": 4, "occupied_count": 2,
///  "reality": true, "domain": {"kind": "torus"} | {"kind": "box", "extent": 3},
///  "terms": [{"pauli": "IX", "coefficient": [{"kind": "sin", "n": [1,0,0], "a": 1.0}]}]}
/// Throws ConfigError on anything malformed.
BlochModel model_from_json(const json& j);
json model_to_json(const BlochModel& model);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

json to_json(const KPoint& k);
json locus_to_json(const LocateResult& located);
json surface_to_json(const ClosedSurface& surface);
json charge_to_json(const IntegerCharge& c);
json berry_to_json(const BerryPhaseResult& b);
json w2_to_json(const W2Result& w);
json verdict_to_json(const Verdict& v);
json stokes_to_json(const StokesReport& r);
json ledger_to_json(const ChargeLedger& ledger);
ChargeLedger ledger_from_json(const json& j);
json groups_to_json(const CohomologyGroups& g);
json mv_to_json(const MVCheck& m);
json uct_to_json(const UCTCheck& u);

/// Wilson eigenphase table (v row, phase...) for plotting.
std::string wilson_csv(const std::vector<std::vector<double>>& phases);
std::string scan_csv(const std::vector<SliceChern>& slices);

}  // namespace nodaltop

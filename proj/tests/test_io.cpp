#include "catch_amalgamated.hpp"

#include "nodaltop/io.hpp"

#include <filesystem>
#include <random>

using namespace nodaltop;

namespace {

json minimal_model()
{
    return json::parse(R"({
        "schema_version": 1,
        "name": "tilted",
        "occupied_count": 1,
        "reality": false,
        "terms": [
            {"pauli": "X", "coefficient": [{"kind": "sin", "n": [1, 0, 0], "a": 1.0}]},
            {"pauli": "Y", "coefficient": [{"kind": "sin", "n": [0, 1, 0], "a": 1.0}]},
            {"pauli": "Z", "coefficient": [{"kind": "cos", "n": [0, 0, 1], "a": 1.0},
                                           {"kind": "cos", "n": [1, 0, 0], "a": 1.0},
                                           {"kind": "cos", "n": [0, 1, 0], "a": 1.0},
                                           {"kind": "cos", "n": [0, 0, 0], "a": -2.0}]},
            {"pauli": "I", "coefficient": [{"kind": "sin", "n": [0, 0, 1], "a": 0.3}]}
        ]
    })");
}

}  // namespace

TEST_CASE("models round trip through JSON")
{
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (const auto& name : builtin_names()) {
        const BlochModel a = builtin(name);
        const json j = model_to_json(a);
        CHECK(j.at("schema_version") == kSchemaVersion);
        const BlochModel b = model_from_json(json::parse(j.dump()));
        CHECK(b.name() == a.name());
        CHECK(b.reality() == a.reality());
        CHECK(b.band_count() == a.band_count());
        CHECK(b.occupied_count() == a.occupied_count());
        CHECK(b.domain().kind == a.domain().kind);
        CHECK(b.parameters() == a.parameters());
        for (int i = 0; i < 20; ++i) {
            const KPoint k(u(rng), u(rng), u(rng));
            CHECK((a.hamiltonian(k) - b.hamiltonian(k)).norm() == 0.0);
        }
        CHECK(model_to_json(b).dump() == j.dump());
    }
}

TEST_CASE("hand written model documents load")
{
    const BlochModel m = model_from_json(minimal_model());
    CHECK(m.band_count() == 2);
    CHECK(m.is_lattice());
    CHECK(m.direct_gap({0, 0, kPi / 2}) < 1e-12);
}

TEST_CASE("malformed model documents are config errors")
{
    auto broken = [](auto edit) {
        json j = minimal_model();
        edit(j);
        return j;
    };
    CHECK_THROWS_AS(model_from_json(broken([](json& j) { j.erase("schema_version"); })), ConfigError);
    CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["schema_version"] = 7; })), ConfigError);
    CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["terms"][0]["pauli"] = "Q"; })), ConfigError);
    CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["terms"][0]["coefficient"][0]["kind"] = "tan"; })),
                    ConfigError);
    CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["terms"][1]["pauli"] = "XX"; })), ConfigError);
    CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["band_count"] = 4; })), ConfigError);
    CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["occupied_count"] = "one"; })), ConfigError);
    CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["domain"] = {{"kind", "sphere"}}; })), ConfigError);
    CHECK_THROWS_AS(model_from_json(json::array()), ConfigError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/model.json"), ConfigError);
}

TEST_CASE("ledgers round trip through JSON")
{
    const BlochModel w = builtin("weyl-lattice");
    const ChargeLedger l = build_ledger(w, locate(w));
    const json j = ledger_to_json(l);
    CHECK(j.at("schema_version") == kSchemaVersion);
    const ChargeLedger back = ledger_from_json(json::parse(j.dump()));
    REQUIRE(back.entries.size() == l.entries.size());
    CHECK(back.entries[0].chirality == l.entries[0].chirality);
    CHECK(back.chirality_sum() == 0);
    CHECK(ledger_to_json(back).dump() == j.dump());

    json bad = j;
    bad["entries"][0]["type"] = "blob";
    CHECK_THROWS_AS(ledger_from_json(bad), ConfigError);
}

TEST_CASE("locus JSON lists components with residuals")
{
    const BlochModel m = builtin("nodal-loop-real");
    const json j = locus_to_json(locate(m));
    const auto& comps = j.at("fermi").at("components");
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].at("type") == "loop");
    CHECK(comps[0].at("residual").get<double>() < 1e-6);
    CHECK(comps[0].at("vertices").size() > 20);
    CHECK(j.at("companion").at("components").empty());
}

TEST_CASE("csv plot data has headers and one row per sample")
{
    const std::string w = wilson_csv({{0.1, -0.1}, {0.2, -0.2}, {0.3, -0.3}});
    CHECK(w.rfind("row,", 0) == 0);
    CHECK(std::count(w.begin(), w.end(), '\n') == 4);
    SliceChern ok;
    ok.value = 0.5;
    ok.valid = true;
    ok.chern = 1;
    SliceChern skipped;
    skipped.note = "gap closes";
    const std::string s = scan_csv({ok, skipped});
    CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}

TEST_CASE("text files are written")
{
    const auto dir = std::filesystem::temp_directory_path() / "nodaltop_io_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "x.json").string();
    write_text_file(path, "{\"a\": 1}\n");
    CHECK(read_json_file(path).at("a") == 1);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(write_text_file("/nonexistent/dir/x.json", "{}"), ConfigError);
}

#include "nodaltop/io.hpp"

#include <fstream>
#include <sstream>

namespace nodaltop {

namespace {

const char* harmonic_name(HarmonicKind k)
{
    switch (k) {
    case HarmonicKind::Cos: return "cos";
    case HarmonicKind::Sin: return "sin";
    case HarmonicKind::Poly: return "poly";
    }
    return "?";
}

HarmonicKind parse_harmonic(const std::string& s)
{
    if (s == "cos") return HarmonicKind::Cos;
    if (s == "sin") return HarmonicKind::Sin;
    if (s == "poly") return HarmonicKind::Poly;
    throw ConfigError("unknown coefficient kind '" + s + "' (cos, sin, poly)");
}

template <class T>
T field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

ComponentKind parse_kind(const std::string& s)
{
    if (s == "point") return ComponentKind::Point;
    if (s == "loop") return ComponentKind::Loop;
    if (s == "arc") return ComponentKind::Arc;
    throw ConfigError("unknown component type '" + s + "'");
}

KPoint point_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 3) throw ConfigError("k-point must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vertices_json(const std::vector<KPoint>& v)
{
    json a = json::array();
    for (const auto& k : v) a.push_back(to_json(k));
    return a;
}

}  // namespace

BlochModel model_from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("model document must be a JSON object");
    const int version = field<int>(j, "schema_version");
    if (version != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(version));
    const std::string name = field<std::string>(j, "name");
    const int occupied = field<int>(j, "occupied_count");
    const bool reality = field<bool>(j, "reality");

    Domain domain = Domain::torus();
    if (j.contains("domain")) {
        const json& d = j.at("domain");
        const std::string kind = field<std::string>(d, "kind");
        if (kind == "box") domain = Domain::box(field<double>(d, "extent"));
        else if (kind != "torus") throw ConfigError("domain kind must be torus or box");
    }

    std::vector<PauliTerm> terms;
    const json& jt = j.contains("terms") ? j.at("terms") : json();
    if (!jt.is_array()) throw ConfigError("missing field 'terms'");
    for (const auto& t : jt) {
        PauliTerm term;
        term.word = field<std::string>(t, "pauli");
        if (!t.contains("coefficient") || !t.at("coefficient").is_array())
            throw ConfigError("term " + term.word + " needs a coefficient array");
        for (const auto& h : t.at("coefficient")) {
            Harmonic hm;
            hm.kind = parse_harmonic(field<std::string>(h, "kind"));
            if (h.contains("n")) {
                const auto n = h.at("n");
                if (!n.is_array() || n.size() != 3) throw ConfigError("harmonic 'n' must have 3 entries");
                for (int d = 0; d < 3; ++d) {
                    hm.n[d] = n[d].get<int>();
                    if (hm.kind == HarmonicKind::Poly && hm.n[d] < 0)
                        throw ConfigError("polynomial exponents must be non-negative");
                }
            }
            hm.amplitude = field<double>(h, "a");
            term.coefficient.harmonics.push_back(hm);
        }
        terms.push_back(std::move(term));
    }
    BlochModel model(name, occupied, reality, domain, std::move(terms));
    if (j.contains("band_count") && field<int>(j, "band_count") != model.band_count())
        throw ConfigError("band_count does not match the Pauli word length");
    if (j.contains("parameters")) {
        std::map<std::string, double> p;
        for (const auto& [k, v] : j.at("parameters").items()) p[k] = v.get<double>();
        model.set_parameters(std::move(p));
    }
    return model;
}

json model_to_json(const BlochModel& model)
{
    json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = model.name();
    j["band_count"] = model.band_count();
    j["occupied_count"] = model.occupied_count();
    j["reality"] = model.reality();
    if (model.domain().is_torus()) j["domain"] = {{"kind", "torus"}};
    else j["domain"] = {{"kind", "box"}, {"extent", model.domain().extent}};
    json terms = json::array();
    for (const auto& t : model.terms()) {
        json c = json::array();
        for (const auto& h : t.coefficient.harmonics)
            c.push_back({{"kind", harmonic_name(h.kind)}, {"n", h.n}, {"a", h.amplitude}});
        terms.push_back({{"pauli", t.word}, {"coefficient", c}});
    }
    j["terms"] = terms;
    if (!model.parameters().empty()) j["parameters"] = model.parameters();
    return j;
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

json to_json(const KPoint& k) { return json::array({k.x(), k.y(), k.z()}); }

json locus_to_json(const LocateResult& located)
{
    auto one = [](const NodalLocus& locus, const std::string& prefix) {
        json comps = json::array();
        for (const auto& c : split_components(locus, prefix)) {
            json e;
            e["id"] = c.id;
            e["type"] = to_string(c.kind);
            e["gap_index"] = c.gap_index;
            if (c.kind == ComponentKind::Point) {
                const auto& p = locus.points[c.index];
                e["vertices"] = json::array({to_json(p.position)});
                e["residual"] = p.residual_gap;
                e["refinement_iterations"] = p.refinement_iterations;
            } else if (c.kind == ComponentKind::Loop) {
                const auto& l = locus.loops[c.index];
                e["vertices"] = vertices_json(l.vertices);
                e["residual"] = l.max_vertex_gap;
                e["winding"] = l.winding;
                e["orientation"] = "first tangent positive along x, then y, then z";
            } else {
                const auto& a = locus.open_arcs[c.index];
                e["vertices"] = vertices_json(a.vertices);
                e["residual"] = a.max_vertex_gap;
            }
            comps.push_back(e);
        }
        return json{{"gap_index", locus.fermi_gap}, {"grid_spacing", locus.grid_spacing}, {"components", comps}};
    };
    json j;
    j["schema_version"] = kSchemaVersion;
    j["fermi"] = one(located.locus, "");
    j["companion"] = one(located.companion, "C");
    return j;
}

json surface_to_json(const ClosedSurface& s)
{
    json j;
    j["schema_version"] = kSchemaVersion;
    j["id"] = s.id;
    j["kind"] = to_string(s.kind);
    j["n_u"] = s.n_u;
    j["n_v"] = s.n_v;
    j["orientation"] = s.uv_orientation > 0 ? "u-then-v" : "v-then-u";
    j["vertices"] = vertices_json(s.vertices);
    j["grid_ids"] = s.grid_ids;
    if (s.validated()) j["min_gap"] = s.min_gap;
    return j;
}

json charge_to_json(const IntegerCharge& c)
{
    return {{"value", c.value}, {"raw", c.raw}, {"residual", c.residual}, {"method", c.method},
            {"surface", c.surface_id}, {"mesh", {c.mesh_u, c.mesh_v}}};
}

json berry_to_json(const BerryPhaseResult& b)
{
    json j{{"phase", b.phase}};
    if (b.quantized) {
        j["quantized"] = *b.quantized;
        j["residual"] = b.quantization_residual;
    }
    return j;
}

json w2_to_json(const W2Result& w)
{
    return {{"value", w.value}, {"crossing_count", w.crossing_count}, {"plaquette_value", w.plaquette_value},
            {"w1_u", w.w1_u}, {"w1_v", w.w1_v}, {"residual", w.residual}, {"surface", w.surface_id},
            {"mesh", {w.mesh_u, w.mesh_v}}, {"method", "wilson-spectral-flow"}};
}

json verdict_to_json(const Verdict& v)
{
    return {{"name", v.name}, {"status", to_string(v.status)}, {"detail", v.detail}};
}

json stokes_to_json(const StokesReport& r)
{
    json slices = json::array();
    for (const auto& s : r.slices) {
        json e{{"value", s.value}, {"valid", s.valid}, {"min_gap", s.min_gap}};
        if (s.valid) {
            e["chern"] = s.chern;
            e["residual"] = s.residual;
        } else {
            e["note"] = s.note;
        }
        slices.push_back(e);
    }
    json jumps = json::array();
    for (const auto& jp : r.jumps)
        jumps.push_back({{"from", jp.from}, {"to", jp.to}, {"delta_c", jp.delta_c}, {"enclosed", jp.enclosed}});
    return {{"verdict", verdict_to_json(r.verdict)}, {"slices", slices}, {"jumps", jumps}};
}

json ledger_to_json(const ChargeLedger& l)
{
    json entries = json::array();
    for (const auto& e : l.entries) {
        json j{{"id", e.id}, {"type", to_string(e.kind)}, {"position", to_json(e.position)},
               {"surface", e.surface}, {"surface_min_gap", e.surface_min_gap}};
        if (e.chirality) {
            j["chirality"] = *e.chirality;
            j["chirality_residual"] = e.chirality_residual;
        }
        if (e.degree) j["degree"] = *e.degree;
        if (e.berry_phase) {
            j["berry_phase"] = *e.berry_phase;
            j["berry_residual"] = e.berry_residual;
        }
        if (e.berry_w1) j["berry_w1"] = *e.berry_w1;
        if (e.w2) {
            j["w2"] = *e.w2;
            j["w2_crossings"] = e.w2_crossings;
            j["w2_residual"] = e.w2_residual;
        }
        entries.push_back(j);
    }
    json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = l.model;
    j["reality"] = l.reality;
    j["lattice"] = l.lattice;
    j["band_count"] = l.band_count;
    j["occupied_count"] = l.occupied_count;
    j["mesh"] = l.mesh;
    j["entries"] = entries;
    j["totals"] = {{"chirality_sum", l.chirality_sum()}, {"w2_sum_mod2", l.w2_sum_mod2()},
                   {"components", l.entries.size()}};
    j["orientation"] = "outward normals";
    return j;
}

ChargeLedger ledger_from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("ledger must be a JSON object");
    if (field<int>(j, "schema_version") != kSchemaVersion) throw ConfigError("unsupported ledger schema_version");
    ChargeLedger l;
    l.model = field<std::string>(j, "model");
    l.reality = field<bool>(j, "reality");
    l.lattice = field<bool>(j, "lattice");
    l.band_count = field<int>(j, "band_count");
    l.occupied_count = field<int>(j, "occupied_count");
    if (j.contains("mesh")) l.mesh = field<int>(j, "mesh");
    if (!j.contains("entries") || !j.at("entries").is_array()) throw ConfigError("ledger has no entries array");
    for (const auto& e : j.at("entries")) {
        LedgerEntry le;
        le.id = field<std::string>(e, "id");
        le.kind = parse_kind(field<std::string>(e, "type"));
        if (e.contains("position")) le.position = point_from_json(e.at("position"));
        if (e.contains("surface")) le.surface = field<std::string>(e, "surface");
        if (e.contains("surface_min_gap")) le.surface_min_gap = field<double>(e, "surface_min_gap");
        if (e.contains("chirality")) le.chirality = field<int>(e, "chirality");
        if (e.contains("chirality_residual")) le.chirality_residual = field<double>(e, "chirality_residual");
        if (e.contains("degree")) le.degree = field<int>(e, "degree");
        if (e.contains("berry_phase")) le.berry_phase = field<double>(e, "berry_phase");
        if (e.contains("berry_residual")) le.berry_residual = field<double>(e, "berry_residual");
        if (e.contains("berry_w1")) le.berry_w1 = field<int>(e, "berry_w1");
        if (e.contains("w2")) le.w2 = field<int>(e, "w2");
        if (e.contains("w2_crossings")) le.w2_crossings = field<int>(e, "w2_crossings");
        if (e.contains("w2_residual")) le.w2_residual = field<double>(e, "w2_residual");
        l.entries.push_back(std::move(le));
    }
    return l;
}

json groups_to_json(const CohomologyGroups& g)
{
    json torsion = json::array();
    for (int p = 0; p < 4; ++p) torsion.push_back(g.torsion[p]);
    return {{"coefficients", to_string(g.coefficients)}, {"rank", g.rank}, {"torsion", torsion},
            {"euler_characteristic", g.euler_characteristic()}};
}

json mv_to_json(const MVCheck& m)
{
    json table = json::array();
    for (const auto& r : m.table) table.push_back({{"space", r.space}, {"dims", r.dims}});
    return {{"passed", m.passed}, {"alternating_sum", m.alternating_sum}, {"ranks_consistent", m.ranks_consistent},
            {"interface_matches_components", m.interface_matches_components},
            {"sigma_kernel", m.sigma_kernel}, {"implied_ranks", m.implied_ranks}, {"table", table},
            {"detail", m.detail}};
}

json uct_to_json(const UCTCheck& u)
{
    return {{"passed", u.passed}, {"torsion_free", u.torsion_free}, {"dimensions_match", u.dimensions_match},
            {"detail", u.detail}};
}

std::string wilson_csv(const std::vector<std::vector<double>>& phases)
{
    std::ostringstream os;
    os.precision(12);
    os << "row";
    const std::size_t n = phases.empty() ? 0 : phases.front().size();
    for (std::size_t i = 0; i < n; ++i) os << ",phase" << i;
    os << "\n";
    for (std::size_t r = 0; r < phases.size(); ++r) {
        os << r;
        for (double p : phases[r]) os << "," << p;
        os << "\n";
    }
    return os.str();
}

std::string scan_csv(const std::vector<SliceChern>& slices)
{
    std::ostringstream os;
    os.precision(12);
    os << "value,valid,chern,residual,min_gap\n";
    for (const auto& s : slices)
        os << s.value << "," << (s.valid ? 1 : 0) << "," << (s.valid ? std::to_string(s.chern) : "") << ","
           << s.residual << "," << s.min_gap << "\n";
    return os.str();
}

}  // namespace nodaltop

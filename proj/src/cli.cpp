#include "nodaltop/cli.hpp"

#include "nodaltop/io.hpp"
#include "nodaltop/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string_view>

namespace nodaltop {

namespace {

struct RunConfig {
    std::string command;
    std::string model_name;
    std::vector<std::string> params;
    std::string config_path;
    int grid = 48;
    std::string mesh = "64x64";
    double tube_radius = 0.15;
    double sphere_radius = 0.3;
    int resolution = 16;
    std::string out_dir;
    int threads = 0;
    bool json = false;
    // command specific
    std::string axis = "z";
    int slices = 9;
    std::string ledger_path;
    std::string fixture = "loop";
    bool corrupt = false;

    int mesh_u = 64;
    int mesh_v = 64;
};

std::pair<int, int> parse_mesh(const std::string& s)
{
    auto parse_int = [&](std::string_view t) {
        int n = 0;
        const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
        if (ec != std::errc() || end != t.data() + t.size() || t.empty())
            throw ConfigError("--mesh expects NxM, got '" + s + "'");
        return n;
    };
    const auto x = s.find_first_of("xX");
    if (x == std::string::npos) {
        const int n = parse_int(s);
        return {n, n};
    }
    const std::string_view v(s);
    return {parse_int(v.substr(0, x)), parse_int(v.substr(x + 1))};
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items)
{
    std::map<std::string, double> p;
    for (const auto& it : items) {
        const auto eq = it.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + it + "'");
        try {
            std::size_t used = 0;
            const std::string v = it.substr(eq + 1);
            p[it.substr(0, eq)] = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
            throw ConfigError("--param value is not a number: '" + it + "'");
        }
    }
    return p;
}

void check_ranges(const RunConfig& c)
{
    if (c.grid < 8 || c.grid > 256) throw ConfigError("--grid must be in [8, 256]");
    if (c.mesh_u < 8 || c.mesh_v < 8 || c.mesh_u > 1024 || c.mesh_v > 1024)
        throw ConfigError("--mesh sizes must be in [8, 1024]");
    if (!(c.tube_radius > 0.0)) throw ConfigError("--tube-radius must be positive");
    if (c.resolution < 4 || c.resolution > 64) throw ConfigError("--resolution must be in [4, 64]");
    if (c.threads < 0) throw ConfigError("--threads must be non-negative");
    if (c.slices < 2 || c.slices > 512) throw ConfigError("--slices must be in [2, 512]");
}

class Session {
public:
    Session(RunConfig cfg, const CLI::App& app, std::ostream& out) : cfg_(std::move(cfg)), app_(app), out_(out) {}

    int run()
    {
        if (cfg_.threads > 0) set_thread_count(cfg_.threads);
        const std::string& c = cfg_.command;
        if (c == "locate") return locate_cmd();
        if (c == "charges") return charges_cmd();
        if (c == "verify") return verify_cmd();
        if (c == "cohomology") return cohomology_cmd();
        if (c == "scan") return scan_cmd();
        if (c == "link") return link_cmd();
        if (c == "report") return report_cmd();
        throw ConfigError("unknown command " + c);
    }

private:
    bool given(const char* flag) const { return app_.count(flag) > 0; }

    // Model from --model/--param or --config. A config file is either a model
    // document or {"model": {...}, "grid": .., "mesh": "NxM", "tube_radius": ..}.
    BlochModel model()
    {
        if (!cfg_.config_path.empty()) {
            if (!cfg_.model_name.empty()) throw ConfigError("use either --model or --config, not both");
            const json j = read_json_file(cfg_.config_path);
            if (j.is_object() && j.contains("model")) {
                try {
                    if (j.contains("grid") && !given("--grid")) cfg_.grid = j.at("grid").get<int>();
                    if (j.contains("mesh") && !given("--mesh")) {
                        std::tie(cfg_.mesh_u, cfg_.mesh_v) = parse_mesh(j.at("mesh").get<std::string>());
                    }
                    if (j.contains("tube_radius") && !given("--tube-radius"))
                        cfg_.tube_radius = j.at("tube_radius").get<double>();
                } catch (const json::exception&) {
                    throw ConfigError("malformed run settings in " + cfg_.config_path);
                }
                check_ranges(cfg_);
                const json& m = j.at("model");
                if (m.is_string()) return builtin(m.get<std::string>(), parse_params(cfg_.params));
                return model_from_json(m);
            }
            return model_from_json(j);
        }
        if (cfg_.model_name.empty()) throw ConfigError("no model given (use --model NAME or --config PATH)");
        return builtin(cfg_.model_name, parse_params(cfg_.params));
    }

    bool has_model() const { return !cfg_.model_name.empty() || !cfg_.config_path.empty(); }

    LocateResult located(const BlochModel& m)
    {
        LocateOptions o;
        o.resolution = cfg_.grid;
        return locate(m, o);
    }

    LedgerOptions ledger_options() const
    {
        LedgerOptions o;
        o.mesh = cfg_.mesh_u;
        o.tube_radius = cfg_.tube_radius;
        o.sphere_radius = cfg_.sphere_radius;
        return o;
    }

    void write(const std::string& name, const std::string& text)
    {
        if (cfg_.out_dir.empty()) return;
        std::filesystem::create_directories(cfg_.out_dir);
        write_text_file((std::filesystem::path(cfg_.out_dir) / name).string(), text);
    }

    void emit(const json& j, const std::string& file)
    {
        const std::string text = j.dump(2) + "\n";
        write(file, text);
        if (cfg_.json) out_ << text;
    }

    void say(const std::string& line)
    {
        if (!cfg_.json) out_ << line << "\n";
    }

    static std::string fmt(const KPoint& k)
    {
        std::ostringstream os;
        os << std::fixed << std::setprecision(6) << "(" << k.x() << ", " << k.y() << ", " << k.z() << ")";
        return os.str();
    }

    void summarize_locus(const LocateResult& r)
    {
        if (r.locus.empty()) {
            say("no nodal set");
        } else {
            for (const auto& c : split_components(r.locus)) {
                std::ostringstream os;
                os << c.id << " " << to_string(c.kind);
                if (c.kind == ComponentKind::Point) os << " at " << fmt(r.locus.points[c.index].position);
                else if (c.kind == ComponentKind::Loop)
                    os << " with " << r.locus.loops[c.index].vertices.size() << " vertices around "
                       << fmt(r.locus.loops[c.index].centroid());
                else os << " with " << r.locus.open_arcs[c.index].vertices.size() << " vertices";
                say(os.str());
            }
        }
        const auto comp = split_components(r.companion, "C");
        if (!comp.empty())
            say(std::to_string(comp.size()) + " crossing component(s) one gap below the Fermi level");
    }

    json verdicts_json(const std::vector<Verdict>& vs)
    {
        json a = json::array();
        for (const auto& v : vs) a.push_back(verdict_to_json(v));
        return a;
    }

    int locate_cmd()
    {
        const BlochModel m = model();
        const LocateResult r = located(m);
        json j = locus_to_json(r);
        j["model"] = m.name();
        emit(j, "locus.json");
        summarize_locus(r);
        return kExitOk;
    }

    int charges_cmd()
    {
        const BlochModel m = model();
        const LocateResult r = located(m);
        const ChargeLedger ledger = build_ledger(m, r, ledger_options());
        emit(ledger_to_json(ledger), "ledger.json");
        for (const auto& [id, phases] : ledger.wilson_phases) write("wilson_" + id + ".csv", wilson_csv(phases));
        summarize_ledger(ledger);
        return kExitOk;
    }

    void summarize_ledger(const ChargeLedger& ledger)
    {
        if (ledger.entries.empty()) say("no nodal set");
        for (const auto& e : ledger.entries) {
            std::ostringstream os;
            os << e.id << " " << to_string(e.kind) << " " << fmt(e.position);
            if (e.chirality) os << " chirality " << std::showpos << *e.chirality << std::noshowpos;
            if (e.berry_phase) os << " berry " << std::setprecision(6) << *e.berry_phase;
            if (e.berry_w1) os << " w1 " << *e.berry_w1;
            if (e.w2) os << " w2 " << *e.w2;
            say(os.str());
        }
    }

    std::vector<Verdict> verdicts(const ChargeLedger& ledger, const BlochModel* m, json* stokes)
    {
        std::vector<Verdict> vs{cancellation_chirality(ledger), cancellation_w2(ledger)};
        const bool only_points = std::all_of(ledger.entries.begin(), ledger.entries.end(),
                                             [](const LedgerEntry& e) { return e.kind == ComponentKind::Point; });
        if (m && m->is_lattice() && only_points) {
            const StokesReport rep = stokes_jump_check(*m, parse_axis(cfg_.axis), ledger,
                                                       default_slice_values(cfg_.slices), cfg_.mesh_u);
            vs.push_back(rep.verdict);
            if (stokes) *stokes = stokes_to_json(rep);
        } else {
            vs.push_back({"stokes-jump", VerdictStatus::Skipped,
                          m ? "needs a lattice model whose nodal set consists of points" : "no model given"});
        }
        return vs;
    }

    int verify_cmd()
    {
        std::optional<BlochModel> m;
        ChargeLedger ledger;
        if (!cfg_.ledger_path.empty()) {
            ledger = ledger_from_json(read_json_file(cfg_.ledger_path));
            if (has_model()) m = model();
        } else {
            m = model();
            ledger = build_ledger(*m, located(*m), ledger_options());
        }
        json stokes;
        const auto vs = verdicts(ledger, m ? &*m : nullptr, &stokes);
        json j;
        j["schema_version"] = kSchemaVersion;
        j["ledger"] = ledger_to_json(ledger);
        j["verdicts"] = verdicts_json(vs);
        if (!stokes.is_null()) j["stokes"] = stokes;
        emit(j, "verify.json");
        bool ok = true;
        for (const auto& v : vs) {
            say(v.name + ": " + to_string(v.status) + " (" + v.detail + ")");
            ok = ok && v.passed();
        }
        return ok ? kExitOk : kExitVerificationFailed;
    }

    int scan_cmd()
    {
        const BlochModel m = model();
        const Axis axis = parse_axis(cfg_.axis);
        const auto slices = chern_scan(m, axis, default_slice_values(cfg_.slices), cfg_.mesh_u);
        write("scan.csv", scan_csv(slices));
        json a = json::array();
        for (const auto& s : slices) {
            json e{{"value", s.value}, {"valid", s.valid}, {"min_gap", s.min_gap}};
            if (s.valid) e["chern"] = s.chern, e["residual"] = s.residual;
            else e["note"] = s.note;
            a.push_back(e);
            std::ostringstream os;
            os << "k_" << axis_name(axis) << " = " << std::fixed << std::setprecision(4) << s.value << "  ";
            if (s.valid) os << "C = " << s.chern;
            else os << "skipped (" << s.note << ")";
            say(os.str());
        }
        emit({{"schema_version", kSchemaVersion}, {"model", m.name()}, {"axis", std::string(1, axis_name(axis))},
              {"slices", a}},
             "scan.json");
        return kExitOk;
    }

    json linking_json(const BlochModel& m, const LocateResult& r)
    {
        struct Curve {
            std::string id;
            const NodalLoop* loop = nullptr;
            std::vector<KPoint> closed;  // arcs after far-field closure
        };
        std::vector<Curve> curves;
        for (const auto& [locus, prefix] : {std::pair{&r.locus, std::string()}, std::pair{&r.companion, std::string("C")}})
            for (const auto& c : split_components(*locus, prefix)) {
                if (c.kind == ComponentKind::Loop) curves.push_back({c.id, &locus->loops[c.index], {}});
                if (c.kind == ComponentKind::Arc)
                    curves.push_back({c.id, nullptr,
                                      close_arc_far_field(locus->open_arcs[c.index], 3.0 * m.domain().extent)});
            }
        json ids = json::array(), matrix = json::array(), pairs = json::array();
        for (const auto& c : curves) ids.push_back(c.id);
        std::vector<std::vector<json>> mat(curves.size(), std::vector<json>(curves.size(), nullptr));
        for (std::size_t a = 0; a < curves.size(); ++a)
            for (std::size_t b = a + 1; b < curves.size(); ++b) {
                json e{{"a", curves[a].id}, {"b", curves[b].id}};
                try {
                    LinkingResult lk;
                    if (curves[a].loop && curves[b].loop)
                        lk = linking_number(*curves[a].loop, *curves[b].loop, m.is_lattice());
                    else
                        lk = linking_number(curves[a].loop ? curves[a].loop->vertices : curves[a].closed,
                                            curves[b].loop ? curves[b].loop->vertices : curves[b].closed);
                    if (!curves[a].loop || !curves[b].loop)
                        e["convention"] = "open arc closed by a far-field rectangle at distance " +
                                          std::to_string(3.0 * m.domain().extent);
                    e["value"] = lk.value;
                    e["raw"] = lk.raw;
                    e["residual"] = lk.residual;
                    e["method"] = lk.method;
                    mat[a][b] = lk.value;
                    mat[b][a] = lk.value;
                } catch (const Error& ex) {
                    e["value"] = nullptr;
                    e["reason"] = ex.what();
                }
                pairs.push_back(e);
            }
        for (auto& row : mat) matrix.push_back(row);
        return {{"ids", ids}, {"matrix", matrix}, {"pairs", pairs}};
    }

    int link_cmd()
    {
        const BlochModel m = model();
        const LocateResult r = located(m);
        json j = linking_json(m, r);
        j["schema_version"] = kSchemaVersion;
        j["model"] = m.name();
        emit(j, "linking.json");
        if (j["pairs"].empty()) say("fewer than two closed curves; nothing to link");
        for (const auto& p : j["pairs"]) {
            std::string line = p["a"].get<std::string>() + " - " + p["b"].get<std::string>() + ": ";
            line += p["value"].is_null() ? "undefined (" + p["reason"].get<std::string>() + ")"
                                         : std::to_string(p["value"].get<int>());
            say(line);
        }
        return kExitOk;
    }

    int report_cmd()
    {
        const BlochModel m = model();
        const LocateResult r = located(m);
        const ChargeLedger ledger = build_ledger(m, r, ledger_options());
        json stokes;
        const auto vs = verdicts(ledger, &m, &stokes);
        json j;
        j["schema_version"] = kSchemaVersion;
        j["model"] = model_to_json(m);
        j["settings"] = {{"grid", cfg_.grid}, {"mesh", {cfg_.mesh_u, cfg_.mesh_v}}, {"tube_radius", cfg_.tube_radius},
                         {"sphere_radius", cfg_.sphere_radius}};
        j["locus"] = locus_to_json(r);
        j["ledger"] = ledger_to_json(ledger);
        j["linking"] = linking_json(m, r);
        j["verdicts"] = verdicts_json(vs);
        if (!stokes.is_null()) j["stokes"] = stokes;
        emit(j, "report.json");
        for (const auto& [id, phases] : ledger.wilson_phases) write("wilson_" + id + ".csv", wilson_csv(phases));
        summarize_locus(r);
        summarize_ledger(ledger);
        bool ok = true;
        for (const auto& v : vs) {
            say(v.name + ": " + to_string(v.status) + " (" + v.detail + ")");
            ok = ok && v.passed();
        }
        return ok ? kExitOk : kExitVerificationFailed;
    }

    int cohomology_cmd()
    {
        const int n = cfg_.resolution;
        const bool integral = n <= kMaxIntegralResolution;
        json j;
        j["schema_version"] = kSchemaVersion;
        j["fixture"] = cfg_.fixture;
        j["resolution"] = n;
        bool ok = true;

        auto groups_of = [&](const CellComplex& cx, json& where) {
            std::array<CohomologyGroups, 3> g{cohomology_groups(cx, Coefficients::Q),
                                              cohomology_groups(cx, Coefficients::Z2), CohomologyGroups{}};
            where["cells"] = cx.counts();
            where["Q"] = groups_to_json(g[0]);
            where["Z2"] = groups_to_json(g[1]);
            std::ostringstream os;
            os << std::left << std::setw(11) << cx.name << " Q (" << g[0].rank[0] << "," << g[0].rank[1] << ","
               << g[0].rank[2] << "," << g[0].rank[3] << ")  Z2 (" << g[1].rank[0] << "," << g[1].rank[1] << ","
               << g[1].rank[2] << "," << g[1].rank[3] << ")";
            if (integral) {
                g[2] = cohomology_groups(cx, Coefficients::Z);
                where["Z"] = groups_to_json(g[2]);
                const UCTCheck u = uct_check(g[2], g[1]);
                where["uct"] = uct_to_json(u);
                os << "  Z (" << g[2].rank[0] << "," << g[2].rank[1] << "," << g[2].rank[2] << "," << g[2].rank[3]
                   << ")";
                for (int p = 0; p < 4; ++p)
                    for (auto t : g[2].torsion[p]) os << " +Z/" << t << " in H^" << p;
                os << "  uct " << (u.passed ? "pass" : "fail");
                ok = ok && u.passed;
            }
            say(os.str());
            return g;
        };

        if (cfg_.fixture == "torus" || cfg_.fixture == "klein") {
            const CellComplex cx = cfg_.fixture == "torus" ? torus_complex(n) : klein_bottle_complex(n);
            json sp;
            groups_of(cx, sp);
            j["spaces"] = {{cx.name, sp}};
        } else {
            Fixture f;
            try {
                f = parse_fixture(cfg_.fixture);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            MVSpaces sp;
            try {
                sp = fixture_spaces(f, n);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            json spaces;
            std::map<std::string, std::array<CohomologyGroups, 3>> g;
            for (const CellComplex* cx : {&sp.torus, &sp.complement, &sp.tube, &sp.interface}) {
                json s;
                g[cx->name] = groups_of(*cx, s);
                spaces[cx->name] = s;
            }
            j["spaces"] = spaces;
            j["components"] = sp.components;
            if (cfg_.corrupt) {
                for (int c = 0; c < 2; ++c) g["complement"][c].rank[1] += 1;
                j["corrupted"] = "complement H^1 raised by one";
            }
            json mv;
            for (int c = 0; c < 2; ++c) {
                const MVCheck chk = mv_dimension_check(g["torus"][c], g["complement"][c], g["tube"][c],
                                                       g["interface"][c], sp.components);
                const std::string coeff = c == 0 ? "Q" : "Z2";
                mv[coeff] = mv_to_json(chk);
                say("Mayer-Vietoris over " + coeff + ": " + (chk.passed ? "pass" : "fail") + " (" + chk.detail + ")");
                ok = ok && chk.passed;
            }
            j["mayer_vietoris"] = mv;
        }
        if (!integral) {
            j["integral"] = "skipped above resolution " + std::to_string(kMaxIntegralResolution);
            say("integral cohomology skipped above resolution " + std::to_string(kMaxIntegralResolution));
        }
        j["passed"] = ok;
        emit(j, "cohomology.json");
        return ok ? kExitOk : kExitVerificationFailed;
    }

    RunConfig cfg_;
    const CLI::App& app_;
    std::ostream& out_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"nodal-set topology toolkit", "nodaltop"};
    RunConfig cfg;
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.add_option("--model", cfg.model_name, "builtin model name");
    app.add_option("--param", cfg.params, "model parameter key=value (repeatable)")
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--config", cfg.config_path, "model or run config JSON");
    app.add_option("--grid", cfg.grid, "k-grid resolution for locus search");
    app.add_option("--mesh", cfg.mesh, "surface mesh NxM");
    app.add_option("--tube-radius", cfg.tube_radius, "tube radius around nodal loops");
    app.add_option("--sphere-radius", cfg.sphere_radius, "sphere radius around nodal points");
    app.add_option("--resolution", cfg.resolution, "cubical resolution (cohomology)");
    app.add_option("--out", cfg.out_dir, "directory for JSON/CSV output");
    app.add_option("--threads", cfg.threads, "worker threads (default: NODALTOP_THREADS or all cores)");
    app.add_flag("--json", cfg.json, "print JSON instead of the human summary");
    app.add_option("--axis", cfg.axis, "slice axis for scan/verify (x, y, z)");
    app.add_option("--slices", cfg.slices, "number of slices for scan/verify");
    app.add_option("--ledger", cfg.ledger_path, "verify an existing ledger JSON");
    app.add_option("--fixture", cfg.fixture, "cohomology fixture: point, loop, link, torus, klein");
    app.add_flag("--corrupt", cfg.corrupt, "perturb the complement Betti numbers (cohomology self-test)");

    const std::vector<std::pair<const char*, const char*>> commands{
        {"locate", "find Weyl points and nodal loops"},
        {"charges", "charge ledger of every nodal component"},
        {"verify", "charge cancellation and Chern jump verdicts"},
        {"cohomology", "cellular cohomology and Mayer-Vietoris bookkeeping of a fixture"},
        {"scan", "Chern numbers of slice tori"},
        {"link", "linking matrix of nodal loops"},
        {"report", "locus, ledger, linking and verdicts in one JSON"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "nodaltop: " << e.what() << "\nrun with --help for usage\n";
        return kExitUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        std::tie(cfg.mesh_u, cfg.mesh_v) = parse_mesh(cfg.mesh);
        check_ranges(cfg);
        parse_axis(cfg.axis);
        Session s(cfg, app, out);
        return s.run();
    } catch (const ConfigError& e) {
        err << "nodaltop: " << e.what() << "\n";
        return kExitUsage;
    } catch (const AmbiguousLocusError& e) {
        err << "nodaltop: ambiguous nodal set: " << e.what() << "\n";
        return kExitAmbiguousLocus;
    } catch (const Error& e) {
        err << "nodaltop: " << e.what() << "\n";
        return kExitVerificationFailed;
    }
}

}  // namespace nodaltop

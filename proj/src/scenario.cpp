#include "beam/scenario.hpp"

#include "beam/catalog.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace beam {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, r.ptr);
}

namespace {

// Object reader that records visited keys so unknown keys can be rejected.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ScenarioError(where() + ": expected an object");
    }

    std::string where(const std::string& key = "") const {
        if (key.empty()) return path_.empty() ? "<document>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }
    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        throw ScenarioError(where(key) + ": " + why);
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json* get(const std::string& key, bool required = false) {
        used_.insert(key);
        if (!j_.contains(key)) {
            if (required) fail(key, "required field missing");
            return nullptr;
        }
        return &j_.at(key);
    }

    double number(const std::string& key, double def, bool required = false) {
        const json* v = get(key, required);
        if (!v) return def;
        if (!v->is_number()) fail(key, "expected a number");
        const double x = v->get<double>();
        if (!std::isfinite(x)) fail(key, "must be finite");
        return x;
    }

    int integer(const std::string& key, int def, bool required = false) {
        const json* v = get(key, required);
        if (!v) return def;
        if (!v->is_number_integer()) fail(key, "expected an integer");
        return v->get<int>();
    }

    bool boolean(const std::string& key, bool def) {
        const json* v = get(key);
        if (!v) return def;
        if (!v->is_boolean()) fail(key, "expected true or false");
        return v->get<bool>();
    }

    std::string text(const std::string& key, const std::string& def, const std::vector<std::string>& allowed = {}) {
        const json* v = get(key);
        if (!v) return def;
        if (!v->is_string()) fail(key, "expected a string");
        std::string s = v->get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string msg = "unknown value '" + s + "', expected one of";
            for (const auto& a : allowed) msg += " " + a;
            fail(key, msg);
        }
        return s;
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& def = {}) {
        const json* v = get(key);
        if (!v) return def;
        return as_numbers(*v, where(key));
    }

    Vec3 vec3(const std::string& key, const Vec3& def, bool required = false) {
        const json* v = get(key, required);
        if (!v) return def;
        return as_vec3(*v, where(key));
    }

    Node child(const std::string& key, bool required = false) {
        const json* v = get(key, required);
        static const json empty = json::object();
        return Node(v ? *v : empty, where(key));
    }

    const json& raw() const { return j_; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ScenarioError(where(it.key()) + ": unknown field");
    }

    static std::vector<double> as_numbers(const json& v, const std::string& at) {
        if (!v.is_array()) throw ScenarioError(at + ": expected an array of numbers");
        std::vector<double> out;
        for (size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ScenarioError(at + "[" + std::to_string(i) + "]: expected a number");
            out.push_back(v[i].get<double>());
            if (!std::isfinite(out.back())) throw ScenarioError(at + "[" + std::to_string(i) + "]: must be finite");
        }
        return out;
    }

    static Vec3 as_vec3(const json& v, const std::string& at) {
        const auto x = as_numbers(v, at);
        if (x.size() != 3) throw ScenarioError(at + ": expected 3 components");
        return {x[0], x[1], x[2]};
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

TimeCurve parse_curve(Node& n, const std::string& key, const TimeCurve& def) {
    const json* v = n.get(key);
    if (!v) return def;
    const std::string at = n.where(key);
    if (v->is_number()) return TimeCurve::constant(v->get<double>());
    Node c(*v, at);
    TimeCurve tc;
    tc.t = c.numbers("t");
    tc.v = c.numbers("v");
    c.get("t", true);
    c.get("v", true);
    c.finish();
    if (tc.t.empty() || tc.t.size() != tc.v.size()) throw ScenarioError(at + ": t and v must be non-empty and of equal length");
    for (size_t i = 1; i < tc.t.size(); ++i)
        if (!(tc.t[i] > tc.t[i - 1])) throw ScenarioError(at + ".t: must be strictly increasing");
    return tc;
}

json curve_json(const TimeCurve& c) { return {{"t", c.t}, {"v", c.v}}; }
json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

void require(bool ok, Node& n, const std::string& key, const std::string& why) {
    if (!ok) n.fail(key, why);
}

int arc_pieces(double sweep) {
    return std::max(1, static_cast<int>(std::ceil(sweep / (0.5 * std::numbers::pi) - 1e-12)));
}

GeometrySpec parse_geometry(Node n) {
    GeometrySpec g;
    g.kind = n.text("kind", g.kind, {"straight", "arc", "ring", "nurbs"});
    g.degree = n.integer("degree", g.degree, true);
    require(g.degree >= 1, n, "degree", "must be >= 1");
    if (g.kind == "straight") {
        g.start = n.vec3("start", g.start, true);
        g.end = n.vec3("end", g.end, true);
        require((g.end - g.start).norm() > 0.0, n, "end", "coincides with start");
    } else if (g.kind == "arc" || g.kind == "ring") {
        g.center = n.vec3("center", g.center);
        g.u = n.vec3("u", g.u);
        g.v = n.vec3("v", g.v);
        require(std::abs(g.u.norm() - 1.0) < 1e-12, n, "u", "must be a unit vector");
        require(std::abs(g.v.norm() - 1.0) < 1e-12, n, "v", "must be a unit vector");
        require(std::abs(g.u.dot(g.v)) < 1e-12, n, "v", "must be orthogonal to u");
        g.radius = n.number("radius", g.radius, true);
        require(g.radius > 0.0, n, "radius", "must be positive");
        g.start_angle = n.number("start_angle", 0.0);
        if (g.kind == "arc") {
            g.sweep = n.number("sweep", 0.0, true);
            require(g.sweep > 0.0 && g.sweep <= 2.0 * std::numbers::pi, n, "sweep", "must lie in (0, 2 pi]");
        } else {
            g.slot_angle = n.number("slot_angle", 0.0);
            require(g.slot_angle >= 0.0 && g.slot_angle < 2.0 * std::numbers::pi, n, "slot_angle",
                    "must lie in [0, 2 pi)");
        }
    } else {
        g.knots = n.numbers("knots");
        n.get("knots", true);
        const json* cp = n.get("control_points", true);
        if (!cp->is_array()) n.fail("control_points", "expected an array of points");
        for (size_t i = 0; i < cp->size(); ++i)
            g.control_points.push_back(Node::as_vec3((*cp)[i], n.where("control_points") + "[" + std::to_string(i) + "]"));
        g.weights = n.numbers("weights");
        g.refine = n.integer("refine", g.refine);
        require(g.refine >= 1, n, "refine", "must be >= 1");
        NurbsCurve c{KnotVector(g.knots, g.degree), g.control_points, g.weights};
        try {
            c.validate();
        } catch (const std::exception& ex) {
            n.fail("knots", ex.what());
        }
    }
    if (g.kind != "nurbs") {
        g.elements = n.integer("elements", g.elements, true);
        require(g.elements >= 1, n, "elements", "must be >= 1");
        const int pieces = g.kind == "ring" ? 4 : g.kind == "arc" ? arc_pieces(g.sweep) : 1;
        require(g.elements % pieces == 0, n, "elements",
                "must be a multiple of the " + std::to_string(pieces) + " arc pieces");
    }
    g.director_degree = n.integer("director_degree", g.degree);
    require(g.director_degree >= 1 && g.director_degree <= g.degree, n, "director_degree", "must lie in [1, degree]");
    g.frame = n.text("frame", g.frame, {"smallest-rotation", "frenet"});
    g.seed = n.vec3("seed", g.seed);
    g.director_mode = n.text("director_mode", g.director_mode, {"D-disc", "D-cont"});
    n.finish();
    return g;
}

SectionSpec parse_section(Node n) {
    SectionSpec s;
    s.width = n.number("width", s.width, true);
    s.height = n.number("height", s.height, true);
    s.density = n.number("density", s.density);
    require(s.width > 0.0, n, "width", "must be positive");
    require(s.height > 0.0, n, "height", "must be positive");
    require(s.density > 0.0, n, "density", "must be positive");
    Node e = n.child("eas");
    s.eas.m1 = e.integer("m1", s.eas.m1);
    s.eas.m2 = e.integer("m2", s.eas.m2);
    s.eas.m3 = e.integer("m3", s.eas.m3);
    s.eas.m4 = e.integer("m4", s.eas.m4);
    require(s.eas.m1 >= 0, e, "m1", "must be >= 0");
    require(s.eas.m2 >= 0, e, "m2", "must be >= 0");
    require(s.eas.m3 >= 0, e, "m3", "must be >= 0");
    require(s.eas.m4 >= 0, e, "m4", "must be >= 0");
    e.finish();
    s.assume_orthonormal_frame = n.boolean("assume_orthonormal_frame", s.assume_orthonormal_frame);
    n.finish();
    return s;
}

MaterialSpec parse_material(Node n) {
    MaterialSpec m;
    m.model = n.text("model", m.model, {"svk", "neo-hookean"});
    m.E = n.number("E", m.E, true);
    m.nu = n.number("nu", m.nu, true);
    require(m.E > 0.0, n, "E", "must be positive");
    require(m.nu > -1.0 && m.nu < 0.5, n, "nu", "must lie in (-1, 0.5)");
    n.finish();
    return m;
}

BoundaryConditions parse_boundary(Node n, double area) {
    BoundaryConditions bc;
    if (const json* a = n.get("dirichlet")) {
        if (!a->is_array()) n.fail("dirichlet", "expected an array");
        for (size_t i = 0; i < a->size(); ++i) {
            Node c((*a)[i], n.where("dirichlet") + "[" + std::to_string(i) + "]");
            DirichletCondition d;
            d.label = c.text("label", "bc" + std::to_string(i));
            d.xi = c.number("xi", 0.0, true);
            require(d.xi >= 0.0 && d.xi <= 1.0, c, "xi", "must lie in [0, 1]");
            if (const json* f = c.get("fix_position")) {
                if (!f->is_array() || f->size() != 3) c.fail("fix_position", "expected 3 booleans");
                for (int k = 0; k < 3; ++k) {
                    if (!(*f)[k].is_boolean()) c.fail("fix_position", "expected 3 booleans");
                    d.phi[k] = (*f)[k].get<bool>();
                }
            }
            d.directors = c.boolean("fix_directors", d.directors);
            d.axis = c.vec3("axis", d.axis);
            require(d.axis.norm() > 0.0, c, "axis", "must be non-zero");
            d.angle = parse_curve(c, "angle", d.angle);
            d.translation = c.vec3("translation", d.translation);
            d.translation_scale = parse_curve(c, "translation_scale", d.translation_scale);
            if (c.has("center")) d.center = c.vec3("center", Vec3::Zero());
            c.finish();
            bc.dirichlet.push_back(d);
        }
    }
    if (const json* a = n.get("end_loads")) {
        if (!a->is_array()) n.fail("end_loads", "expected an array");
        for (size_t i = 0; i < a->size(); ++i) {
            Node c((*a)[i], n.where("end_loads") + "[" + std::to_string(i) + "]");
            EndLoad l;
            l.xi = c.number("xi", 1.0, true);
            require(l.xi == 0.0 || l.xi == 1.0, c, "xi", "end loads act at xi = 0 or xi = 1");
            l.force = c.vec3("force", l.force);
            if (c.has("traction")) {
                if (c.has("force")) c.fail("traction", "give either force or traction");
                l.force = area * c.vec3("traction", Vec3::Zero());
            }
            l.couple1 = c.vec3("couple1", l.couple1);
            l.couple2 = c.vec3("couple2", l.couple2);
            l.scale = parse_curve(c, "scale", l.scale);
            c.finish();
            bc.end_loads.push_back(l);
        }
    }
    if (const json* a = n.get("distributed")) {
        if (!a->is_array()) n.fail("distributed", "expected an array");
        for (size_t i = 0; i < a->size(); ++i) {
            Node c((*a)[i], n.where("distributed") + "[" + std::to_string(i) + "]");
            DistributedLoad l;
            l.force = c.vec3("force", l.force, true);
            l.scale = parse_curve(c, "scale", l.scale);
            c.finish();
            bc.distributed.push_back(l);
        }
    }
    n.finish();
    return bc;
}

SolverSpec parse_solver(Node n) {
    SolverSpec s;
    s.scheme = n.text("scheme", s.scheme, {"quasistatic", "emc", "midpoint", "trapezoidal"});
    s.dt = n.number("dt", s.dt);
    s.steps = n.integer("steps", s.steps);
    require(s.dt > 0.0, n, "dt", "must be positive");
    require(s.steps >= 1, n, "steps", "must be >= 1");
    NewtonSettings& ns = s.newton;
    ns.tol_rel = n.number("tol_rel", ns.tol_rel);
    ns.tol_abs = n.number("tol_abs", ns.tol_abs);
    ns.max_iter = n.integer("max_iter", ns.max_iter);
    ns.polish = n.integer("polish", ns.polish);
    ns.max_halvings = n.integer("max_halvings", ns.max_halvings);
    require(ns.tol_rel >= 0.0, n, "tol_rel", "must be >= 0");
    require(ns.tol_abs >= 0.0, n, "tol_abs", "must be >= 0");
    require(ns.max_iter >= 1, n, "max_iter", "must be >= 1");
    require(ns.polish >= 0, n, "polish", "must be >= 0");
    require(ns.max_halvings >= 0 && ns.max_halvings <= 30, n, "max_halvings", "must lie in [0, 30]");
    n.finish();
    return s;
}

}  // namespace

Scheme parse_scheme(const std::string& s) {
    if (s == "quasistatic") return Scheme::QuasiStatic;
    if (s == "emc") return Scheme::EMC;
    if (s == "midpoint") return Scheme::Midpoint;
    if (s == "trapezoidal") return Scheme::Trapezoidal;
    throw ScenarioError("solver.scheme: unknown value '" + s + "'");
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::QuasiStatic: return "quasistatic";
        case Scheme::EMC: return "emc";
        case Scheme::Midpoint: return "midpoint";
        case Scheme::Trapezoidal: return "trapezoidal";
    }
    return "?";
}

Scenario parse_scenario(const json& doc) {
    Node n(doc, "");
    Scenario s;
    s.name = n.text("name", s.name);
    s.description = n.text("description", "");
    s.provenance = n.text("provenance", "");
    s.case_name = n.text("case", "");
    s.geometry = parse_geometry(n.child("geometry", true));
    s.section = parse_section(n.child("section", true));
    s.material = parse_material(n.child("material", true));
    s.bcs = parse_boundary(n.child("boundary"), s.section.width * s.section.height);
    {
        Node v = n.child("initial_velocity");
        const char* keys[3] = {"x", "y", "z"};
        for (int k = 0; k < 3; ++k) s.initial_velocity.poly[k] = v.numbers(keys[k]);
        v.finish();
    }
    s.solver = parse_solver(n.child("solver"));
    {
        Node o = n.child("output");
        s.output.snapshot_times = o.numbers("snapshot_times");
        s.output.samples_per_element = o.integer("samples_per_element", s.output.samples_per_element);
        require(s.output.samples_per_element >= 1, o, "samples_per_element", "must be >= 1");
        o.finish();
    }
    for (const auto& d : s.bcs.dirichlet)
        for (const auto& e : s.bcs.dirichlet)
            if (&d != &e && d.label == e.label) throw ScenarioError("boundary.dirichlet: duplicate label '" + d.label + "'");
    n.finish();
    return s;
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["description"] = s.description;
    j["provenance"] = s.provenance;
    j["case"] = s.case_name;
    const GeometrySpec& g = s.geometry;
    json geo = {{"kind", g.kind}, {"degree", g.degree}};
    if (g.kind == "straight") {
        geo["start"] = vec_json(g.start);
        geo["end"] = vec_json(g.end);
    } else if (g.kind == "arc" || g.kind == "ring") {
        geo["center"] = vec_json(g.center);
        geo["u"] = vec_json(g.u);
        geo["v"] = vec_json(g.v);
        geo["radius"] = g.radius;
        geo["start_angle"] = g.start_angle;
        if (g.kind == "arc")
            geo["sweep"] = g.sweep;
        else
            geo["slot_angle"] = g.slot_angle;
    } else {
        geo["knots"] = g.knots;
        json cps = json::array();
        for (const auto& p : g.control_points) cps.push_back(vec_json(p));
        geo["control_points"] = cps;
        geo["weights"] = g.weights;
        geo["refine"] = g.refine;
    }
    if (g.kind != "nurbs") geo["elements"] = g.elements;
    geo["director_degree"] = g.director_degree;
    geo["frame"] = g.frame;
    geo["seed"] = vec_json(g.seed);
    geo["director_mode"] = g.director_mode;
    j["geometry"] = geo;
    const SectionSpec& sc = s.section;
    j["section"] = {{"width", sc.width},
                    {"height", sc.height},
                    {"density", sc.density},
                    {"eas", {{"m1", sc.eas.m1}, {"m2", sc.eas.m2}, {"m3", sc.eas.m3}, {"m4", sc.eas.m4}}},
                    {"assume_orthonormal_frame", sc.assume_orthonormal_frame}};
    j["material"] = {{"model", s.material.model}, {"E", s.material.E}, {"nu", s.material.nu}};
    json dir = json::array(), ends = json::array(), dist = json::array();
    for (const auto& d : s.bcs.dirichlet) {
        json c = {{"label", d.label},
                  {"xi", d.xi},
                  {"fix_position", {d.phi[0], d.phi[1], d.phi[2]}},
                  {"fix_directors", d.directors},
                  {"axis", vec_json(d.axis)},
                  {"angle", curve_json(d.angle)},
                  {"translation", vec_json(d.translation)},
                  {"translation_scale", curve_json(d.translation_scale)}};
        if (d.center) c["center"] = vec_json(*d.center);
        dir.push_back(c);
    }
    for (const auto& l : s.bcs.end_loads)
        ends.push_back({{"xi", l.xi},
                        {"force", vec_json(l.force)},
                        {"couple1", vec_json(l.couple1)},
                        {"couple2", vec_json(l.couple2)},
                        {"scale", curve_json(l.scale)}});
    for (const auto& l : s.bcs.distributed) dist.push_back({{"force", vec_json(l.force)}, {"scale", curve_json(l.scale)}});
    j["boundary"] = {{"dirichlet", dir}, {"end_loads", ends}, {"distributed", dist}};
    j["initial_velocity"] = {{"x", s.initial_velocity.poly[0]}, {"y", s.initial_velocity.poly[1]}, {"z", s.initial_velocity.poly[2]}};
    const NewtonSettings& ns = s.solver.newton;
    j["solver"] = {{"scheme", s.solver.scheme},         {"dt", s.solver.dt},   {"steps", s.solver.steps},
                   {"tol_rel", ns.tol_rel},             {"tol_abs", ns.tol_abs}, {"max_iter", ns.max_iter},
                   {"polish", ns.polish},               {"max_halvings", ns.max_halvings}};
    j["output"] = {{"snapshot_times", s.output.snapshot_times}, {"samples_per_element", s.output.samples_per_element}};
    return j;
}

json load_document(const std::string& name_or_path, const std::string& case_name) {
    json doc;
    if (const CatalogEntry* e = find_example(name_or_path)) {
        doc = json::parse(e->document);
    } else {
        std::ifstream in(name_or_path);
        if (!in) throw ScenarioError(name_or_path + ": no such bundled example or readable file");
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& ex) {
            throw ScenarioError(name_or_path + ": malformed JSON: " + ex.what());
        }
    }
    if (!doc.is_object()) throw ScenarioError("<document>: expected an object");
    std::string chosen = case_name;
    if (doc.contains("cases")) {
        const json cases = doc["cases"];
        if (!cases.is_object()) throw ScenarioError("cases: expected an object");
        if (chosen.empty()) {
            if (!doc.contains("default_case") || !doc["default_case"].is_string())
                throw ScenarioError("default_case: required when cases are present");
            chosen = doc["default_case"].get<std::string>();
        }
        if (!cases.contains(chosen)) throw ScenarioError("cases." + chosen + ": no such case");
        doc.erase("cases");
        doc.erase("default_case");
        doc.merge_patch(cases[chosen]);
        doc["case"] = chosen;
    } else if (!chosen.empty()) {
        throw ScenarioError("cases: document defines no cases, cannot select '" + chosen + "'");
    }
    return doc;
}

NurbsCurve build_curve(const GeometrySpec& g) {
    if (g.kind == "straight") return make_line(g.start, g.end, g.degree, g.elements);
    if (g.kind == "arc")
        return make_arc(g.center, g.u, g.v, g.radius, g.start_angle, g.sweep, g.degree, g.elements, arc_pieces(g.sweep));
    if (g.kind == "ring")
        return make_arc(g.center, g.u, g.v, g.radius, g.start_angle + 0.5 * g.slot_angle,
                        2.0 * std::numbers::pi - g.slot_angle, g.degree, g.elements, 4);
    NurbsCurve c{KnotVector(g.knots, g.degree), g.control_points, g.weights};
    c.validate();
    return g.refine > 1 ? refine_uniform(c, g.refine) : c;
}

Model build_model(const Scenario& s) {
    const GeometrySpec& g = s.geometry;
    const NurbsCurve curve = build_curve(g);
    const FrameMethod fm = g.frame == "frenet" ? FrameMethod::Frenet : FrameMethod::SmallestRotation;
    const DirectorMode dm = g.director_mode == "D-cont" ? DirectorMode::Continuous : DirectorMode::Discrete;
    InitialGeometry geom = make_initial_geometry(curve, g.director_degree, fm, g.seed, dm);
    SectionOptions so;
    so.cs = {s.section.width, s.section.height, s.section.density};
    so.eas = s.section.eas;
    so.assume_orthonormal_frame = s.section.assume_orthonormal_frame;
    const MaterialKind mk = s.material.model == "neo-hookean" ? MaterialKind::NeoHookean : MaterialKind::SVK;
    Model m;
    m.disc = std::make_unique<Discretization>(std::move(geom), so, MaterialLaw::make(mk, s.material.E, s.material.nu));
    m.bcs = s.bcs;
    m.scheme = parse_scheme(s.solver.scheme);
    if (!s.initial_velocity.empty()) {
        const double L = m.disc->length_scale();
        const auto poly = s.initial_velocity.poly;
        m.V0 = project_velocity(*m.disc, [L, poly](double sarc) {
            const double x = sarc / L;
            Vec3 v = Vec3::Zero();
            for (int k = 0; k < 3; ++k) {
                double p = 1.0;
                for (double c : poly[k]) {
                    v[k] += c * p;
                    p *= x;
                }
            }
            return v;
        });
    }
    return m;
}

json RunReport::to_json(const Scenario& s) const {
    json steps = json::array();
    for (const auto& l : log) steps.push_back({{"step", l.step}, {"t", l.t}, {"dt", l.dt}, {"iterations", l.iterations}});
    const auto& f = final_state;
    return {{"scenario", s.name},
            {"case", s.case_name},
            {"success", success},
            {"failure", failure},
            {"wall_seconds", wall_seconds},
            {"steps", steps},
            {"final", {{"t", f.t}, {"L", vec_json(f.L)}, {"J", vec_json(f.J)}, {"K", f.K}, {"U", f.U}, {"W", f.W}, {"E", f.E}, {"E_star", f.Estar}}},
            {"manifest", manifest}};
}

namespace {

class CsvWriter {
public:
    CsvWriter(const fs::path& p, const std::vector<std::string>& header) : out_(p) {
        if (!out_) throw std::runtime_error("cannot write " + p.string());
        for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }
    CsvWriter& operator<<(double x) { return cell(format_double(x)); }
    CsvWriter& operator<<(int x) { return cell(std::to_string(x)); }
    CsvWriter& operator<<(const std::string& x) { return cell(x); }
    CsvWriter& operator<<(const Vec3& v) { return *this << v[0] << v[1] << v[2]; }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }
    void flush() { out_.flush(); }

private:
    CsvWriter& cell(const std::string& s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }
    std::ofstream out_;
    bool first_ = true;
};

void write_snapshot(const fs::path& p, const Discretization& d, const GlobalState& st, int samples) {
    CsvWriter w(p, {"xi", "phi_x", "phi_y", "phi_z", "d1_x", "d1_y", "d1_z", "d2_x", "d2_y", "d2_z"});
    const Configuration cfg = d.unpack(st.y);
    const auto& E = d.elements();
    for (size_t e = 0; e < E.size(); ++e)
        for (int k = 0; k <= samples; ++k) {
            if (k == samples && e + 1 < E.size()) continue;
            const double xi = E[e].xa + (E[e].xb - E[e].xa) * k / samples;
            const ConfigPoint c = eval_config(cfg, d.geometry(), xi);
            w << xi << c.phi << c.d1 << c.d2;
            w.end_row();
        }
}

void write_eas_basis(const fs::path& p, const Discretization& d) {
    CsvWriter w(p, {"family", "member", "z1", "z2", "value", "d_z1", "d_z2"});
    const auto& rule = d.section_rule();
    const auto& b = d.eas();
    for (int i = 0; i < 4; ++i)
        for (size_t q = 0; q < rule.size(); ++q) {
            Eigen::VectorXd v, d1, d2;
            b.eval_family(i, rule.z1[q], rule.z2[q], v, d1, d2);
            for (int j = 0; j < v.size(); ++j) {
                w << i + 1 << j << rule.z1[q] << rule.z2[q] << v[j] << d1[j] << d2[j];
                w.end_row();
            }
        }
}

const std::vector<std::string> kHistoryHeader = {"step", "t", "dt", "iterations", "L_norm", "L_x", "L_y", "L_z", "J_x",
                                                 "J_y", "J_z", "K", "U", "W", "E", "E_star"};

void history_row(CsvWriter& w, int step, const DiagnosticsRecord& r) {
    w << step << r.t << r.dt << r.iterations << r.L.norm() << r.L << r.J << r.K << r.U << r.W << r.E << r.Estar;
    w.end_row();
}

}  // namespace

RunReport run_scenario(const Scenario& s, const RunOptions& opt) {
    const auto t_start = std::chrono::steady_clock::now();
    RunReport rep;
    const fs::path out(opt.out_dir);
    fs::create_directories(out);
    auto add = [&](const std::string& f) {
        rep.manifest.push_back((out / f).string());
        return out / f;
    };

    {
        std::ofstream echo(add("scenario.json"));
        echo << scenario_to_json(s).dump(2) << '\n';
    }

    Model m = build_model(s);
    const Discretization& d = *m.disc;
    NewtonSettings ns = s.solver.newton;
    ns.trace = opt.trace;
    Solver solver(d, m.bcs, m.scheme, ns);
    if (m.V0.size() > 0) solver.set_velocity(m.V0);

    if (opt.dump_eas_basis) write_eas_basis(add("eas_basis.csv"), d);

    CsvWriter hist(add("history.csv"), kHistoryHeader);
    CsvWriter reac(add("reactions.csv"), {"step", "t", "label", "F_x", "F_y", "F_z", "M_x", "M_y", "M_z", "M_axis"});
    std::vector<DiagnosticsRecord> records{solver.current_diagnostics()};
    history_row(hist, 0, records.back());

    std::vector<double> snaps = s.output.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    size_t next_snap = 0;
    int snap_id = 0;
    auto take_snapshots = [&](double t) {
        const double tol = 1e-9 * s.solver.dt;
        while (next_snap < snaps.size() && t >= snaps[next_snap] - tol) {
            char name[32];
            std::snprintf(name, sizeof(name), "snapshot_%03d.csv", snap_id++);
            write_snapshot(add(name), d, solver.state(), s.output.samples_per_element);
            ++next_snap;
        }
    };
    take_snapshots(0.0);

    int step = 0;
    rep.success = true;
    for (int n = 0; n < s.solver.steps; ++n) {
        std::vector<DiagnosticsRecord> recs;
        try {
            recs = solver.advance_to((n + 1) * s.solver.dt);
        } catch (const NonConvergence& ex) {
            rep.success = false;
            rep.failure = ex.what();
            break;
        }
        for (const auto& r : recs) {
            history_row(hist, ++step, r);
            records.push_back(r);
            rep.log.push_back({step, r.t, r.dt, r.iterations});
        }
        for (const auto& r : solver.reactions()) {
            reac << step << solver.time() << r.label << r.force << r.moment << r.axial_moment;
            reac.end_row();
        }
        take_snapshots(solver.time());
    }
    hist.flush();
    reac.flush();

    {
        CsvWriter w(add("consistency.csv"), {"step", "t", "E", "E_star", "rel_diff"});
        const auto c = energy_consistency_check(records);
        for (size_t i = 0; i < records.size(); ++i) {
            w << static_cast<int>(i) << records[i].t << records[i].E << records[i].Estar << c[i];
            w.end_row();
        }
    }
    write_snapshot(add("final_state.csv"), d, solver.state(), s.output.samples_per_element);
    if (opt.dump_matrix) {
        CsvWriter w(add("matrix.csv"), {"row", "col", "value"});
        for (const auto& [i, j, v] : solver.tangent_triplets()) {
            w << i << j << v;
            w.end_row();
        }
    }
    {
        std::ofstream gp(add("plot.gp"));
        gp << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\n"
              "plot 'history.csv' using 't':'E' with lines, '' using 't':'U' with lines, '' using 't':'K' with lines\n"
              "pause -1\n";
    }
    rep.final_state = records.back();
    rep.manifest.push_back((out / "report.json").string());
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    std::ofstream(out / "report.json") << rep.to_json(s).dump(2) << '\n';
    return rep;
}

}  // namespace beam

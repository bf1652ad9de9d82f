#include "beam/catalog.hpp"
#include "beam/scenario.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

using namespace beam;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("beam_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("catalog lists the six examples then smoke tests") {
    const auto& c = catalog();
    REQUIRE(c.size() == 8);
    const char* names[] = {"ex1_objectivity", "ex2_bent_rotation", "ex3_torsion_case1", "ex4_ring_twist",
                           "ex5_flying_beam", "ex6_ring", "smoke_cantilever", "smoke_free_flight"};
    for (size_t i = 0; i < c.size(); ++i) {
        CHECK(c[i].name == names[i]);
        CHECK(!c[i].provenance.empty());
        CHECK(json::parse(c[i].document)["name"] == c[i].name);
    }
    CHECK(find_example("ex4_ring_twist") == &c[3]);
    CHECK(find_example("nope") == nullptr);
}

TEST_CASE("every bundled example parses and builds") {
    for (const auto& e : catalog()) {
        const Scenario s = parse_scenario(load_document(e.name));
        const Model m = build_model(s);
        CHECK(m.disc->n_el() == s.geometry.elements);
        CHECK_NOTHROW(resolve_dirichlet(*m.disc, m.bcs));
    }
}

TEST_CASE("torsion example parses to the expected setup") {
    const Scenario s = parse_scenario(load_document("ex3_torsion_case1"));
    CHECK(s.geometry.kind == "straight");
    CHECK((s.geometry.end - s.geometry.start).norm() == 10.0);
    CHECK(s.section.width == 0.3);
    CHECK(s.section.height == 0.4);
    CHECK(s.material.model == "svk");
    CHECK(s.material.E == 210e9);
    CHECK(s.material.nu == 0.3);
    REQUIRE(s.bcs.dirichlet.size() == 2);
    CHECK(s.bcs.dirichlet[0].angle(1.0) == doctest::Approx(-std::numbers::pi));
    CHECK(s.bcs.dirichlet[1].angle(1.0) == doctest::Approx(std::numbers::pi));
    CHECK(!s.bcs.dirichlet[1].phi[0]);
}

TEST_CASE("flying beam example parses to the expected setup") {
    const Scenario s = parse_scenario(load_document("ex5_flying_beam"));
    CHECK((s.geometry.end - s.geometry.start).norm() == 3.0);
    CHECK(s.section.width == 0.3);
    CHECK(s.section.height == 0.3);
    CHECK(s.section.density == 1.0);
    CHECK(s.material.E == 21e6);
    CHECK(s.initial_velocity.poly[0] == std::vector<double>{1, -1});
    CHECK(s.initial_velocity.poly[1] == std::vector<double>{24.5, -149, 150});
    CHECK(s.solver.scheme == "emc");
    CHECK(s.bcs.dirichlet.empty());
}

TEST_CASE("cases are applied as merge patches") {
    const Scenario d = parse_scenario(load_document("ex6_ring"));
    CHECK(d.case_name == "dynamic");
    CHECK(d.solver.scheme == "emc");
    CHECK(d.material.model == "svk");
    const Scenario st = parse_scenario(load_document("ex6_ring", "static"));
    CHECK(st.case_name == "static");
    CHECK(st.material.model == "neo-hookean");
    REQUIRE(st.bcs.end_loads.size() == 1);
    CHECK(st.bcs.end_loads[0].force[2] == doctest::Approx(5e4 * 0.12));
    CHECK_THROWS_AS(load_document("ex6_ring", "bogus"), ScenarioError);
    CHECK_THROWS_AS(load_document("ex5_flying_beam", "static"), ScenarioError);
    CHECK_THROWS_AS(load_document("/nonexistent/file.json"), ScenarioError);
}

TEST_CASE("parse, echo and parse is a fixed point") {
    for (const auto& e : catalog()) {
        const json once = scenario_to_json(parse_scenario(load_document(e.name)));
        const json twice = scenario_to_json(parse_scenario(once));
        CHECK(once == twice);
    }
}

TEST_CASE("validation errors name their location") {
    json doc = load_document("smoke_cantilever");
    SUBCASE("missing material") {
        doc.erase("material");
        CHECK(error_of(doc) == "material: required field missing");
    }
    SUBCASE("incompressible poisson ratio") {
        doc["material"]["nu"] = 0.5;
        CHECK(error_of(doc).rfind("material.nu:", 0) == 0);
    }
    SUBCASE("unknown field") {
        doc["section"]["depth"] = 1;
        CHECK(error_of(doc) == "section.depth: unknown field");
    }
    SUBCASE("wrong type deep in the tree") {
        doc["boundary"]["end_loads"][0]["force"][1] = "x";
        CHECK(error_of(doc) == "boundary.end_loads[0].force[1]: expected a number");
    }
    SUBCASE("non-monotone time curve") {
        doc["boundary"]["end_loads"][0]["scale"] = {{"t", {0, 0}}, {"v", {0, 1}}};
        CHECK(error_of(doc).rfind("boundary.end_loads[0].scale.t:", 0) == 0);
    }
    SUBCASE("bad scheme") {
        doc["solver"]["scheme"] = "rk4";
        CHECK(error_of(doc).rfind("solver.scheme:", 0) == 0);
    }
    SUBCASE("ring element count") {
        json r = load_document("ex4_ring_twist");
        r["geometry"]["elements"] = 10;
        CHECK(error_of(r).rfind("geometry.elements:", 0) == 0);
    }
    SUBCASE("director degree above geometry degree") {
        doc["geometry"]["director_degree"] = 5;
        CHECK(error_of(doc).rfind("geometry.director_degree:", 0) == 0);
    }
}

TEST_CASE("shortest round-trip number format") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(100.0) == "100");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("smoke run writes its manifest deterministically") {
    const Scenario s = parse_scenario(load_document("smoke_cantilever"));
    const fs::path a = scratch_dir("a"), b = scratch_dir("b");
    RunOptions oa, ob;
    oa.out_dir = a.string();
    ob.out_dir = b.string();
    oa.dump_matrix = oa.dump_eas_basis = true;
    ob.dump_matrix = ob.dump_eas_basis = true;
    const RunReport ra = run_scenario(s, oa);
    const RunReport rb = run_scenario(s, ob);
    REQUIRE(ra.success);
    REQUIRE(rb.success);
    CHECK(ra.log.size() == 4);
    CHECK(ra.final_state.t == 1.0);
    for (const auto& f : ra.manifest) {
        const fs::path rel = fs::path(f).lexically_relative(a);
        CHECK(fs::exists(f));
        if (rel.extension() == ".csv") CHECK(slurp(a / rel) == slurp(b / rel));
    }
    const std::string hist = slurp(a / "history.csv");
    CHECK(hist.rfind("step,t,dt,iterations,", 0) == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("free flight run keeps zero strain energy") {
    const Scenario s = parse_scenario(load_document("smoke_free_flight"));
    const fs::path out = scratch_dir("ff");
    RunOptions o;
    o.out_dir = out.string();
    const RunReport r = run_scenario(s, o);
    REQUIRE(r.success);
    CHECK(r.final_state.U < 1e-20);
    CHECK(r.final_state.L.norm() > 0.0);
    fs::remove_all(out);
}

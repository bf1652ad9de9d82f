#include "beam/catalog.hpp"
#include "beam/scenario.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInvalid = 2, kNonConvergence = 3, kIo = 4 };

using json = nlohmann::json;

struct Overrides {
    std::string scheme, mode, material, case_name;
    double dt = 0.0;
    int steps = 0, pd = 0;
};

json apply_overrides(json doc, const Overrides& o) {
    json patch = json::object();
    if (!o.scheme.empty()) patch["solver"]["scheme"] = o.scheme;
    if (o.dt > 0.0) patch["solver"]["dt"] = o.dt;
    if (o.steps > 0) patch["solver"]["steps"] = o.steps;
    if (!o.mode.empty()) patch["geometry"]["director_mode"] = o.mode;
    if (o.pd > 0) patch["geometry"]["director_degree"] = o.pd;
    if (!o.material.empty()) patch["material"]["model"] = o.material;
    doc.merge_patch(patch);
    return doc;
}

int list_examples(bool as_json) {
    if (as_json) {
        json arr = json::array();
        for (const auto& e : beam::catalog()) {
            json doc = json::parse(e.document);
            json cases = json::array();
            if (doc.contains("cases"))
                for (auto it = doc["cases"].begin(); it != doc["cases"].end(); ++it) cases.push_back(it.key());
            arr.push_back({{"name", e.name}, {"provenance", e.provenance}, {"summary", e.summary}, {"cases", cases}});
        }
        std::cout << arr.dump(2) << '\n';
        return kOk;
    }
    for (const auto& e : beam::catalog()) std::cout << e.name << "  [" << e.provenance << "]  " << e.summary << '\n';
    return kOk;
}

int validate(const std::string& target, const std::string& case_name) {
    const beam::Scenario s = beam::parse_scenario(beam::load_document(target, case_name));
    const beam::Model m = beam::build_model(s);
    beam::resolve_dirichlet(*m.disc, m.bcs);
    std::cout << beam::scenario_to_json(s).dump(2) << '\n';
    return kOk;
}

int run(const std::string& target, const Overrides& o, std::string out, bool eas, bool matrix, bool trace) {
    const beam::Scenario s = beam::parse_scenario(apply_overrides(beam::load_document(target, o.case_name), o));
    if (out.empty()) out = (std::filesystem::path("out") / (s.case_name.empty() ? s.name : s.name + "_" + s.case_name)).string();
    beam::RunOptions opt;
    opt.out_dir = out;
    opt.dump_eas_basis = eas;
    opt.dump_matrix = matrix;
    opt.trace = trace;
    const beam::RunReport rep = beam::run_scenario(s, opt);
    const auto& f = rep.final_state;
    std::cout << s.name << (s.case_name.empty() ? "" : " (" + s.case_name + ")") << ": " << rep.log.size()
              << " accepted steps, t = " << beam::format_double(f.t) << ", E = " << beam::format_double(f.E)
              << ", U = " << beam::format_double(f.U) << "\noutputs in " << out << '\n';
    if (!rep.success) {
        std::cerr << "error: " << rep.failure << '\n';
        return kNonConvergence;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed isogeometric Cosserat beam solver"};
    app.require_subcommand(1);

    std::string run_target, out_dir;
    Overrides ov;
    bool dump_eas = false, dump_matrix = false, trace = false;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario file or bundled example");
    run_cmd->add_option("scenario", run_target, "scenario.json or bundled example name")->required();
    run_cmd->add_option("--out", out_dir, "output directory (default out/<name>)");
    run_cmd->add_option("--scheme", ov.scheme, "time integrator")
        ->check(CLI::IsMember({"quasistatic", "emc", "midpoint", "trapezoidal"}));
    run_cmd->add_option("--dt", ov.dt, "step size")->check(CLI::PositiveNumber);
    run_cmd->add_option("--steps", ov.steps, "number of steps")->check(CLI::PositiveNumber);
    run_cmd->add_option("--mode", ov.mode, "initial director field")->check(CLI::IsMember({"D-disc", "D-cont"}));
    run_cmd->add_option("--pd", ov.pd, "director basis degree")->check(CLI::PositiveNumber);
    run_cmd->add_option("--material", ov.material, "material model")->check(CLI::IsMember({"svk", "neo-hookean"}));
    run_cmd->add_option("--case", ov.case_name, "named case of the scenario");
    run_cmd->add_flag("--dump-eas-basis", dump_eas, "write enhanced strain basis values");
    run_cmd->add_flag("--dump-matrix", dump_matrix, "write the final tangent as triplets");
    run_cmd->add_flag("--trace", trace, "print Newton residuals to stderr");

    std::string val_target, val_case;
    auto* val_cmd = app.add_subcommand("validate", "Parse and check a scenario, echo it with defaults");
    val_cmd->add_option("file", val_target, "scenario.json or bundled example name")->required();
    val_cmd->add_option("--case", val_case, "named case of the scenario");

    bool as_json = false;
    auto* list_cmd = app.add_subcommand("list-examples", "List bundled examples");
    list_cmd->add_flag("--json", as_json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*list_cmd) return list_examples(as_json);
        if (*val_cmd) return validate(val_target, val_case);
        return run(run_target, ov, out_dir, dump_eas, dump_matrix, trace);
    } catch (const beam::ScenarioError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kInvalid;
    } catch (const beam::GeometryError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kInvalid;
    } catch (const beam::DomainError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kInvalid;
    } catch (const beam::ConfigError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
}

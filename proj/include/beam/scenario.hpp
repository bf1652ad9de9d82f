#pragma once

#include "beam/integrators.hpp"

#include "json.hpp"

#include <memory>
#include <string>
#include <vector>

namespace beam {

// Validation failure; the message starts with the offending document path.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometrySpec {
    std::string kind = "straight";  // straight | arc | ring | nurbs
    int degree = 2;
    int elements = 4;
    // straight
    Vec3 start = Vec3::Zero(), end = Vec3::UnitX();
    // arc and ring, in the plane spanned by (u, v) around center
    Vec3 center = Vec3::Zero(), u = Vec3::UnitX(), v = Vec3::UnitY();
    double radius = 1.0, start_angle = 0.0, sweep = 0.0, slot_angle = 0.0;
    // explicit nurbs; refined by splitting every span into `refine` pieces
    std::vector<double> knots;
    std::vector<Vec3> control_points;
    std::vector<double> weights;
    int refine = 1;
    // directors
    int director_degree = 0;  // 0 means equal to degree
    std::string frame = "smallest-rotation";
    Vec3 seed = Vec3::UnitZ();
    std::string director_mode = "D-disc";
};

struct SectionSpec {
    double width = 1.0, height = 1.0, density = 1.0;
    EASDegrees eas;
    bool assume_orthonormal_frame = false;
};

struct MaterialSpec {
    std::string model = "svk";  // svk | neo-hookean
    double E = 1.0, nu = 0.0;
};

// Center-axis velocity as polynomials in x = s / L, coefficients by ascending power.
struct VelocitySpec {
    std::array<std::vector<double>, 3> poly;
    bool empty() const { return poly[0].empty() && poly[1].empty() && poly[2].empty(); }
};

struct SolverSpec {
    std::string scheme = "quasistatic";  // quasistatic | emc | midpoint | trapezoidal
    double dt = 1.0;
    int steps = 1;
    NewtonSettings newton;
};

struct OutputSpec {
    std::vector<double> snapshot_times;
    int samples_per_element = 4;
};

struct Scenario {
    std::string name = "unnamed";
    std::string description;
    std::string provenance;
    std::string case_name;
    GeometrySpec geometry;
    SectionSpec section;
    MaterialSpec material;
    BoundaryConditions bcs;
    VelocitySpec initial_velocity;
    SolverSpec solver;
    OutputSpec output;
};

Scenario parse_scenario(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& s);

// Reads a bundled example by name or a JSON file by path, then applies the
// selected case (or the document's default case) as a merge patch.
nlohmann::json load_document(const std::string& name_or_path, const std::string& case_name = "");

Scheme parse_scheme(const std::string& s);
std::string scheme_name(Scheme s);

struct Model {
    std::unique_ptr<Discretization> disc;
    BoundaryConditions bcs;
    Scheme scheme = Scheme::QuasiStatic;
    Eigen::VectorXd V0;  // empty when the body starts at rest
};

NurbsCurve build_curve(const GeometrySpec& g);
Model build_model(const Scenario& s);

struct RunOptions {
    std::string out_dir = "out";
    bool dump_eas_basis = false;
    bool dump_matrix = false;
    bool trace = false;
};

struct StepLog {
    int step = 0;
    double t = 0.0, dt = 0.0;
    int iterations = 0;
};

struct RunReport {
    bool success = false;
    std::string failure;
    double wall_seconds = 0.0;
    std::vector<StepLog> log;
    DiagnosticsRecord final_state;
    std::vector<std::string> manifest;
    nlohmann::json to_json(const Scenario& s) const;
};

// Writes all outputs into opt.out_dir. Non-convergence is reported through
// the returned report after partial outputs are flushed.
RunReport run_scenario(const Scenario& s, const RunOptions& opt);

// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace beam

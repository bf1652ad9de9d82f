#pragma once

#include "beam/mixedfem.hpp"

#include <functional>
#include <memory>
#include <tuple>
#include <string>

namespace beam {

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NewtonSettings {
    double tol_rel = 1e-10;
    double tol_abs = 1e-12;
    int max_iter = 30;
    int polish = 1;        // extra Newton updates once the tolerance is met
    int max_halvings = 8;  // smallest substep is dt / 2^max_halvings
    bool trace = false;    // per-iteration block residuals on stderr
};

struct DiagnosticsRecord {
    double t = 0.0, dt = 0.0;
    Vec3 L = Vec3::Zero(), J = Vec3::Zero();
    double K = 0.0, U = 0.0, W = 0.0, E = 0.0, Estar = 0.0;
    int iterations = 0;
};

struct ReactionRecord {
    std::string label;
    Vec3 force = Vec3::Zero();
    Vec3 moment = Vec3::Zero();  // sum of d_alpha x f_dalpha
    double axial_moment = 0.0;   // moment projected on the condition's rotation axis
};

struct StepInfo {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    std::string failure;
};

DiagnosticsRecord diagnostics(const Discretization& d, const BoundaryConditions& bc, const GlobalState& s, double t);
double strain_energy(const Discretization& d, const GlobalState& s);
std::vector<double> energy_consistency_check(const std::vector<DiagnosticsRecord>& history);

// Velocity coefficients from a nodal velocity profile by Greville collocation
// of the center-axis velocity; director velocities are zero.
Eigen::VectorXd project_velocity(const Discretization& d, const std::function<Vec3(double s)>& v_phi);

class Solver {
public:
    Solver(const Discretization& d, BoundaryConditions bc, Scheme scheme, NewtonSettings ns = {});

    const Discretization& discretization() const { return d_; }
    const BoundaryConditions& bcs() const { return bc_; }
    const GlobalState& state() const { return state_; }
    double time() const { return t_; }
    Scheme scheme() const { return scheme_; }

    void set_velocity(const Eigen::VectorXd& V);

    // Single attempt without substepping; state is unchanged on failure.
    StepInfo try_step(double dt);
    // Advances by dt with halving on failure; returns accepted substep records.
    std::vector<DiagnosticsRecord> advance(double dt);
    std::vector<DiagnosticsRecord> advance_to(double t_end);

    DiagnosticsRecord current_diagnostics() const;
    std::vector<ReactionRecord> reactions() const;
    // Last converged reduced tangent as (row, col, value) in global dof numbering.
    std::vector<std::tuple<int, int, double>> tangent_triplets() const;
    int last_iterations() const { return last_iters_; }

private:
    const Discretization& d_;
    BoundaryConditions bc_;
    Scheme scheme_;
    NewtonSettings ns_;
    ResolvedDirichlet dir_;
    std::unique_ptr<SystemLayout> layout_;
    GlobalState state_;
    double t_ = 0.0;
    double Estar_ = 0.0;
    Eigen::VectorXd last_R_;
    BandedMatrix last_K_;
    int last_iters_ = 0;

    void init_acceleration();
    StepInfo step_to(double t1);
};

}  // namespace beam

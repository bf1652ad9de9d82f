#pragma once

#include "beam/banded.hpp"
#include "beam/kinematics.hpp"
#include "beam/material.hpp"
#include "beam/section.hpp"

#include <optional>
#include <string>

namespace beam {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EASDegrees {
    int m1 = 2, m2 = 2, m3 = 0, m4 = 4;
};

struct SectionOptions {
    CrossSection cs;
    EASDegrees eas;
    bool assume_orthonormal_frame = false;
};

// Piecewise-linear curve in time, constant outside its table.
struct TimeCurve {
    std::vector<double> t{0.0};
    std::vector<double> v{0.0};
    double operator()(double time) const;
    static TimeCurve constant(double c) { return {{0.0}, {c}}; }
    static TimeCurve linear(double t0, double v0, double t1, double v1) { return {{t0, t1}, {v0, v1}}; }
};

struct DirichletCondition {
    std::string label;
    double xi = 0.0;  // must sit on an interpolatory control point
    std::array<bool, 3> phi{true, true, true};
    bool directors = true;
    Vec3 axis = Vec3::UnitX();
    TimeCurve angle = TimeCurve::constant(0.0);
    Vec3 translation = Vec3::Zero();
    TimeCurve translation_scale = TimeCurve::constant(0.0);
    std::optional<Vec3> center;  // rotation center, defaults to the point itself
};

struct EndLoad {
    double xi = 1.0;
    Vec3 force = Vec3::Zero();
    Vec3 couple1 = Vec3::Zero(), couple2 = Vec3::Zero();
    TimeCurve scale = TimeCurve::constant(1.0);
};

struct DistributedLoad {
    Vec3 force = Vec3::Zero();  // per unit undeformed length
    TimeCurve scale = TimeCurve::constant(1.0);
};

struct BoundaryConditions {
    std::vector<DirichletCondition> dirichlet;
    std::vector<EndLoad> end_loads;
    std::vector<DistributedLoad> distributed;
};

enum class Scheme { QuasiStatic, EMC, Midpoint, Trapezoidal };

struct GlobalState {
    Eigen::VectorXd y, r, e, V, A;
    Eigen::MatrixXd alpha;  // d_a x n_el
};

struct QPData {
    double xi = 0.0, ds = 0.0;
    PointOperator op;
    Vec15 f_ref = Vec15::Zero();
    int field_first = 0;
    Eigen::VectorXd Np;
    InertiaProps inertia;
    Eigen::Matrix<double, 9, Eigen::Dynamic> Ne;  // (phi, d1, d2) = Ne * y_local
    std::vector<Eigen::MatrixXd> H;  // per section point, 6 x (15 + d_a), cartesian
    std::vector<double> sw;          // section weight times j0
    Eigen::MatrixXd D;               // cached quadratic form for SVK
};

struct ElementData {
    double xa = 0.0, xb = 0.0;
    std::vector<QPData> qp;
    std::vector<int> ydofs;  // global indices of the local y layout
    int field_first = 0, n_field = 0;
    Eigen::MatrixXd mass;
    int my() const { return static_cast<int>(ydofs.size()); }
    int mf() const { return 15 * n_field; }
};

struct LineDensity {
    double psi = 0.0;
    Eigen::VectorXd grad;  // [d psi / d eps (15); d psi / d alpha (d_a)]
    Eigen::MatrixXd hess;
};

struct ConstitutiveBlocks {
    Mat15 Cee;
    Eigen::MatrixXd Cae, Caa;
};

class Discretization {
public:
    Discretization(InitialGeometry geom, SectionOptions sec, MaterialLaw mat);

    const InitialGeometry& geometry() const { return geom_; }
    const SectionOptions& section() const { return sec_; }
    const MaterialLaw& material() const { return mat_; }
    const EASBasisSet& eas() const { return eas_; }
    const SplineSpace& field_space() const { return field_; }
    const QuadratureRule2D& section_rule() const { return rule_; }
    const std::vector<ElementData>& elements() const { return elems_; }

    int n_el() const { return static_cast<int>(elems_.size()); }
    int d_a() const { return eas_.d_a; }
    int ny() const { return ny_; }
    int n_field() const { return field_.size(); }
    int nr() const { return 15 * field_.size(); }
    int n_total() const { return ny_ + 2 * nr(); }
    bool interleaved() const { return interleaved_; }

    int phi_dof(int I, int c) const;
    int dir_dof(int I, int alpha, int c) const;  // alpha in {0, 1}
    int r_dof(int J, int k) const { return ny_ + 15 * J + k; }
    int e_dof(int J, int k) const { return ny_ + nr() + 15 * J + k; }

    Eigen::VectorXd pack(const Configuration& cfg) const;
    Configuration unpack(const Eigen::VectorXd& y) const;
    GlobalState initial_state() const;

    // Support midpoint in parameter space, used for bandwidth ordering.
    double dof_key(int gdof) const;

    double force_scale() const { return mat_.E * sec_.cs.area(); }
    double length_scale() const { return geom_.length; }

    Eigen::MatrixXd global_mass() const;

private:
    InitialGeometry geom_;
    SectionOptions sec_;
    MaterialLaw mat_;
    EASBasisSet eas_;
    SplineSpace field_;
    QuadratureRule2D rule_;
    std::vector<ElementData> elems_;
    int ny_ = 0;
    bool interleaved_ = false;
};

LineDensity line_density(const Discretization& d, const QPData& qp, const Vec15& eps_p, const Eigen::VectorXd& alpha,
                         bool with_hessian);
ConstitutiveBlocks constitutive_blocks(const Discretization& d, const QPData& qp, const Vec15& eps_p,
                                       const Eigen::VectorXd& alpha);

// Element-local layout: [y (my) | r (mf) | e (mf) | alpha (d_a)].
struct ElementSystem {
    Eigen::MatrixXd K;
    Eigen::VectorXd R;
    Eigen::VectorXd Rmag;  // magnitude of summed terms, for relative convergence
};

struct StepInput {
    Scheme scheme = Scheme::QuasiStatic;
    double dt = 1.0;
    const GlobalState* prev = nullptr;  // converged state at t_n
    const GlobalState* cur = nullptr;   // iterate at t_{n+1}
};

double eval_weight(Scheme s);
ElementSystem element_system(const Discretization& d, int e, const StepInput& in);

struct CondensedElement {
    std::vector<int> dofs;  // global: ydofs, r dofs, e dofs
    Eigen::MatrixXd K;
    Eigen::VectorXd R, Rmag;
    Eigen::MatrixXd KaaInvKax;  // d_a x m
    Eigen::VectorXd KaaInvRa;
};

CondensedElement condense_alpha(const Discretization& d, int e, const ElementSystem& sys);
// Delta alpha = -Kaa^{-1} (Ra + Kax dx)
Eigen::VectorXd recover_alpha(const CondensedElement& ce, const Eigen::VectorXd& dx_local);
std::vector<int> element_dofs(const Discretization& d, int e);

Eigen::VectorXd external_load(const Discretization& d, const BoundaryConditions& bc, double t);

// Dirichlet data resolved to global y dofs.
struct ResolvedDirichlet {
    std::vector<int> dofs;
    std::vector<int> owner;  // condition index for each dof
    struct Point {
        int phi_cp = -1, dir_cp = -1;
    };
    std::vector<Point> points;
    Eigen::VectorXd values(const Discretization& d, const BoundaryConditions& bc, double t) const;
};
ResolvedDirichlet resolve_dirichlet(const Discretization& d, const BoundaryConditions& bc);
int interpolatory_index(const SplineSpace& s, double xi);

// Reduced, bandwidth-ordered system layout.
class SystemLayout {
public:
    SystemLayout(const Discretization& d, const std::vector<int>& constrained);
    int n() const { return static_cast<int>(pos_to_dof_.size()); }
    int pos(int gdof) const { return dof_to_pos_[gdof]; }  // -1 when constrained
    int dof(int p) const { return pos_to_dof_[p]; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

private:
    std::vector<int> dof_to_pos_, pos_to_dof_;
    int kl_ = 0, ku_ = 0;
};

struct AssembledSystem {
    BandedMatrix K;        // reduced and permuted
    Eigen::VectorXd R;     // full length, unreduced (y rows without F_ext)
    Eigen::VectorXd Rmag;
    std::vector<CondensedElement> elems;
};

int configured_threads();

// Element loop in parallel; assembly reduction is serial and ordered.
AssembledSystem assemble(const Discretization& d, const SystemLayout& layout, const StepInput& in);
// Serial reference path writing the unreduced dense tangent.
Eigen::MatrixXd assemble_dense_reference(const Discretization& d, const StepInput& in, Eigen::VectorXd& R);

Eigen::VectorXd internal_force(const Discretization& d, const GlobalState& s);

}  // namespace beam

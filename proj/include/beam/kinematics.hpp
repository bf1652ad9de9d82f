#pragma once

#include "beam/splines.hpp"

#include <array>
#include <memory>

namespace beam {

using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;

enum class FrameMethod { SmallestRotation, Frenet };
enum class DirectorMode { Discrete, Continuous };

// Continuous director field along the initial curve.
class DirectorField {
public:
    DirectorField(NurbsCurve curve, FrameMethod method, const Vec3& seed_d2, int samples_per_span = 64);

    // {D1, D2, D1_s, D2_s}
    std::array<Vec3, 4> eval(double xi) const;
    FrameMethod method() const { return method_; }

private:
    NurbsCurve curve_;
    FrameMethod method_;
    std::vector<double> xs_;
    std::vector<Vec3> pos_, tan_, d1_;
};

std::shared_ptr<DirectorField> generate_frame(const NurbsCurve& curve, FrameMethod method,
                                              const Vec3& seed_d2 = Vec3::UnitZ());

// Greville collocation of the continuous field onto `space`; returns {D1 coeffs, D2 coeffs}.
std::array<std::vector<Vec3>, 2> project_initial_directors(const DirectorField& field, const SplineSpace& space);

struct InitialGeometry {
    NurbsCurve curve;
    SplineSpace phi_space;
    SplineSpace dir_space;
    std::vector<Vec3> D1, D2;
    DirectorMode mode = DirectorMode::Discrete;
    std::shared_ptr<DirectorField> field;
    double length = 0.0;
};

InitialGeometry make_initial_geometry(const NurbsCurve& curve, int p_d, FrameMethod method, const Vec3& seed_d2,
                                      DirectorMode mode);

struct Configuration {
    std::vector<Vec3> phi, d1, d2;
};

Configuration initial_configuration(const InitialGeometry& g);
Configuration rigid_transform(const Configuration& cfg, const Mat3& Lambda, const Vec3& c);

struct ConfigPoint {
    Vec3 phi, phi_s, d1, d2, d1_s, d2_s;
};

// Local operator at one parameter: q = q_off + Q * y_local with
// q = [phi_s, d1, d2, d1_s, d2_s] and y_local = [phi_I..., (d1_J, d2_J)...].
struct PointOperator {
    double xi = 0.0;
    double jt = 1.0;  // arc-length jacobian of the initial curve
    int phi_first = 0, n_phi = 0;
    int dir_first = 0, n_dir = 0;
    Eigen::VectorXd Nphi, Nphi_s, Nd, Nd_s;
    Eigen::MatrixXd Q;
    Vec15 q_off = Vec15::Zero();
    int size() const { return 3 * n_phi + 6 * n_dir; }
};

PointOperator point_operator(const InitialGeometry& g, double xi);
Eigen::VectorXd gather_local(const Configuration& cfg, const PointOperator& op);
Vec3 eval_phi(const Configuration& cfg, const PointOperator& op);

ConfigPoint eval_config(const Configuration& cfg, const InitialGeometry& g, double xi);

// Strain functional on q (without reference subtraction).
Vec15 strain_functional(const Vec15& q);
Mat15 strain_jacobian(const Vec15& q);
Mat15 strain_hessian_contract(const Vec15& r);

Vec15 beam_strain(const Configuration& cfg, const InitialGeometry& g, double xi);
Eigen::MatrixXd b_operator(const Configuration& cfg, const InitialGeometry& g, double xi);
Eigen::MatrixXd geometric_stiffness(const Vec15& r, const PointOperator& op);

// Reference base vectors at (xi, z1, z2) and curvatures kappa_alpha = phi0_ss . D_alpha.
struct ReferencePoint {
    Vec3 phi0_s, phi0_ss, D1, D2, D1_s, D2_s;
    Eigen::Vector2d kappa;
};
ReferencePoint reference_point(const InitialGeometry& g, double xi);

Mat3 rotation_matrix(const Vec3& axis, double angle);

}  // namespace beam

#pragma once

#include "beam/splines.hpp"

namespace beam {

using Voigt6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

enum class MaterialKind { SVK, NeoHookean };

struct DeformationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MaterialLaw {
    MaterialKind kind = MaterialKind::SVK;
    double E = 1.0;
    double nu = 0.0;
    double lambda = 0.0;
    double mu = 0.5;

    static MaterialLaw make(MaterialKind kind, double E, double nu);
};

// Strain Voigt carries doubled shears, stress Voigt plain shears.
double energy(const MaterialLaw& law, const Voigt6& E);
Voigt6 stress(const MaterialLaw& law, const Voigt6& E);
Mat6 tangent(const MaterialLaw& law, const Voigt6& E);

struct MaterialResponse {
    double psi = 0.0;
    Voigt6 S = Voigt6::Zero();
    Mat6 C = Mat6::Zero();
};
MaterialResponse evaluate(const MaterialLaw& law, const Voigt6& E, bool with_tangent);

Mat3 voigt_to_tensor_strain(const Voigt6& E);
Voigt6 tensor_to_voigt_strain(const Mat3& E);

struct MetricFrame {
    Mat3 G;      // columns: covariant G1, G2, G3
    Mat3 Gcon;   // columns: contravariant G^1, G^2, G^3
    Mat3 triad;  // columns: local orthonormal e1, e2, e3
    double j0 = 1.0;
    Mat6 T;      // E_cart = T * E_cov (strain Voigt)
    Mat6 Tinv;
};

MetricFrame metric_frame(const Vec3& G1, const Vec3& G2, const Vec3& G3);
Voigt6 pull_to_cartesian(const MetricFrame& f, const Voigt6& E_cov);
Voigt6 push_to_covariant(const MetricFrame& f, const Voigt6& E_cart);

}  // namespace beam

#include "beam/material.hpp"

#include <cmath>

namespace beam {

namespace {
constexpr int kVi[6] = {0, 1, 2, 0, 0, 1};
constexpr int kVj[6] = {0, 1, 2, 1, 2, 2};
}  // namespace

MaterialLaw MaterialLaw::make(MaterialKind kind, double E, double nu) {
    if (!(E > 0.0)) throw DomainError("material: E must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw DomainError("material: nu must lie in (-1, 0.5)");
    MaterialLaw m;
    m.kind = kind;
    m.E = E;
    m.nu = nu;
    m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    m.mu = E / (2.0 * (1.0 + nu));
    return m;
}

Mat3 voigt_to_tensor_strain(const Voigt6& E) {
    Mat3 t;
    t << E[0], 0.5 * E[3], 0.5 * E[4], 0.5 * E[3], E[1], 0.5 * E[5], 0.5 * E[4], 0.5 * E[5], E[2];
    return t;
}

Voigt6 tensor_to_voigt_strain(const Mat3& E) {
    Voigt6 v;
    v << E(0, 0), E(1, 1), E(2, 2), E(0, 1) + E(1, 0), E(0, 2) + E(2, 0), E(1, 2) + E(2, 1);
    return v;
}

MaterialResponse evaluate(const MaterialLaw& law, const Voigt6& Ev, bool with_tangent) {
    MaterialResponse r;
    if (law.kind == MaterialKind::SVK) {
        const Mat3 E = voigt_to_tensor_strain(Ev);
        const double tr = E.trace();
        r.psi = 0.5 * law.lambda * tr * tr + law.mu * E.squaredNorm();
        const Mat3 S = law.lambda * tr * Mat3::Identity() + 2.0 * law.mu * E;
        for (int I = 0; I < 6; ++I) r.S[I] = S(kVi[I], kVj[I]);
        if (with_tangent) {
            r.C.setZero();
            r.C.topLeftCorner<3, 3>().setConstant(law.lambda);
            for (int i = 0; i < 3; ++i) {
                r.C(i, i) += 2.0 * law.mu;
                r.C(i + 3, i + 3) = law.mu;
            }
        }
        return r;
    }
    const Mat3 C = Mat3::Identity() + 2.0 * voigt_to_tensor_strain(Ev);
    const double det = C.determinant();
    if (!(det > 0.0)) throw DeformationError("neo-hookean: det C <= 0");
    const Mat3 Ci = C.inverse();
    const double lnJ = 0.5 * std::log(det);
    r.psi = 0.5 * law.mu * (C.trace() - 3.0) - law.mu * lnJ + 0.5 * law.lambda * lnJ * lnJ;
    const Mat3 S = law.mu * (Mat3::Identity() - Ci) + law.lambda * lnJ * Ci;
    for (int I = 0; I < 6; ++I) r.S[I] = S(kVi[I], kVj[I]);
    if (with_tangent) {
        const double c2 = law.mu - law.lambda * lnJ;
        for (int I = 0; I < 6; ++I)
            for (int J = 0; J < 6; ++J) {
                const int i = kVi[I], j = kVj[I], k = kVi[J], l = kVj[J];
                r.C(I, J) = law.lambda * Ci(i, j) * Ci(k, l) + c2 * (Ci(i, k) * Ci(j, l) + Ci(i, l) * Ci(j, k));
            }
    }
    return r;
}

double energy(const MaterialLaw& law, const Voigt6& E) { return evaluate(law, E, false).psi; }
Voigt6 stress(const MaterialLaw& law, const Voigt6& E) { return evaluate(law, E, false).S; }
Mat6 tangent(const MaterialLaw& law, const Voigt6& E) { return evaluate(law, E, true).C; }

MetricFrame metric_frame(const Vec3& G1, const Vec3& G2, const Vec3& G3) {
    MetricFrame f;
    f.G.col(0) = G1;
    f.G.col(1) = G2;
    f.G.col(2) = G3;
    f.j0 = f.G.determinant();
    if (!(f.j0 > 0.0)) throw GeometryError("degenerate metric frame (det <= 0)");
    f.Gcon = f.G.inverse().transpose();
    const Vec3 e3 = G3.normalized();
    Vec3 e1 = G1 - G1.dot(e3) * e3;
    if (!(e1.norm() > 0.0)) throw GeometryError("degenerate metric frame (G1 parallel to G3)");
    e1.normalize();
    f.triad.col(0) = e1;
    f.triad.col(1) = e3.cross(e1);
    f.triad.col(2) = e3;
    const Mat3 Q = f.triad.transpose() * f.Gcon;  // Q(k,i) = G^i . e_k
    for (int J = 0; J < 6; ++J) {
        Voigt6 u = Voigt6::Zero();
        u[J] = 1.0;
        f.T.col(J) = tensor_to_voigt_strain(Q * voigt_to_tensor_strain(u) * Q.transpose());
    }
    f.Tinv = f.T.inverse();
    return f;
}

Voigt6 pull_to_cartesian(const MetricFrame& f, const Voigt6& E_cov) { return f.T * E_cov; }
Voigt6 push_to_covariant(const MetricFrame& f, const Voigt6& E_cart) { return f.Tinv * E_cart; }

}  // namespace beam

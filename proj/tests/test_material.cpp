#include "beam/material.hpp"

#include "doctest.h"

#include <cmath>

using namespace beam;

namespace {

Voigt6 sample_strain(double s) {
    Voigt6 E;
    E << 0.03, -0.02, 0.05, 0.012, -0.007, 0.004;
    return s * E;
}

void check_derivatives(const MaterialLaw& law, const Voigt6& E) {
    const MaterialResponse r = evaluate(law, E, true);
    const double h = 1e-7;
    Mat6 Cfd;
    for (int j = 0; j < 6; ++j) {
        Voigt6 Ep = E, Em = E;
        Ep[j] += h;
        Em[j] -= h;
        // doubled shear strains pair with plain shear stresses
        CHECK(r.S[j] == doctest::Approx((energy(law, Ep) - energy(law, Em)) / (2 * h)).epsilon(1e-6));
        Cfd.col(j) = (stress(law, Ep) - stress(law, Em)) / (2 * h);
    }
    CHECK((Cfd - r.C).norm() <= 1e-6 * r.C.norm());
    CHECK(r.C.isApprox(r.C.transpose(), 1e-12));
}

}  // namespace

TEST_CASE("lame parameters") {
    const MaterialLaw m = MaterialLaw::make(MaterialKind::SVK, 210e9, 0.3);
    CHECK(m.mu == doctest::Approx(210e9 / 2.6));
    CHECK(m.lambda == doctest::Approx(210e9 * 0.3 / (1.3 * 0.4)));
    CHECK_THROWS_AS(MaterialLaw::make(MaterialKind::SVK, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(MaterialLaw::make(MaterialKind::SVK, -1.0, 0.2), DomainError);
}

TEST_CASE("svk energy for uniaxial strain") {
    const MaterialLaw m = MaterialLaw::make(MaterialKind::SVK, 1.0, 0.0);
    Voigt6 E = Voigt6::Zero();
    E[2] = 0.2;
    CHECK(energy(m, E) == doctest::Approx(0.02).epsilon(1e-15));
    E.setZero();
    E[3] = 0.2;  // engineering shear
    CHECK(energy(m, E) == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("svk stress and tangent match differences") {
    const MaterialLaw m = MaterialLaw::make(MaterialKind::SVK, 21e6, 0.3);
    check_derivatives(m, sample_strain(1.0));
    const Mat6 C0 = tangent(m, Voigt6::Zero());
    CHECK((C0 - tangent(m, sample_strain(3.0))).norm() == 0.0);
}

TEST_CASE("neo-hookean stress and tangent match differences") {
    const MaterialLaw m = MaterialLaw::make(MaterialKind::NeoHookean, 1.12e7, 0.4);
    check_derivatives(m, sample_strain(1.0));
    check_derivatives(m, sample_strain(4.0));
}

TEST_CASE("neo-hookean linearizes to svk") {
    const MaterialLaw nh = MaterialLaw::make(MaterialKind::NeoHookean, 5.0, 0.25);
    const MaterialLaw sv = MaterialLaw::make(MaterialKind::SVK, 5.0, 0.25);
    CHECK(std::abs(energy(nh, Voigt6::Zero())) < 1e-15);
    CHECK(stress(nh, Voigt6::Zero()).norm() < 1e-14);
    CHECK((tangent(nh, Voigt6::Zero()) - tangent(sv, Voigt6::Zero())).norm() < 1e-12);
}

TEST_CASE("neo-hookean rejects inverted deformations") {
    const MaterialLaw m = MaterialLaw::make(MaterialKind::NeoHookean, 1.0, 0.3);
    Voigt6 E = Voigt6::Zero();
    E[0] = -0.6;  // C11 = -0.2
    CHECK_THROWS_AS(energy(m, E), DeformationError);
}

TEST_CASE("voigt conversions round trip") {
    const Voigt6 E = sample_strain(1.0);
    CHECK((tensor_to_voigt_strain(voigt_to_tensor_strain(E)) - E).norm() < 1e-16);
    CHECK(voigt_to_tensor_strain(E)(0, 1) == doctest::Approx(0.006));
}

TEST_CASE("metric frame transforms strains consistently") {
    const Vec3 G1(1, 0, 0), G2(0.1, 1, 0), G3(0.2, -0.1, 1.3);
    const MetricFrame f = metric_frame(G1, G2, G3);
    CHECK(f.j0 == doctest::Approx(G1.dot(G2.cross(G3))));
    CHECK((f.triad.transpose() * f.triad - Mat3::Identity()).norm() < 1e-14);
    CHECK((f.G.transpose() * f.Gcon - Mat3::Identity()).norm() < 1e-14);
    const Voigt6 Ec = sample_strain(1.0);
    CHECK((push_to_covariant(f, pull_to_cartesian(f, Ec)) - Ec).norm() < 1e-15);
    // E_cart = sum E_ij G^i (x) G^j in the triad
    const Mat3 Et = voigt_to_tensor_strain(Ec);
    Mat3 direct = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) direct += Et(i, j) * (f.triad.transpose() * f.Gcon.col(i)) * (f.triad.transpose() * f.Gcon.col(j)).transpose();
    CHECK((voigt_to_tensor_strain(pull_to_cartesian(f, Ec)) - direct).norm() < 1e-14);
    CHECK_THROWS_AS(metric_frame(G1, G1, G3), GeometryError);
}

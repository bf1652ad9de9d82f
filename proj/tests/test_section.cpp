#include "beam/section.hpp"

#include "doctest.h"

#include <cmath>

using namespace beam;

TEST_CASE("gauss rule reproduces monomial integrals") {
    const CrossSection cs{0.3, 0.4, 1.0};
    const QuadratureRule2D q = gauss_rule(cs, 4, 4);
    const Eigen::MatrixXd M = monomial_integrals(cs, 6);
    for (int n = 0; n <= 6; ++n)
        for (int m = 0; m + n <= 6; ++m) {
            double s = 0;
            for (size_t i = 0; i < q.size(); ++i) s += q.weight[i] * std::pow(q.z1[i], n) * std::pow(q.z2[i], m);
            CHECK(std::abs(s - M(n, m)) < 1e-16);
        }
    CHECK(M(0, 0) == doctest::Approx(0.12).epsilon(1e-14));
    CHECK(M(2, 0) == doctest::Approx(9e-4).epsilon(1e-14));
    CHECK(M(0, 2) == doctest::Approx(1.6e-3).epsilon(1e-14));
}

TEST_CASE("monomial indexing is graded lex") {
    CHECK(monomial_index(0, 0) == 0);
    CHECK(monomial_index(1, 0) == 1);
    CHECK(monomial_index(0, 1) == 2);
    CHECK(monomial_index(2, 0) == 3);
    CHECK(monomial_index(0, 2) == 5);
    CHECK(monomial_count(4) == 15);
}

TEST_CASE("roark torsion constants") {
    CHECK(roark_torsion_K({0.3, 0.4, 1.0}) == doctest::Approx(1.9439e-3).epsilon(1e-4));
    CHECK(roark_torsion_K({1.0 / 3.0, 1.0, 1.0}) == doctest::Approx(9.753e-3).epsilon(1e-3));
    CHECK(roark_torsion_K({0.4, 0.3, 1.0}) == roark_torsion_K({0.3, 0.4, 1.0}));
}

TEST_CASE("eas dimensions for the default degrees") {
    const EASBasisSet b = build_eas_basis({0.3, 0.4, 1.0}, 2, 2, 0, 4);
    CHECK(b.family[0].dim == 5);
    CHECK(b.family[1].dim == 5);
    CHECK(b.family[2].dim == 0);
    CHECK(b.family[3].dim == 12);
    CHECK(b.d_a == 27);
    CHECK(b.max_degree() == 4);
    const EASBasisSet off = build_eas_basis({0.3, 0.4, 1.0}, 0, 0, 2, 1);
    CHECK(off.d_a == 0);
    CHECK(build_eas_basis({0.3, 0.4, 1.0}, 2, 2, 4, 4).family[2].dim == 9);
}

TEST_CASE("eas members are orthogonal to the compatible monomials") {
    const CrossSection cs{0.3, 0.4, 1.0};
    const EASBasisSet b = build_eas_basis(cs, 3, 3, 4, 5);
    const QuadratureRule2D q = gauss_rule(cs, 8, 8);
    for (int i = 0; i < 4; ++i) {
        const EASFamily& f = b.family[i];
        double scale = 0, worst = 0;
        for (int a = 0; a <= f.mbar; ++a)
            for (int c = 0; a + c <= f.mbar; ++c) {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.dim), mag = Eigen::VectorXd::Zero(f.dim);
                Eigen::VectorXd v, d1, d2;
                for (size_t k = 0; k < q.size(); ++k) {
                    b.eval_family(i, q.z1[k], q.z2[k], v, d1, d2);
                    const double mono = std::pow(q.z1[k], a) * std::pow(q.z2[k], c);
                    acc += q.weight[k] * mono * v;
                    mag += q.weight[k] * (mono * v).cwiseAbs();
                }
                worst = std::max(worst, acc.cwiseAbs().maxCoeff());
                scale = std::max(scale, mag.maxCoeff());
            }
        CHECK(worst <= 1e-12 * scale);
    }
}

TEST_CASE("gamma places each family in its strain row") {
    const EASBasisSet b = build_eas_basis({0.3, 0.4, 1.0}, 2, 2, 0, 4);
    const Eigen::MatrixXd G = eval_gamma(b, 0.05, -0.1);
    CHECK(G.rows() == 6);
    CHECK(G.cols() == 27);
    CHECK(G.row(2).norm() == 0.0);
    CHECK(G.block(0, 0, 1, 5).isApprox(G.block(1, 5, 1, 5)));
}

TEST_CASE("strain map A has the expected axial row") {
    const Mat6x15 A = eval_A(0.2, -0.3);
    CHECK(A(2, 0) == 1.0);
    CHECK(A(2, 3) == doctest::Approx(0.04));
    CHECK(A(2, 5) == doctest::Approx(-0.06));
    CHECK(A(0, 12) == 1.0);
    CHECK(A(3, 14) == 1.0);
}

TEST_CASE("inertia of a straight section") {
    const CrossSection cs{0.3, 0.4, 2.0};
    const InertiaProps p = inertia_properties(cs, Eigen::Vector2d::Zero());
    CHECK(p.rhoA == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(std::abs(p.I1) < 1e-16);
    CHECK(p.I11 == doctest::Approx(2.0 * 0.027 * 0.4 / 12).epsilon(1e-13));
    CHECK(p.I22 == doctest::Approx(2.0 * 0.3 * 0.064 / 12).epsilon(1e-13));
    // curvature shifts the mass toward the inner side
    const InertiaProps c = inertia_properties(cs, Eigen::Vector2d(0.5, 0.0));
    CHECK(c.I1 == doctest::Approx(-0.5 * p.I11).epsilon(1e-13));
    CHECK(c.rhoA == doctest::Approx(p.rhoA).epsilon(1e-14));
    const auto M = p.mass_matrix();
    CHECK(M(0, 0) == doctest::Approx(p.rhoA));
    CHECK(M.isApprox(M.transpose()));
}

TEST_CASE("jacobian guards against thick curved sections") {
    CHECK(initial_jacobian(0.1, 0.0, Eigen::Vector2d(2.0, 0.0)) == doctest::Approx(0.8));
    CHECK_THROWS_AS(initial_jacobian(0.6, 0.0, Eigen::Vector2d(2.0, 0.0)), GeometryError);
    CHECK_THROWS_AS((CrossSection{0.0, 1.0, 1.0}).validate(), DomainError);
}

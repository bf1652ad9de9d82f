#include "beam/section.hpp"

#include <algorithm>
#include <cmath>

namespace beam {

void CrossSection::validate() const {
    if (!(w > 0.0) || !(h > 0.0)) throw DomainError("section: width and height must be positive");
    if (!(rho0 > 0.0)) throw DomainError("section: density must be positive");
}

QuadratureRule2D gauss_rule(const CrossSection& cs, int n1, int n2) {
    std::vector<double> x1, w1, x2, w2;
    gauss_legendre(n1, x1, w1);
    gauss_legendre(n2, x2, w2);
    QuadratureRule2D r;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            r.z1.push_back(0.5 * cs.w * x1[i]);
            r.z2.push_back(0.5 * cs.h * x2[j]);
            r.weight.push_back(0.25 * cs.w * cs.h * w1[i] * w2[j]);
        }
    return r;
}

Eigen::MatrixXd monomial_integrals(const CrossSection& cs, int max_deg) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(max_deg + 1, max_deg + 1);
    for (int n = 0; n <= max_deg; n += 2)
        for (int m = 0; m <= max_deg; m += 2)
            M(n, m) = std::pow(cs.w, n + 1) * std::pow(cs.h, m + 1) / (std::pow(2.0, n + m) * (n + 1) * (m + 1));
    return M;
}

int EASBasisSet::max_degree() const {
    int m = 0;
    for (const auto& f : family)
        if (f.dim > 0) m = std::max(m, f.m);
    return m;
}

namespace {

constexpr std::array<int, 4> kMbar = {0, 0, 2, 1};

EASFamily build_family(const Eigen::MatrixXd& Mi, int m, int mbar) {
    EASFamily f;
    f.m = m;
    f.mbar = mbar;
    f.dim = std::max(0, monomial_count(m) - monomial_count(mbar));
    if (f.dim == 0) return f;
    const int nb = monomial_count(mbar);
    const int nm = monomial_count(m);
    auto integ = [&](int a1, int a2, int b1, int b2) { return Mi(a1 + b1, a2 + b2); };
    std::vector<std::array<int, 2>> mono;
    for (int d = 0; d <= m; ++d)
        for (int k = 0; k <= d; ++k) mono.push_back({d - k, k});
    Eigen::MatrixXd Wbar(nb, nb);
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b) Wbar(a, b) = integ(mono[a][0], mono[a][1], mono[b][0], mono[b][1]);
    Eigen::LLT<Eigen::MatrixXd> llt(Wbar);
    if (llt.info() != Eigen::Success) throw std::runtime_error("eas basis: singular Gram matrix");
    f.coeffs = Eigen::MatrixXd::Zero(f.dim, nm);
    for (int j = 0; j < f.dim; ++j) {
        const auto P = mono[nb + j];
        Eigen::VectorXd rhs(nb);
        for (int a = 0; a < nb; ++a) rhs[a] = -integ(mono[a][0], mono[a][1], P[0], P[1]);
        const Eigen::VectorXd beta = llt.solve(rhs);
        f.coeffs(j, nb + j) = 1.0;
        f.coeffs.row(j).head(nb) = beta.transpose();
        f.leading.push_back(P);
    }
    return f;
}

}  // namespace

EASBasisSet build_eas_basis(const CrossSection& cs, int m1, int m2, int m3, int m4) {
    cs.validate();
    const std::array<int, 4> m = {m1, m2, m3, m4};
    const int mmax = *std::max_element(m.begin(), m.end());
    const Eigen::MatrixXd Mi = monomial_integrals(cs, 2 * std::max(mmax, 2));
    EASBasisSet b;
    for (int i = 0; i < 4; ++i) b.family[i] = build_family(Mi, m[i], kMbar[i]);
    b.d_a = 2 * b.family[0].dim + b.family[1].dim + b.family[2].dim + b.family[3].dim;
    return b;
}

void EASBasisSet::eval_family(int i, double z1, double z2, Eigen::VectorXd& val, Eigen::VectorXd& d1,
                              Eigen::VectorXd& d2) const {
    const auto& f = family[i];
    const int nm = monomial_count(f.m);
    Eigen::VectorXd mv(nm), m1(nm), m2(nm);
    int idx = 0;
    for (int d = 0; d <= f.m; ++d)
        for (int k = 0; k <= d; ++k, ++idx) {
            const int a = d - k, b = k;
            mv[idx] = std::pow(z1, a) * std::pow(z2, b);
            m1[idx] = a > 0 ? a * std::pow(z1, a - 1) * std::pow(z2, b) : 0.0;
            m2[idx] = b > 0 ? b * std::pow(z1, a) * std::pow(z2, b - 1) : 0.0;
        }
    if (f.dim == 0) {
        val.resize(0);
        d1.resize(0);
        d2.resize(0);
        return;
    }
    val = f.coeffs * mv;
    d1 = f.coeffs * m1;
    d2 = f.coeffs * m2;
}

Eigen::MatrixXd eval_gamma(const EASBasisSet& basis, double z1, double z2) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(6, basis.d_a);
    Eigen::VectorXd v, a, b;
    int c = 0;
    const int n1 = basis.family[0].dim;
    if (n1 > 0) {
        basis.eval_family(0, z1, z2, v, a, b);
        G.block(0, c, 1, n1) = v.transpose();
        G.block(1, c + n1, 1, n1) = v.transpose();
    }
    c += 2 * n1;
    const int n3 = basis.family[2].dim;
    if (n3 > 0) {
        basis.eval_family(2, z1, z2, v, a, b);
        G.block(2, c, 1, n3) = v.transpose();
    }
    c += n3;
    const int n2 = basis.family[1].dim;
    if (n2 > 0) {
        basis.eval_family(1, z1, z2, v, a, b);
        G.block(3, c, 1, n2) = v.transpose();
    }
    c += n2;
    const int n4 = basis.family[3].dim;
    if (n4 > 0) {
        basis.eval_family(3, z1, z2, v, a, b);
        G.block(4, c, 1, n4) = a.transpose();
        G.block(5, c, 1, n4) = b.transpose();
    }
    return G;
}

Mat6x15 eval_A(double z1, double z2) {
    Mat6x15 A = Mat6x15::Zero();
    A(0, 12) = 1.0;
    A(1, 13) = 1.0;
    A(2, 0) = 1.0;
    A(2, 1) = z1;
    A(2, 2) = z2;
    A(2, 3) = z1 * z1;
    A(2, 4) = z2 * z2;
    A(2, 5) = z1 * z2;
    A(3, 14) = 1.0;
    A(4, 6) = 1.0;
    A(4, 8) = z1;
    A(4, 9) = z2;
    A(5, 7) = 1.0;
    A(5, 10) = z1;
    A(5, 11) = z2;
    return A;
}

double initial_jacobian(double z1, double z2, const Eigen::Vector2d& kappa) {
    const double j0 = 1.0 - z1 * kappa[0] - z2 * kappa[1];
    if (!(j0 > 0.0)) throw GeometryError("section exceeds curvature radius (j0 <= 0)");
    return j0;
}

Eigen::Matrix<double, 9, 9> InertiaProps::mass_matrix() const {
    Eigen::Matrix<double, 9, 9> M = Eigen::Matrix<double, 9, 9>::Zero();
    const Mat3 I = Mat3::Identity();
    const double c[3][3] = {{rhoA, I1, I2}, {I1, I11, I12}, {I2, I12, I22}};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) M.block<3, 3>(3 * a, 3 * b) = c[a][b] * I;
    return M;
}

InertiaProps inertia_properties(const CrossSection& cs, const Eigen::Vector2d& kappa) {
    // j0 is linear, so a 2x2 rule integrates the cubic moments exactly
    const QuadratureRule2D q = gauss_rule(cs, 2, 2);
    InertiaProps p;
    for (size_t i = 0; i < q.size(); ++i) {
        const double z1 = q.z1[i], z2 = q.z2[i];
        const double wj = cs.rho0 * q.weight[i] * initial_jacobian(z1, z2, kappa);
        p.rhoA += wj;
        p.I1 += wj * z1;
        p.I2 += wj * z2;
        p.I11 += wj * z1 * z1;
        p.I12 += wj * z1 * z2;
        p.I22 += wj * z2 * z2;
    }
    return p;
}

double roark_torsion_K(const CrossSection& cs) {
    const double a = 0.5 * std::max(cs.w, cs.h);
    const double b = 0.5 * std::min(cs.w, cs.h);
    const double r = b / a;
    return a * b * b * b * (16.0 / 3.0 - 3.36 * r * (1.0 - std::pow(r, 4) / 12.0));
}

}  // namespace beam

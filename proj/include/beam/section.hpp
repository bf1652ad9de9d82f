#pragma once

#include "beam/splines.hpp"

#include <array>

namespace beam {

struct CrossSection {
    double w = 1.0;     // along zeta1
    double h = 1.0;     // along zeta2
    double rho0 = 1.0;

    void validate() const;
    double area() const { return w * h; }
};

struct QuadratureRule2D {
    std::vector<double> z1, z2, weight;
    size_t size() const { return weight.size(); }
};

QuadratureRule2D gauss_rule(const CrossSection& cs, int n1, int n2);

// M(n, m) = integral of z1^n z2^m over the section.
Eigen::MatrixXd monomial_integrals(const CrossSection& cs, int max_deg);

// Graded-lex monomial indexing: (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),...
inline int monomial_count(int deg) { return deg < 0 ? 0 : (deg + 1) * (deg + 2) / 2; }
inline int monomial_index(int n, int m) { return monomial_count(n + m - 1) + m; }

struct EASFamily {
    int m = 0;     // max degree
    int mbar = 0;  // compatible degree
    int dim = 0;
    // dim x monomial_count(m); row j holds monomial coefficients of P*_j
    Eigen::MatrixXd coeffs;
    // exponents (n, m) of the leading monomial of each member
    std::vector<std::array<int, 2>> leading;
};

struct EASBasisSet {
    std::array<EASFamily, 4> family;
    int d_a = 0;

    int max_degree() const;
    // values of family i members and their z1 / z2 derivatives
    void eval_family(int i, double z1, double z2, Eigen::VectorXd& val, Eigen::VectorXd& d1,
                     Eigen::VectorXd& d2) const;
};

// Disabled family: m_i <= mbar_i (dimension clamps to zero).
EASBasisSet build_eas_basis(const CrossSection& cs, int m1, int m2, int m3, int m4);

using Mat6x15 = Eigen::Matrix<double, 6, 15>;

// Columns: [w1 for E11 | w1 for E22 | w3 | w2 | w4].
Eigen::MatrixXd eval_gamma(const EASBasisSet& basis, double z1, double z2);
Mat6x15 eval_A(double z1, double z2);

double initial_jacobian(double z1, double z2, const Eigen::Vector2d& kappa);

struct InertiaProps {
    double rhoA = 0, I1 = 0, I2 = 0, I11 = 0, I12 = 0, I22 = 0;
    Eigen::Matrix<double, 9, 9> mass_matrix() const;
};

InertiaProps inertia_properties(const CrossSection& cs, const Eigen::Vector2d& kappa);

double roark_torsion_K(const CrossSection& cs);

}  // namespace beam

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace beam {

// General banded matrix in LAPACK band storage (with kl extra rows for LU fill).
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n, int kl, int ku);

    int n() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }
    void set_zero();
    bool in_band(int i, int j) const { return i - j <= kl_ && j - i <= ku_; }
    void add(int i, int j, double v) { ab_[static_cast<size_t>(kl_ + ku_ + i - j) + static_cast<size_t>(j) * ldab_] += v; }
    double operator()(int i, int j) const;
    Eigen::MatrixXd to_dense() const;
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

    // Row/column equilibration, then partial-pivoting LU. Destroys the matrix.
    // Returns false on a singular factor.
    bool solve_in_place(Eigen::MatrixXd& rhs);

private:
    int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 1;
    std::vector<double> ab_;
};

}  // namespace beam

#include "beam/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace beam {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<size_t>(ldab_) * std::max(n, 1), 0.0) {}

void BandedMatrix::set_zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

double BandedMatrix::operator()(int i, int j) const {
    if (!in_band(i, j)) return 0.0;
    return ab_[static_cast<size_t>(kl_ + ku_ + i - j) + static_cast<size_t>(j) * ldab_];
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_, n_);
    for (int j = 0; j < n_; ++j)
        for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) A(i, j) = (*this)(i, j);
    return A;
}

Eigen::VectorXd BandedMatrix::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (int j = 0; j < n_; ++j)
        for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) y[i] += (*this)(i, j) * x[j];
    return y;
}

bool BandedMatrix::solve_in_place(Eigen::MatrixXd& rhs) {
    if (n_ == 0) return true;
    auto at = [&](int i, int j) -> double& {
        return ab_[static_cast<size_t>(kl_ + ku_ + i - j) + static_cast<size_t>(j) * ldab_];
    };
    std::vector<double> r(n_, 0.0), c(n_, 0.0);
    for (int j = 0; j < n_; ++j)
        for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) r[i] = std::max(r[i], std::abs(at(i, j)));
    for (int i = 0; i < n_; ++i) {
        if (!(r[i] > 0.0)) return false;
        r[i] = 1.0 / r[i];
    }
    for (int j = 0; j < n_; ++j) {
        for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) {
            at(i, j) *= r[i];
            c[j] = std::max(c[j], std::abs(at(i, j)));
        }
        if (!(c[j] > 0.0)) return false;
        c[j] = 1.0 / c[j];
        for (int i = std::max(0, j - ku_); i <= std::min(n_ - 1, j + kl_); ++i) at(i, j) *= c[j];
    }
    for (int i = 0; i < n_; ++i) rhs.row(i) *= r[i];
    std::vector<lapack_int> ipiv(n_);
    const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n_, kl_, ku_, static_cast<lapack_int>(rhs.cols()),
                                          ab_.data(), ldab_, ipiv.data(), rhs.data(), static_cast<lapack_int>(rhs.rows()));
    if (info != 0) return false;
    for (int i = 0; i < n_; ++i) rhs.row(i) *= c[i];
    return true;
}

}  // namespace beam

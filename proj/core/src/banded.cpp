#include "tfe/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "tfe/errors.hpp"

namespace tfe {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ab_((2 * kl + ku + 1) * n, 0.0) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "banded matrix must be non-empty");
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_ || !in_band(i, j)) {
        fail(ErrorKind::InvalidArgument,
             "banded entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside band");
    }
    return ab_[j * ldab() + (kl_ + ku_ + i - j)];
}

double BandedMatrix::get(std::size_t i, std::size_t j) const noexcept {
    if (i >= n_ || j >= n_ || !in_band(i, j)) return 0.0;
    return ab_[j * ldab() + (kl_ + ku_ + i - j)];
}

void BandedMatrix::set_zero_row(std::size_t i) {
    const std::size_t lo = i > kl_ ? i - kl_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + ku_);
    for (std::size_t j = lo; j <= hi; ++j) at(i, j) = 0.0;
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t lo = i > kl_ ? i - kl_ : 0;
        const std::size_t hi = std::min(n_ - 1, i + ku_);
        double s = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) s += get(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> solve_banded(BandedMatrix a, std::span<const double> rhs) {
    const std::size_t n = a.size();
    if (rhs.size() != n) fail(ErrorKind::InvalidArgument, "rhs size does not match matrix");

    // Equilibrate rows, then judge singularity by the reciprocal 1-norm condition number.
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > a.lower() ? i - a.lower() : 0;
        const std::size_t hi = std::min(n - 1, i + a.upper());
        double scale = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) scale = std::max(scale, std::abs(a.get(i, j)));
        if (scale == 0.0) fail(ErrorKind::Singular, "zero row " + std::to_string(i));
        for (std::size_t j = lo; j <= hi; ++j) a.at(i, j) /= scale;
        x[i] /= scale;
    }
    double anorm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = j > a.upper() ? j - a.upper() : 0;
        const std::size_t hi = std::min(n - 1, j + a.lower());
        double col = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) col += std::abs(a.get(i, j));
        anorm = std::max(anorm, col);
    }

    std::vector<lapack_int> ipiv(n);
    const auto N = static_cast<lapack_int>(n);
    const auto kl = static_cast<lapack_int>(a.lower()), ku = static_cast<lapack_int>(a.upper());
    const auto ld = static_cast<lapack_int>(a.ldab());
    lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, N, N, kl, ku, a.data(), ld, ipiv.data());
    if (info > 0) fail(ErrorKind::Singular, "exactly zero pivot at " + std::to_string(info - 1));
    if (info < 0) fail(ErrorKind::InvalidArgument, "dgbtrf argument " + std::to_string(-info));
    double rcond = 0.0;
    info = LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', N, kl, ku, a.data(), ld, ipiv.data(), anorm, &rcond);
    if (info != 0 || !(rcond > kMinRcond)) {
        fail(ErrorKind::Singular, "banded system is numerically singular (rcond " + std::to_string(rcond) + ")");
    }
    info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', N, kl, ku, 1, a.data(), ld, ipiv.data(), x.data(), N);
    if (info != 0) fail(ErrorKind::InvalidArgument, "dgbtrs argument " + std::to_string(-info));
    return x;
}

std::vector<double> solve_dense(std::vector<double> a, std::size_t n, std::span<const double> rhs) {
    if (a.size() != n * n || rhs.size() != n) fail(ErrorKind::InvalidArgument, "dense system size mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i * n + j]));
        if (scale == 0.0) fail(ErrorKind::Singular, "zero row " + std::to_string(i));
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] /= scale;
        x[i] /= scale;
    }
    const auto N = static_cast<lapack_int>(n);
    const double anorm = LAPACKE_dlange(LAPACK_ROW_MAJOR, '1', N, N, a.data(), N);
    std::vector<lapack_int> ipiv(n);
    lapack_int info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, N, N, a.data(), N, ipiv.data());
    if (info > 0) fail(ErrorKind::Singular, "exactly zero pivot at " + std::to_string(info - 1));
    if (info < 0) fail(ErrorKind::InvalidArgument, "dgetrf argument " + std::to_string(-info));
    double rcond = 0.0;
    info = LAPACKE_dgecon(LAPACK_ROW_MAJOR, '1', N, a.data(), N, anorm, &rcond);
    if (info != 0 || !(rcond > kMinRcond)) {
        fail(ErrorKind::Singular, "dense system is numerically singular (rcond " + std::to_string(rcond) + ")");
    }
    info = LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', N, 1, a.data(), N, ipiv.data(), x.data(), 1);
    if (info != 0) fail(ErrorKind::InvalidArgument, "dgetrs argument " + std::to_string(-info));
    return x;
}

}  // namespace tfe

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfe {

/// Square matrix with kl sub- and ku super-diagonals, stored column-major in the
/// LAPACK general-band layout (with kl extra rows reserved for pivoting fill-in).
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const noexcept { return n_; }
    std::size_t lower() const noexcept { return kl_; }
    std::size_t upper() const noexcept { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const noexcept {
        return j + kl_ >= i && i + ku_ >= j;
    }
    /// Entry (i,j); throws InvalidArgument outside the band.
    double& at(std::size_t i, std::size_t j);
    double get(std::size_t i, std::size_t j) const noexcept;
    void add(std::size_t i, std::size_t j, double v) { at(i, j) += v; }
    void set_zero_row(std::size_t i);

    std::vector<double> multiply(std::span<const double> x) const;

    double* data() noexcept { return ab_.data(); }
    std::size_t ldab() const noexcept { return 2 * kl_ + ku_ + 1; }

private:
    std::size_t n_, kl_, ku_;
    std::vector<double> ab_;
};

/// Row-equilibrated systems with a reciprocal condition number at or below this are
/// reported as Singular.
inline constexpr double kMinRcond = 1e-15;

/// Solve A x = rhs by banded LU with partial pivoting after row equilibration.
/// Throws Singular when the equilibrated matrix has rcond <= kMinRcond.
std::vector<double> solve_banded(BandedMatrix a, std::span<const double> rhs);

/// Dense LU solve of the n x n row-major system; equilibrated and checked like solve_banded.
std::vector<double> solve_dense(std::vector<double> a, std::size_t n, std::span<const double> rhs);

}  // namespace tfe

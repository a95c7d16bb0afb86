#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfe {

/// Strictly increasing nodes on [front(), back()].
class Grid1D {
public:
    Grid1D() = default;
    explicit Grid1D(std::vector<double> nodes);

    static Grid1D uniform(double a, double b, std::size_t cells);
    /// Geometric spacing h_{i+1} = ratio * h_i, so ratio < 1 refines toward b.
    static Grid1D graded(double a, double b, std::size_t cells, double ratio);
    /// Symmetric grid on [a,b] refined toward both ends: x = (1-g) u + g sin(pi u / 2)
    /// on the unit reference u in [-1,1]; the end spacing is (1-g) times the uniform one.
    static Grid1D symmetric_graded(double a, double b, std::size_t cells, double grading);

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t cells() const noexcept { return nodes_.empty() ? 0 : nodes_.size() - 1; }
    double front() const { return nodes_.front(); }
    double back() const { return nodes_.back(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double spacing(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }

    /// Index of the cell containing x (clamped to the valid range).
    std::size_t locate(double x) const noexcept;

private:
    std::vector<double> nodes_;
};

/// Nodal values on a grid, evaluated between nodes by linear interpolation.
class Profile {
public:
    Profile() = default;
    Profile(Grid1D grid, std::vector<double> values);

    const Grid1D& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& mutable_values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Piecewise-linear evaluation; constant extrapolation outside the grid.
    double operator()(double x) const;

    /// Exact integral of the piecewise-linear interpolant.
    double integral() const;
    double sup_norm() const;

    /// Centered finite differences of nodal values (one-sided at the ends).
    std::vector<double> derivative(int order) const;

    Profile resampled(const Grid1D& target) const;

private:
    Grid1D grid_;
    std::vector<double> values_;
};

}  // namespace tfe

#include "tfe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tfe/errors.hpp"

namespace tfe {

Grid1D::Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) fail(ErrorKind::InvalidArgument, "grid needs at least two nodes");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!(nodes_[i + 1] > nodes_[i])) {
            fail(ErrorKind::InvalidArgument, "grid nodes must be strictly increasing");
        }
    }
}

Grid1D Grid1D::uniform(double a, double b, std::size_t cells) {
    if (cells == 0 || !(b > a)) fail(ErrorKind::InvalidArgument, "uniform grid needs a < b, cells > 0");
    std::vector<double> x(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
    }
    x.back() = b;
    return Grid1D(std::move(x));
}

Grid1D Grid1D::graded(double a, double b, std::size_t cells, double ratio) {
    if (cells == 0 || !(b > a) || !(ratio > 0.0)) {
        fail(ErrorKind::InvalidArgument, "graded grid needs a < b, cells > 0, ratio > 0");
    }
    if (std::abs(ratio - 1.0) < 1e-14) return uniform(a, b, cells);
    // Distance to b after i cells is (b-a) (r^i - r^N) / (1 - r^N); written that way the
    // tiny cells near b keep full relative accuracy.
    const double N = static_cast<double>(cells);
    const double rN = std::pow(ratio, N);
    std::vector<double> x(cells + 1);
    x[0] = a;
    for (std::size_t i = 1; i < cells; ++i) {
        x[i] = b - (b - a) * (std::pow(ratio, static_cast<double>(i)) - rN) / (1.0 - rN);
    }
    x.back() = b;
    return Grid1D(std::move(x));
}

Grid1D Grid1D::symmetric_graded(double a, double b, std::size_t cells, double grading) {
    if (cells == 0 || !(b > a) || grading < 0.0 || grading >= 1.0) {
        fail(ErrorKind::InvalidArgument, "symmetric grid needs a < b, cells > 0, 0 <= grading < 1");
    }
    std::vector<double> x(cells + 1);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i <= cells; ++i) {
        // Mirror the upper half so that nodes are symmetric to the last bit.
        const std::size_t j = std::min(i, cells - i);
        const double u = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(cells);
        const double r = (1.0 - grading) * u + grading * std::sin(0.5 * std::numbers::pi * u);
        x[i] = (i == j) ? mid + half * r : mid - half * r;
    }
    if (cells % 2 == 0) x[cells / 2] = mid;
    x.front() = a;
    x.back() = b;
    return Grid1D(std::move(x));
}

std::size_t Grid1D::locate(double x) const noexcept {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    if (it == nodes_.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(i, nodes_.size() - 2);
}

Profile::Profile(Grid1D grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        fail(ErrorKind::InvalidArgument, "profile values must match grid size");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "profile values must be finite");
    }
}

double Profile::operator()(double x) const {
    if (x <= grid_.front()) return values_.front();
    if (x >= grid_.back()) return values_.back();
    const std::size_t i = grid_.locate(x);
    const double w = (x - grid_[i]) / grid_.spacing(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double Profile::integral() const {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        sum += 0.5 * grid_.spacing(i) * (values_[i] + values_[i + 1]);
    }
    return sum;
}

double Profile::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

// First derivative on a nonuniform grid: three-point formula exact for quadratics.
std::vector<double> first_derivative(std::span<const double> x, std::span<const double> f) {
    const std::size_t n = f.size();
    std::vector<double> d(n);
    if (n == 2) {
        d[0] = d[1] = (f[1] - f[0]) / (x[1] - x[0]);
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        d[i] = (-hp / (hm * (hm + hp))) * f[i - 1] + ((hp - hm) / (hm * hp)) * f[i] +
               (hm / (hp * (hm + hp))) * f[i + 1];
    }
    {
        const double h1 = x[1] - x[0];
        const double h2 = x[2] - x[1];
        d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
               h1 / (h2 * (h1 + h2)) * f[2];
    }
    {
        const std::size_t m = n - 1;
        const double h1 = x[m] - x[m - 1];
        const double h2 = x[m - 1] - x[m - 2];
        d[m] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[m] - (h1 + h2) / (h1 * h2) * f[m - 1] +
               h1 / (h2 * (h1 + h2)) * f[m - 2];
    }
    return d;
}

}  // namespace

std::vector<double> Profile::derivative(int order) const {
    std::vector<double> d(values_.begin(), values_.end());
    for (int k = 0; k < order; ++k) d = first_derivative(grid_.nodes(), d);
    return d;
}

Profile Profile::resampled(const Grid1D& target) const {
    std::vector<double> v(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) v[i] = (*this)(target[i]);
    return Profile(target, std::move(v));
}

}  // namespace tfe

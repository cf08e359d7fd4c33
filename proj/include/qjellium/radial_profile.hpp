#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "qjellium/errors.hpp"

namespace qjellium {

// Tabulated radial function on a strictly increasing grid with cubic-spline
// interpolation (not-a-knot ends, so even profiles are not polluted by an
// artificial f''=0 boundary condition).  Queries beyond the last abscissa
// return 0 -- profiles are built out to where their tails are negligible and
// the zero extension is part of the contract.
class RadialProfile {
public:
    RadialProfile() = default;

    RadialProfile(std::vector<double> grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (grid_.size() != values_.size() || grid_.size() < 2)
            throw domain_error("RadialProfile: need >= 2 matching grid/value points");
        if (grid_.front() < 0.0) throw domain_error("RadialProfile: grid must be nonnegative");
        for (std::size_t i = 1; i < grid_.size(); ++i)
            if (!(grid_[i] > grid_[i - 1]))
                throw domain_error("RadialProfile: grid must be strictly increasing");
        build_spline();
    }

    template <class F>
    static RadialProfile tabulate(F&& f, const std::vector<double>& grid) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
        return RadialProfile(grid, std::move(v));
    }

    // geometric grid [s0, s1] with n points, optionally anchored with a leading 0
    static std::vector<double> geometric_grid(double s0, double s1, std::size_t n,
                                              bool prepend_zero = true) {
        if (!(s0 > 0.0) || !(s1 > s0) || n < 2) throw domain_error("bad geometric grid");
        std::vector<double> g;
        g.reserve(n + 1);
        if (prepend_zero) g.push_back(0.0);
        const double ratio = std::log(s1 / s0) / double(n - 1);
        for (std::size_t i = 0; i < n; ++i) g.push_back(s0 * std::exp(double(i) * ratio));
        g.back() = s1;
        return g;
    }

    double operator()(double s) const {
        if (s < 0.0) throw domain_error("RadialProfile: negative radius");
        if (s > grid_.back()) return 0.0;
        if (s <= grid_.front()) return values_.front();
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
        const std::size_t i = std::size_t(it - grid_.begin()) - 1;
        const double h = grid_[i + 1] - grid_[i];
        const double a = grid_[i + 1] - s, b = s - grid_[i];
        return (m_[i] * a * a * a + m_[i + 1] * b * b * b) / (6.0 * h) +
               (values_[i] / h - m_[i] * h / 6.0) * a +
               (values_[i + 1] / h - m_[i + 1] * h / 6.0) * b;
    }

    double support_radius() const { return grid_.back(); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

    // integral of the interpolant over one grid cell [grid[i], grid[i+1]] (exact
    // antiderivative of the cubic)
    double cell_integral(std::size_t i) const {
        const double h = grid_[i + 1] - grid_[i];
        return 0.5 * h * (values_[i] + values_[i + 1]) - h * h * h * (m_[i] + m_[i + 1]) / 24.0;
    }

private:
    void build_spline() {
        const std::size_t n = grid_.size();
        m_.assign(n, 0.0);
        if (n == 2) return; // linear
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = grid_[i + 1] - grid_[i];
        auto slope = [&](std::size_t i) { return (values_[i + 1] - values_[i]) / h[i]; };
        if (n == 3) { // single interior equation, natural ends
            const double rhs = slope(1) - slope(0);
            m_[1] = 3.0 * rhs / (h[0] + h[1]);
            return;
        }
        // unknowns M_1 .. M_{n-2}; not-a-knot ends folded into the first/last rows
        const std::size_t k = n - 2;
        std::vector<double> sub(k, 0.0), diag(k, 0.0), sup(k, 0.0), rhs(k, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const std::size_t j = i - 1;
            sub[j] = h[i - 1] / 6.0;
            diag[j] = (h[i - 1] + h[i]) / 3.0;
            sup[j] = h[i] / 6.0;
            rhs[j] = slope(i) - slope(i - 1);
        }
        // M_0 = ((h0+h1) M_1 - h0 M_2) / h1
        diag[0] += (h[0] * (h[0] + h[1])) / (6.0 * h[1]);
        sup[0] += -h[0] * h[0] / (6.0 * h[1]);
        // M_{n-1} = ((h_{n-3}+h_{n-2}) M_{n-2} - h_{n-2} M_{n-3}) / h_{n-3}
        const double ha = h[n - 3], hb = h[n - 2];
        diag[k - 1] += (hb * (ha + hb)) / (6.0 * ha);
        sub[k - 1] += -hb * hb / (6.0 * ha);
        // Thomas solve
        for (std::size_t j = 1; j < k; ++j) {
            const double w = sub[j] / diag[j - 1];
            diag[j] -= w * sup[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        m_[n - 2] = rhs[k - 1] / diag[k - 1];
        for (std::size_t j = k - 1; j-- > 0;)
            m_[j + 1] = (rhs[j] - sup[j] * m_[j + 2]) / diag[j];
        m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
        m_[n - 1] = ((ha + hb) * m_[n - 2] - hb * m_[n - 3]) / ha;
    }

    std::vector<double> grid_, values_, m_;
};

} // namespace qjellium

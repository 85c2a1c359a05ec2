#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include "superad/mat2.hpp"

namespace superad {

// Uniform periodic grid on [x_min, x_max) with the semiclassical parameter
// attached; the dual grid carries the scaled momenta k_j = 2*pi*eps*j/L in
// FFT order (j = 0..n/2-1, -n/2..-1).
struct Grid1D {
    double x_min = 0;
    double x_max = 0;
    int n = 0;
    double epsilon = 0;

    static std::shared_ptr<const Grid1D> make(double x_min, double x_max, int n, double epsilon);

    double length() const { return x_max - x_min; }
    double dx() const { return length() / n; }
    double dk() const { return 2.0 * M_PI * epsilon / length(); }
    double k_max() const { return M_PI * epsilon * n / length(); }

    // FFT-ordered integer frequency for sample index j.
    int freq_index(int j) const { return j < n / 2 ? j : j - n; }
    double x(int j) const { return x_min + dx() * j; }
    double k(int j) const { return dk() * freq_index(j); }

    bool operator==(const Grid1D& o) const {
        return x_min == o.x_min && x_max == o.x_max && n == o.n && epsilon == o.epsilon;
    }
};

using GridPtr = std::shared_ptr<const Grid1D>;

enum class Space { Position, Momentum };

// Complex samples on a grid, either in position space (quadrature weight dx)
// or momentum space (weight dk, FFT ordering).
struct GridFunction {
    GridPtr grid;
    Space space = Space::Position;
    std::vector<cplx> v;

    GridFunction() = default;
    GridFunction(GridPtr g, Space s) : grid(std::move(g)), space(s), v(grid->n, cplx(0)) {}
    GridFunction(GridPtr g, Space s, std::vector<cplx> vals)
        : grid(std::move(g)), space(s), v(std::move(vals)) {
        if (static_cast<int>(v.size()) != grid->n)
            throw std::invalid_argument("GridFunction: sample count does not match grid");
    }

    int size() const { return grid->n; }
    double weight() const { return space == Space::Position ? grid->dx() : grid->dk(); }
    double coord(int j) const { return space == Space::Position ? grid->x(j) : grid->k(j); }

    double norm() const;
    double sup_norm() const;
    bool same_layout(const GridFunction& o) const { return *grid == *o.grid && space == o.space; }

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(cplx s);
    GridFunction operator+(const GridFunction& o) const;
    GridFunction operator-(const GridFunction& o) const;
    GridFunction operator*(cplx s) const;

    // Pointwise product with another function on the same layout.
    GridFunction pointwise(const GridFunction& o) const;

    static GridFunction zeros(const GridPtr& g, Space s) { return GridFunction(g, s); }
    template <class F>
    static GridFunction sample(const GridPtr& g, Space s, F&& f) {
        GridFunction out(g, s);
        for (int j = 0; j < g->n; ++j)
            out.v[j] = f(s == Space::Position ? g->x(j) : g->k(j));
        return out;
    }
};

double l2_distance(const GridFunction& a, const GridFunction& b);

void require_same_layout(const GridFunction& a, const GridFunction& b, const char* who);

}  // namespace superad

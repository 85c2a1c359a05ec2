#include "superad/grid.hpp"

#include <cmath>

namespace superad {

std::shared_ptr<const Grid1D> Grid1D::make(double x_min, double x_max, int n, double epsilon) {
    if (!(x_max > x_min)) throw std::invalid_argument("Grid1D: x_max must exceed x_min");
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("Grid1D: n must be a power of two");
    if (!(epsilon > 0)) throw std::invalid_argument("Grid1D: epsilon must be positive");
    auto g = std::make_shared<Grid1D>();
    g->x_min = x_min;
    g->x_max = x_max;
    g->n = n;
    g->epsilon = epsilon;
    return g;
}

double GridFunction::norm() const {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s * weight());
}

double GridFunction::sup_norm() const {
    double s = 0;
    for (const auto& z : v) s = std::max(s, std::abs(z));
    return s;
}

void require_same_layout(const GridFunction& a, const GridFunction& b, const char* who) {
    if (!a.same_layout(b)) throw std::invalid_argument(std::string(who) + ": grid/space mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_same_layout(*this, o, "GridFunction+");
    for (int j = 0; j < size(); ++j) v[j] += o.v[j];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require_same_layout(*this, o, "GridFunction-");
    for (int j = 0; j < size(); ++j) v[j] -= o.v[j];
    return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
    for (auto& z : v) z *= s;
    return *this;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
    GridFunction r = *this;
    r += o;
    return r;
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
    GridFunction r = *this;
    r -= o;
    return r;
}

GridFunction GridFunction::operator*(cplx s) const {
    GridFunction r = *this;
    r *= s;
    return r;
}

GridFunction GridFunction::pointwise(const GridFunction& o) const {
    require_same_layout(*this, o, "GridFunction::pointwise");
    GridFunction r = *this;
    for (int j = 0; j < size(); ++j) r.v[j] *= o.v[j];
    return r;
}

double l2_distance(const GridFunction& a, const GridFunction& b) {
    require_same_layout(a, b, "l2_distance");
    double s = 0;
    for (int j = 0; j < a.size(); ++j) s += std::norm(a.v[j] - b.v[j]);
    return std::sqrt(s * a.weight());
}

}  // namespace superad

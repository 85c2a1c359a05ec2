#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace superad {

using cplx = std::complex<double>;

// Row-major 2x2 complex matrix, small enough to live on the stack everywhere.
struct Mat2 {
    std::array<cplx, 4> a{};

    static Mat2 identity() { return {{cplx(1), cplx(0), cplx(0), cplx(1)}}; }
    static Mat2 zero() { return {}; }

    cplx& operator()(int r, int c) { return a[2 * r + c]; }
    const cplx& operator()(int r, int c) const { return a[2 * r + c]; }

    Mat2 operator+(const Mat2& o) const {
        return {{a[0] + o.a[0], a[1] + o.a[1], a[2] + o.a[2], a[3] + o.a[3]}};
    }
    Mat2 operator-(const Mat2& o) const {
        return {{a[0] - o.a[0], a[1] - o.a[1], a[2] - o.a[2], a[3] - o.a[3]}};
    }
    Mat2 operator*(const Mat2& o) const {
        return {{a[0] * o.a[0] + a[1] * o.a[2], a[0] * o.a[1] + a[1] * o.a[3],
                 a[2] * o.a[0] + a[3] * o.a[2], a[2] * o.a[1] + a[3] * o.a[3]}};
    }
    Mat2 operator*(cplx s) const { return {{a[0] * s, a[1] * s, a[2] * s, a[3] * s}}; }

    cplx trace() const { return a[0] + a[3]; }
    cplx det() const { return a[0] * a[3] - a[1] * a[2]; }

    double frobenius() const {
        double s = 0;
        for (const auto& z : a) s += std::norm(z);
        return std::sqrt(s);
    }
};

inline Mat2 operator*(cplx s, const Mat2& m) { return m * s; }

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

inline Mat2 pauli_x() { return {{cplx(0), cplx(1), cplx(1), cplx(0)}}; }
inline Mat2 pauli_y() { return {{cplx(0), cplx(0, -1), cplx(0, 1), cplx(0)}}; }
inline Mat2 pauli_z() { return {{cplx(1), cplx(0), cplx(0), cplx(-1)}}; }

}  // namespace superad

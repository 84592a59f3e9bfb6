#pragma once

#include <complex>

#include "geolab/gaussian.hpp"

namespace geolab {

using cplx = std::complex<double>;

inline cplx to_complex(GaussianInt z) { return {static_cast<double>(z.re), static_cast<double>(z.im)}; }

// 2x2 matrix over Z[i]. Words act by left multiplication: the matrix of
// p1 p2 ... pn is G(pn) ... G(p1).
struct Mat2 {
    GaussianInt a{1}, b{0}, c{0}, d{1};

    static Mat2 identity() { return {}; }

    GaussianInt det() const { return a * d - b * c; }
    GaussianInt trace() const { return a + d; }
    i64 frobenius_sq() const { return norm(a) + norm(b) + norm(c) + norm(d); }
    // Inverse of a determinant-one matrix.
    Mat2 inverse() const { return {d, -b, -c, a}; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend bool operator==(const Mat2&, const Mat2&) = default;

    cplx mobius(cplx z) const { return (to_complex(a) * z + to_complex(b)) / (to_complex(c) * z + to_complex(d)); }
};

}  // namespace geolab

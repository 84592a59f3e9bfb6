#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "geolab/errors.hpp"

namespace geolab {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

namespace detail {
inline i64 checked_add(i64 a, i64 b) {
    i64 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("gaussian: add overflow");
    return r;
}
inline i64 checked_sub(i64 a, i64 b) {
    i64 r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("gaussian: sub overflow");
    return r;
}
inline i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("gaussian: mul overflow");
    return r;
}
inline i64 floor_div(i64 a, i64 b) {
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
inline i64 floor_mod(i64 a, i64 b) { return a - floor_div(a, b) * b; }
}  // namespace detail

// Element of Z[i]. Components are 64-bit with overflow-checked arithmetic;
// every desk-scale quantity in the library stays far below 2^62.
struct GaussianInt {
    i64 re = 0;
    i64 im = 0;

    constexpr GaussianInt() = default;
    constexpr GaussianInt(i64 r, i64 i = 0) : re(r), im(i) {}

    friend GaussianInt operator+(GaussianInt a, GaussianInt b) {
        return {detail::checked_add(a.re, b.re), detail::checked_add(a.im, b.im)};
    }
    friend GaussianInt operator-(GaussianInt a, GaussianInt b) {
        return {detail::checked_sub(a.re, b.re), detail::checked_sub(a.im, b.im)};
    }
    friend GaussianInt operator-(GaussianInt a) { return GaussianInt{0, 0} - a; }
    friend GaussianInt operator*(GaussianInt a, GaussianInt b) {
        using namespace detail;
        return {checked_sub(checked_mul(a.re, b.re), checked_mul(a.im, b.im)),
                checked_add(checked_mul(a.re, b.im), checked_mul(a.im, b.re))};
    }
    GaussianInt& operator+=(GaussianInt o) { return *this = *this + o; }
    GaussianInt& operator-=(GaussianInt o) { return *this = *this - o; }
    GaussianInt& operator*=(GaussianInt o) { return *this = *this * o; }

    friend bool operator==(GaussianInt, GaussianInt) = default;
    // Lexicographic (re, im); used only for deterministic containers.
    friend auto operator<=>(GaussianInt a, GaussianInt b) {
        if (auto c = a.re <=> b.re; c != 0) return c;
        return a.im <=> b.im;
    }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_unit() const { return (re == 0 && (im == 1 || im == -1)) || (im == 0 && (re == 1 || re == -1)); }
};

inline constexpr GaussianInt kI{0, 1};

i64 norm(GaussianInt z);
inline GaussianInt conj(GaussianInt z) { return {z.re, -z.im}; }

// First-quadrant representative (re > 0, im >= 0); zero maps to zero.
// If unit is given, z = (*unit) * result.
GaussianInt canonical_associate(GaussianInt z, GaussianInt* unit = nullptr);

// Euclidean division with the nearest-integer quotient: a = q b + r, N(r) <= N(b)/2.
std::pair<GaussianInt, GaussianInt> divmod(GaussianInt a, GaussianInt b);
bool divides(GaussianInt d, GaussianInt z);
// Exact quotient z/d; throws DomainError if d does not divide z.
GaussianInt exact_div(GaussianInt z, GaussianInt d);

GaussianInt gcd(GaussianInt a, GaussianInt b);
// Returns (g, x, y) with x a + y b = g, g the canonical gcd.
struct ExtGcd {
    GaussianInt g, x, y;
};
ExtGcd ext_gcd(GaussianInt a, GaussianInt b);

struct GaussianFactorization {
    GaussianInt unit{1, 0};
    std::vector<std::pair<GaussianInt, int>> factors;  // canonical primes, sorted by (norm, re, im)

    GaussianInt product() const;
};

inline constexpr i64 kDefaultNormBound = 1'000'000'000'000LL;

GaussianFactorization factor(GaussianInt z, i64 norm_bound = kDefaultNormBound);
bool is_squarefree(GaussianInt z);
// Canonical primes with norm <= N, sorted by (norm, re, im).
std::vector<GaussianInt> gaussian_primes_up_to(i64 N);
// Ordering used for prime lists: (norm, re, im).
bool prime_order(GaussianInt a, GaussianInt b);

enum class DiscClass { zero, one, minus_one, two_i, none };
// Residues x + yi (0 <= x,y < 4) that are squares mod 4, by brute force.
std::vector<GaussianInt> square_residues_mod4();
DiscClass discriminant_residue_class(GaussianInt D);
std::string to_string(DiscClass c);

std::string to_string(GaussianInt z);
// Accepts "a", "a+bi", "a-bi", "bi", "i", "-i", "1+i", ...; throws DomainError.
GaussianInt parse_gaussian(const std::string& s);
std::ostream& operator<<(std::ostream& os, GaussianInt z);

// Rational-integer helpers.
namespace nt {
bool is_prime(u64 n);
std::vector<std::pair<u64, int>> factor(u64 n);
std::vector<u64> primes_up_to(u64 n);
u64 powmod(u64 b, u64 e, u64 m);
// Canonical Gaussian prime of norm p for p = 2 or p = 1 mod 4.
GaussianInt split_prime(u64 p);
}  // namespace nt

// Z[i]/(q) with representatives {x + y i : 0 <= x < N/g, 0 <= y < g}, g = gcd(re, im).
// Elements are dense indices idx = y * (N/g) + x.
class ResidueRing {
public:
    explicit ResidueRing(GaussianInt modulus);

    GaussianInt modulus() const { return q_; }
    i64 size() const { return n_; }
    i64 reduce(GaussianInt z) const;
    GaussianInt rep(i64 idx) const { return {idx % w_, idx / w_}; }

    i64 zero() const { return 0; }
    i64 one() const { return one_; }
    i64 add(i64 a, i64 b) const;
    i64 sub(i64 a, i64 b) const;
    i64 neg(i64 a) const;
    i64 mul(i64 a, i64 b) const;
    bool is_unit(i64 a) const;
    i64 inverse(i64 a) const;  // throws DomainError for non-units
    std::vector<i64> units() const;

private:
    GaussianInt q_;
    i64 n_ = 1;   // norm
    i64 g_ = 1;   // content of q
    i64 w_ = 1;   // n_/g_
    i64 s_ = 0;   // lattice basis (s_, g_) together with (w_, 0)
    i64 one_ = 0;
    std::vector<std::int32_t> mul_, inv_;  // dense tables for small rings
    bool tables_ = false;
};

}  // namespace geolab

template <>
struct std::hash<geolab::GaussianInt> {
    size_t operator()(geolab::GaussianInt z) const noexcept {
        return std::hash<geolab::i64>{}(z.re) * 0x9e3779b97f4a7c15ULL ^ std::hash<geolab::i64>{}(z.im);
    }
};

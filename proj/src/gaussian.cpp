#include "geolab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace geolab {

using detail::checked_add;
using detail::checked_mul;
using detail::floor_div;
using detail::floor_mod;

i64 norm(GaussianInt z) { return checked_add(checked_mul(z.re, z.re), checked_mul(z.im, z.im)); }

GaussianInt canonical_associate(GaussianInt z, GaussianInt* unit) {
    GaussianInt u{1, 0};
    if (!z.is_zero()) {
        // multiply by -i until in the first quadrant; track the inverse rotation
        for (int k = 0; k < 4 && !(z.re > 0 && z.im >= 0); ++k) {
            z = {z.im, -z.re};
            u = u * kI;
        }
    }
    if (unit) *unit = u;
    return z;
}

namespace {
// round(n/d) for d > 0, ties toward -inf (any tie rule keeps N(r) <= N(b)/2)
i64 round_div(i128 n, i128 d) {
    i128 q = n / d, r = n % d;
    if (r < 0) { --q; r += d; }
    if (2 * r > d) ++q;
    if (q > INT64_MAX || q < INT64_MIN) throw OverflowError("gaussian: quotient overflow");
    return static_cast<i64>(q);
}
}  // namespace

std::pair<GaussianInt, GaussianInt> divmod(GaussianInt a, GaussianInt b) {
    if (b.is_zero()) throw DomainError("gaussian: division by zero");
    // a / b = a conj(b) / N(b)
    i128 nb = static_cast<i128>(b.re) * b.re + static_cast<i128>(b.im) * b.im;
    i128 xr = static_cast<i128>(a.re) * b.re + static_cast<i128>(a.im) * b.im;
    i128 xi = static_cast<i128>(a.im) * b.re - static_cast<i128>(a.re) * b.im;
    GaussianInt q{round_div(xr, nb), round_div(xi, nb)};
    return {q, a - q * b};
}

bool divides(GaussianInt d, GaussianInt z) {
    if (d.is_zero()) return z.is_zero();
    return divmod(z, d).second.is_zero();
}

GaussianInt exact_div(GaussianInt z, GaussianInt d) {
    auto [q, r] = divmod(z, d);
    if (!r.is_zero()) throw DomainError("gaussian: inexact division " + to_string(z) + " / " + to_string(d));
    return q;
}

GaussianInt gcd(GaussianInt a, GaussianInt b) {
    if (a.is_zero() && b.is_zero()) throw DomainError("gcd: both arguments zero");
    while (!b.is_zero()) {
        GaussianInt r = divmod(a, b).second;
        a = b;
        b = r;
    }
    return canonical_associate(a);
}

ExtGcd ext_gcd(GaussianInt a, GaussianInt b) {
    if (a.is_zero() && b.is_zero()) throw DomainError("ext_gcd: both arguments zero");
    GaussianInt r0 = a, r1 = b, x0{1}, x1{0}, y0{0}, y1{1};
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        r0 = r1; r1 = r;
        GaussianInt x = x0 - q * x1; x0 = x1; x1 = x;
        GaussianInt y = y0 - q * y1; y0 = y1; y1 = y;
    }
    GaussianInt u;
    GaussianInt g = canonical_associate(r0, &u);
    // r0 = u g  =>  g = conj(u) r0 since u is a unit
    GaussianInt ui = conj(u);
    return {g, ui * x0, ui * y0};
}

GaussianInt GaussianFactorization::product() const {
    GaussianInt p = unit;
    for (auto [pr, e] : factors)
        for (int k = 0; k < e; ++k) p = p * pr;
    return p;
}

bool prime_order(GaussianInt a, GaussianInt b) {
    i64 na = norm(a), nb = norm(b);
    if (na != nb) return na < nb;
    return a < b;
}

namespace nt {

namespace {
u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m); }
}  // namespace

u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // deterministic for all 64-bit n
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) { comp = false; break; }
        }
        if (comp) return false;
    }
    return true;
}

namespace {
u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 x = 2, y = 2, d = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

void factor_rec(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) { out.push_back(n); return; }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}
}  // namespace

std::vector<std::pair<u64, int>> factor(u64 n) {
    std::vector<u64> ps;
    for (u64 p = 2; p < 1000 && p * p <= n; ++p) {
        while (n % p == 0) { ps.push_back(p); n /= p; }
    }
    factor_rec(n, ps);
    std::sort(ps.begin(), ps.end());
    std::vector<std::pair<u64, int>> out;
    for (u64 p : ps) {
        if (!out.empty() && out.back().first == p) ++out.back().second;
        else out.emplace_back(p, 1);
    }
    return out;
}

std::vector<u64> primes_up_to(u64 n) {
    std::vector<u64> out;
    if (n < 2) return out;
    std::vector<bool> comp(n + 1, false);
    for (u64 p = 2; p <= n; ++p) {
        if (comp[p]) continue;
        out.push_back(p);
        for (u64 k = p * p; k <= n; k += p) comp[k] = true;
    }
    return out;
}

GaussianInt split_prime(u64 p) {
    if (p == 2) return {1, 1};
    if (p % 4 != 1 || !is_prime(p)) throw DomainError("split_prime: need p = 2 or prime p = 1 mod 4");
    // r^2 = -1 mod p from a non-residue c: r = c^((p-1)/4); then gcd(p, r + i) has norm p
    for (u64 c = 2;; ++c) {
        if (powmod(c, (p - 1) / 2, p) != p - 1) continue;
        u64 r = powmod(c, (p - 1) / 4, p);
        return gcd(GaussianInt(static_cast<i64>(p)), GaussianInt(static_cast<i64>(r), 1));
    }
}

}  // namespace nt

GaussianFactorization factor(GaussianInt z, i64 norm_bound) {
    if (z.is_zero()) throw DomainError("factor: zero input");
    i64 n = norm(z);
    if (n > norm_bound) throw LimitError("factor: norm " + std::to_string(n) + " exceeds bound");
    GaussianFactorization out;
    for (auto [p, e] : nt::factor(static_cast<u64>(n))) {
        if (p == 2) {
            GaussianInt pi{1, 1};
            for (int k = 0; k < e; ++k) z = exact_div(z, pi);
            out.factors.emplace_back(pi, e);
        } else if (p % 4 == 3) {
            GaussianInt pi(static_cast<i64>(p));
            for (int k = 0; k < e / 2; ++k) z = exact_div(z, pi);
            out.factors.emplace_back(pi, e / 2);
        } else {
            GaussianInt pi = nt::split_prime(p);
            GaussianInt pj = canonical_associate(conj(pi));
            int a = 0;
            while (a < e && divides(pi, z)) { z = exact_div(z, pi); ++a; }
            for (int k = a; k < e; ++k) z = exact_div(z, pj);
            if (a > 0) out.factors.emplace_back(pi, a);
            if (e - a > 0) out.factors.emplace_back(pj, e - a);
        }
    }
    if (!z.is_unit()) throw CertificationError("factor: leftover non-unit cofactor");
    out.unit = z;
    std::sort(out.factors.begin(), out.factors.end(),
              [](auto& x, auto& y) { return prime_order(x.first, y.first); });
    return out;
}

bool is_squarefree(GaussianInt z) {
    if (z.is_zero()) throw DomainError("is_squarefree: zero input");
    for (auto& [p, e] : factor(z).factors)
        if (e > 1) return false;
    return true;
}

std::vector<GaussianInt> gaussian_primes_up_to(i64 N) {
    if (N < 2) throw DomainError("gaussian_primes_up_to: N must be >= 2");
    std::vector<GaussianInt> out;
    for (u64 p : nt::primes_up_to(static_cast<u64>(N))) {
        if (p == 2) {
            out.push_back({1, 1});
        } else if (p % 4 == 1) {
            GaussianInt pi = nt::split_prime(p);
            out.push_back(pi);
            out.push_back(canonical_associate(conj(pi)));
        } else if (static_cast<i64>(p) <= N / static_cast<i64>(p)) {
            out.push_back(GaussianInt(static_cast<i64>(p)));
        }
    }
    std::sort(out.begin(), out.end(), prime_order);
    return out;
}

std::vector<GaussianInt> square_residues_mod4() {
    std::vector<GaussianInt> out;
    for (i64 x = 0; x < 4; ++x)
        for (i64 y = 0; y < 4; ++y) {
            GaussianInt s = GaussianInt(x, y) * GaussianInt(x, y);
            GaussianInt r{floor_mod(s.re, 4), floor_mod(s.im, 4)};
            if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
        }
    std::sort(out.begin(), out.end());
    return out;
}

DiscClass discriminant_residue_class(GaussianInt D) {
    GaussianInt r{floor_mod(D.re, 4), floor_mod(D.im, 4)};
    if (r == GaussianInt{0, 0}) return DiscClass::zero;
    if (r == GaussianInt{1, 0}) return DiscClass::one;
    if (r == GaussianInt{3, 0}) return DiscClass::minus_one;
    if (r == GaussianInt{0, 2}) return DiscClass::two_i;
    return DiscClass::none;
}

std::string to_string(DiscClass c) {
    switch (c) {
        case DiscClass::zero: return "0";
        case DiscClass::one: return "1";
        case DiscClass::minus_one: return "-1";
        case DiscClass::two_i: return "2i";
        case DiscClass::none: return "none";
    }
    return "none";
}

std::string to_string(GaussianInt z) {
    std::ostringstream os;
    if (z.im == 0) {
        os << z.re;
    } else {
        if (z.re != 0) os << z.re << (z.im > 0 ? "+" : "-");
        else if (z.im < 0) os << "-";
        i64 a = z.im < 0 ? -z.im : z.im;
        if (a != 1) os << a;
        os << "i";
    }
    return os.str();
}

std::ostream& operator<<(std::ostream& os, GaussianInt z) { return os << to_string(z); }

GaussianInt parse_gaussian(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw DomainError("parse_gaussian: empty string");
    auto bad = [&]() { return DomainError("parse_gaussian: cannot parse '" + text + "'"); };
    GaussianInt z;
    size_t pos = 0;
    while (pos < s.size()) {
        i64 sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        }
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        bool has_digits = pos > start;
        i64 v = has_digits ? std::stoll(s.substr(start, pos - start)) : 1;
        if (pos < s.size() && (s[pos] == 'i' || s[pos] == 'I')) {
            ++pos;
            z.im += sign * v;
        } else {
            if (!has_digits) throw bad();
            z.re += sign * v;
        }
        if (pos < s.size() && s[pos] != '+' && s[pos] != '-') throw bad();
    }
    return z;
}

ResidueRing::ResidueRing(GaussianInt modulus) {
    if (modulus.is_zero()) throw DomainError("ResidueRing: zero modulus");
    q_ = canonical_associate(modulus);
    n_ = norm(q_);
    g_ = std::gcd(q_.re, q_.im);
    w_ = n_ / g_;
    // vector of qZ[i] with imaginary part g: u*(a,b) + v*(-b,a) with u b + v a = g
    {
        i64 a = q_.re, b = q_.im;
        // extended Euclid on (b, a)
        i64 r0 = b, r1 = a, u0 = 1, u1 = 0, v0 = 0, v1 = 1;
        while (r1 != 0) {
            i64 t = r0 / r1;
            i64 r = r0 - t * r1; r0 = r1; r1 = r;
            i64 u = u0 - t * u1; u0 = u1; u1 = u;
            i64 v = v0 - t * v1; v0 = v1; v1 = v;
        }
        if (r0 < 0) { r0 = -r0; u0 = -u0; v0 = -v0; }
        i128 x = static_cast<i128>(u0) * a - static_cast<i128>(v0) * b;
        i128 m = x % w_;
        if (m < 0) m += w_;
        s_ = static_cast<i64>(m);
    }
    one_ = reduce(GaussianInt{1});
    if (n_ <= 1024) {
        tables_ = true;
        mul_.resize(static_cast<size_t>(n_ * n_));
        inv_.assign(static_cast<size_t>(n_), -1);
        for (i64 a = 0; a < n_; ++a)
            for (i64 b = 0; b < n_; ++b) {
                i64 p = reduce(rep(a) * rep(b));
                mul_[static_cast<size_t>(a * n_ + b)] = static_cast<std::int32_t>(p);
                if (p == one_) inv_[static_cast<size_t>(a)] = static_cast<std::int32_t>(b);
            }
    }
}

i64 ResidueRing::reduce(GaussianInt z) const {
    i64 k = floor_div(z.im, g_);
    i64 y = z.im - k * g_;
    i128 x = static_cast<i128>(z.re) - static_cast<i128>(k) * s_;
    i128 m = x % w_;
    if (m < 0) m += w_;
    return y * w_ + static_cast<i64>(m);
}

i64 ResidueRing::add(i64 a, i64 b) const {
    // components add, then one carry in the y-direction at most
    i64 x = a % w_ + b % w_, y = a / w_ + b / w_;
    if (y >= g_) { y -= g_; x -= s_; }
    x %= w_;
    if (x < 0) x += w_;
    return y * w_ + x;
}

i64 ResidueRing::neg(i64 a) const { return reduce(-rep(a)); }
i64 ResidueRing::sub(i64 a, i64 b) const { return add(a, neg(b)); }

i64 ResidueRing::mul(i64 a, i64 b) const {
    if (tables_) return mul_[static_cast<size_t>(a * n_ + b)];
    return reduce(rep(a) * rep(b));
}

bool ResidueRing::is_unit(i64 a) const {
    if (tables_) return inv_[static_cast<size_t>(a)] >= 0;
    GaussianInt z = rep(a);
    if (z.is_zero()) return n_ == 1;
    return gcd(z, q_) == GaussianInt{1};
}

i64 ResidueRing::inverse(i64 a) const {
    if (tables_) {
        i64 r = inv_[static_cast<size_t>(a)];
        if (r < 0) throw DomainError("ResidueRing: element is not a unit");
        return r;
    }
    auto e = ext_gcd(rep(a), q_);
    if (e.g != GaussianInt{1}) throw DomainError("ResidueRing: element is not a unit");
    return reduce(e.x);
}

std::vector<i64> ResidueRing::units() const {
    std::vector<i64> out;
    for (i64 a = 0; a < n_; ++a)
        if (is_unit(a)) out.push_back(a);
    return out;
}

}  // namespace geolab

#include "geolab/charsums.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace geolab {

namespace {

// Re(mu z conj(q)) mod N: chi_mu(z) = e(phase / N).
i64 phase(const ResidueRing& R, i64 mu, i64 z) {
    const GaussianInt q = R.modulus();
    const i64 N = R.size();
    const GaussianInt m = R.rep(mu), x = R.rep(z);
    const i128 re = static_cast<i128>(m.re) * x.re - static_cast<i128>(m.im) * x.im;
    const i128 im = static_cast<i128>(m.re) * x.im + static_cast<i128>(m.im) * x.re;
    // (re + i im)(q.re - i q.im), real part
    const i128 r = re * q.re + im * q.im;
    i128 k = r % N;
    if (k < 0) k += N;
    return static_cast<i64>(k);
}

cplx unit_root(i64 k, i64 N) {
    const double t = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(N);
    return {std::cos(t), std::sin(t)};
}

i64 additive_order(const ResidueRing& R, i64 mu) {
    i64 k = 1, acc = mu;
    while (acc != 0) {
        acc = R.add(acc, mu);
        ++k;
    }
    return k;
}

}  // namespace

AdditiveCharacter make_character(std::shared_ptr<const ResidueRing> ring, i64 multiplier) {
    if (multiplier < 0 || multiplier >= ring->size()) throw DomainError("make_character: multiplier out of range");
    AdditiveCharacter chi;
    chi.multiplier = multiplier;
    chi.order = additive_order(*ring, multiplier);
    const i64 N = ring->size();
    chi.values.resize(static_cast<size_t>(N));
    for (i64 z = 0; z < N; ++z) chi.values[z] = unit_root(phase(*ring, multiplier, z), N);
    chi.ring = std::move(ring);
    return chi;
}

std::vector<AdditiveCharacter> all_characters(std::shared_ptr<const ResidueRing> ring) {
    std::vector<AdditiveCharacter> out;
    for (i64 mu = 0; mu < ring->size(); ++mu) out.push_back(make_character(ring, mu));
    return out;
}

std::vector<AdditiveCharacter> characters_of_order(std::shared_ptr<const ResidueRing> ring, i64 q) {
    if (q <= 0 || ring->size() % q != 0) throw DomainError("characters_of_order: order must divide the norm");
    std::vector<AdditiveCharacter> out;
    for (i64 mu = 0; mu < ring->size(); ++mu)
        if (additive_order(*ring, mu) == q) out.push_back(make_character(ring, mu));
    return out;
}

AdditiveCharacter standard_character(std::shared_ptr<const ResidueRing> ring) {
    const ResidueRing& R = *ring;
    auto f = factor(R.modulus());
    if (f.factors.size() != 1 || f.factors[0].second != 1) throw DomainError("standard_character: modulus is not prime");
    const i64 N = R.size();
    const i64 one = R.one(), i = R.reduce(GaussianInt{0, 1});
    const bool inert = !nt::is_prime(static_cast<u64>(N));
    const i64 p = inert ? static_cast<i64>(std::llround(std::sqrt(static_cast<double>(N)))) : N;
    for (i64 mu = 0; mu < N; ++mu) {
        if (inert) {
            if (phase(R, mu, one) == (2 * p) % N && phase(R, mu, i) == 0) return make_character(ring, mu);
        } else if (phase(R, mu, one) == 1 % N) {
            return make_character(ring, mu);
        }
    }
    throw DomainError("standard_character: no matching multiplier");
}

cplx kloosterman(const AdditiveCharacter& chi, i64 a, i64 b) {
    if (chi.trivial()) throw DomainError("kloosterman: trivial character");
    const ResidueRing& R = *chi.ring;
    cplx s = 0;
    for (i64 c : R.units()) s += chi(R.add(R.mul(a, c), R.mul(b, R.inverse(c))));
    return s;
}

namespace {

std::array<i64, 4> reduce_xi(const ResidueRing& R, const Xi& xi) {
    return {R.reduce(xi[0]), R.reduce(xi[1]), R.reduce(xi[2]), R.reduce(xi[3])};
}

i64 dot(const ResidueRing& R, const SL2Elem& s, const std::array<i64, 4>& v) {
    return R.add(R.add(R.mul(s.a, v[0]), R.mul(s.b, v[1])), R.add(R.mul(s.c, v[2]), R.mul(s.d, v[3])));
}

// Strata formula over a residue field.
cplx strata_prime(const AdditiveCharacter& chi, const std::array<i64, 4>& v) {
    const ResidueRing& R = *chi.ring;
    const double N = static_cast<double>(R.size());
    const auto [x, y, z, w] = v;
    if (chi.trivial()) return static_cast<double>(sl2_order_formula(R.modulus()));
    if (y != 0) {
        // c = 0 part vanishes; c != 0 part is N K(chi; z - y^-1 w x, -y)
        const i64 a = R.sub(z, R.mul(R.inverse(y), R.mul(w, x)));
        return N * kloosterman(chi, a, R.neg(y));
    }
    cplx s = N * kloosterman(chi, x, w);
    if (x == 0 && w == 0) {
        cplx t = 0;
        for (i64 c : R.units()) t += chi(R.mul(c, z));
        s += N * N * t;
    }
    return s;
}

}  // namespace

cplx sl2_charsum_direct(const AdditiveCharacter& chi, const std::vector<SL2Elem>& group, const Xi& xi) {
    const ResidueRing& R = *chi.ring;
    const auto v = reduce_xi(R, xi);
    cplx s = 0;
    for (const auto& g : group) s += chi(dot(R, g, v));
    return s;
}

cplx sl2_charsum_direct(const AdditiveCharacter& chi, const Xi& xi) {
    return sl2_charsum_direct(chi, enumerate_sl2(chi.ring->modulus()), xi);
}

cplx sl2_charsum_c0(const AdditiveCharacter& chi, const std::vector<SL2Elem>& group, const Xi& xi) {
    const ResidueRing& R = *chi.ring;
    const auto v = reduce_xi(R, xi);
    cplx s = 0;
    for (const auto& g : group)
        if (g.c == 0) s += chi(dot(R, g, v));
    return s;
}

AdditiveCharacter restrict_to_prime(const AdditiveCharacter& chi, GaussianInt p) {
    const ResidueRing& R = *chi.ring;
    const GaussianInt q = R.modulus();
    if (!divides(p, q)) throw DomainError("restrict_to_prime: p does not divide the modulus");
    const GaussianInt rest = exact_div(q, p);
    auto eg = ext_gcd(rest, p);
    if (norm(eg.g) != 1) throw DomainError("restrict_to_prime: modulus is not square-free at p");
    const GaussianInt e = eg.x * rest * conj(eg.g);  // e = 1 mod p, 0 mod q/p
    auto sub = std::make_shared<const ResidueRing>(p);
    for (i64 mu = 0; mu < sub->size(); ++mu) {
        AdditiveCharacter c = make_character(sub, mu);
        bool ok = true;
        for (i64 u = 0; u < sub->size() && ok; ++u) ok = std::abs(c(u) - chi(R.reduce(e * sub->rep(u)))) < 1e-9;
        if (ok) return c;
    }
    throw DomainError("restrict_to_prime: no matching character");
}

cplx sl2_charsum_strata(const AdditiveCharacter& chi, const Xi& xi) {
    const GaussianInt q = chi.ring->modulus();
    auto f = factor(q);
    if (f.factors.empty()) return 1.0;  // unit modulus: one element, chi trivial
    cplx prod = 1;
    for (auto [p, e] : f.factors) {
        if (e != 1) throw DomainError("sl2_charsum_strata: modulus is not square-free");
        AdditiveCharacter cp = f.factors.size() == 1 ? chi : restrict_to_prime(chi, p);
        prod *= strata_prime(cp, reduce_xi(*cp.ring, xi));
    }
    return prod;
}

std::string charsum_margins_csv(const std::vector<MarginRow>& rows) {
    std::ostringstream os;
    os << "q,character_index,xi,abs_sum,bound,margin\n";
    for (const auto& r : rows) {
        os << '"' << to_string(r.q) << "\"," << r.character_index << ",\"" << to_string(r.xi[0]) << ';' << to_string(r.xi[1])
           << ';' << to_string(r.xi[2]) << ';' << to_string(r.xi[3]) << "\"," << format_real(r.abs_sum) << ','
           << format_real(r.bound) << ',' << format_real(r.margin()) << '\n';
    }
    return os.str();
}

}  // namespace geolab

#include "geolab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

namespace geolab {

namespace {

// Relabels a word of `from` into the alphabet of `to` through part keys.
std::vector<int> label_map(const System& from, const System& to) {
    std::vector<int> m(static_cast<size_t>(from.size()));
    for (int x = 0; x < from.size(); ++x) {
        m[x] = to.partition.find(from.partition.parts[x].key());
        if (m[x] < 0) throw CertificationError("sifting set: part missing from the glue alphabet");
        if (!(from.branch[x].forward == to.branch[m[x]].forward))
            throw CertificationError("sifting set: branch matrix differs across radii");
    }
    return m;
}

Word relabel(const Word& w, const std::vector<int>& m) {
    Word out(w.size());
    for (size_t k = 0; k < w.size(); ++k) out[k] = m[w[k]];
    return out;
}

// Most populous length slice of the ball words; ties go to the shorter length.
std::vector<Word> longest_slice(const System& sys, double X, int& length) {
    std::map<int, std::vector<Word>> by_len;
    visit_ball_words(sys, X, [&](const Word& w, const Mat2&) { by_len[static_cast<int>(w.size())].push_back(w); });
    if (by_len.empty()) throw DomainError("build_sifting_set: empty slice, ball too small");
    auto best = by_len.begin();
    for (auto it = by_len.begin(); it != by_len.end(); ++it)
        if (it->second.size() > best->second.size()) best = it;
    length = best->first;
    return std::move(best->second);
}

Mat2 glue_matrix(const SiftingSet& s, int x, int y) {
    const auto& g = s.glue->at(x, y);
    Mat2 m;
    for (int c : g) m = s.sys->branch[c].forward * m;
    return m;
}

}  // namespace

Word SiftingSet::glued(size_t i, size_t j, size_t k) const {
    return geolab::glue(geolab::glue(xi[i], aleph[j], *glue), omega[k], *glue);
}

Mat2 SiftingSet::glued_matrix(size_t i, size_t j, size_t k) const {
    const Mat2 g1 = glue_matrix(*this, xi[i].back(), aleph[j].front());
    const Mat2 g2 = glue_matrix(*this, aleph[j].back(), omega[k].front());
    return omega_m[k] * g2 * aleph_m[j] * g1 * xi_m[i];
}

std::optional<std::array<size_t, 3>> SiftingSet::decompose(const Word& w) const {
    const size_t lx = static_cast<size_t>(l_x), lz = static_cast<size_t>(l_z);
    if (w.size() < lx + lz + 7) return std::nullopt;
    const Word x(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(lx));
    const Word a(w.begin() + static_cast<std::ptrdiff_t>(lx + 3), w.end() - static_cast<std::ptrdiff_t>(lz + 3));
    const Word z(w.end() - static_cast<std::ptrdiff_t>(lz), w.end());
    auto i = std::lower_bound(xi.begin(), xi.end(), x);
    auto j = std::find(aleph.begin(), aleph.end(), a);
    auto k = std::lower_bound(omega.begin(), omega.end(), z);
    if (i == xi.end() || *i != x || j == aleph.end() || k == omega.end() || *k != z) return std::nullopt;
    std::array<size_t, 3> r{static_cast<size_t>(i - xi.begin()), static_cast<size_t>(j - aleph.begin()),
                            static_cast<size_t>(k - omega.begin())};
    if (glued(r[0], r[1], r[2]) != w) return std::nullopt;
    return r;
}

SiftingSet build_sifting_set(double R, double X, double Y, double Z) {
    if (!(R >= 4)) throw DomainError("build_sifting_set: R must be >= 4");
    if (!(X >= 2 && Y >= 2 && Z >= 2)) throw DomainError("build_sifting_set: X, Y, Z must be >= 2");
    SiftingSet s;
    s.R = R;
    s.X = X;
    s.Y = Y;
    s.Z = Z;
    auto sysR = std::make_shared<const System>(make_system(R));
    auto sys8 = R == 8 ? sysR : std::make_shared<const System>(make_system(8));
    s.sys = R >= 8 ? sysR : sys8;
    s.glue = std::make_shared<const GlueTable>(s.sys->A);

    const auto mR = label_map(*sysR, *s.sys), m8 = label_map(*sys8, *s.sys);
    for (const auto& w : longest_slice(*sysR, X, s.l_x)) s.xi.push_back(relabel(w, mR));
    for (const auto& w : longest_slice(*sysR, Z, s.l_z)) s.omega.push_back(relabel(w, mR));
    visit_ball_words(*sys8, Y, [&](const Word& w, const Mat2&) { s.aleph.push_back(relabel(w, m8)); });
    if (s.aleph.empty()) throw DomainError("build_sifting_set: empty middle set");
    // key order need not match label order across radii
    std::sort(s.xi.begin(), s.xi.end());
    std::sort(s.omega.begin(), s.omega.end());

    auto mats = [&](const std::vector<Word>& ws, std::vector<Mat2>& out) {
        out.reserve(ws.size());
        for (const auto& w : ws) out.push_back(word_to_matrix(*s.sys, w));
    };
    mats(s.xi, s.xi_m);
    mats(s.aleph, s.aleph_m);
    mats(s.omega, s.omega_m);
    return s;
}

std::vector<Word> materialize(const SiftingSet& s, u64 max_size) {
    if (s.size() > max_size) throw LimitError("materialize: sifting set too large");
    std::vector<Word> out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.xi.size(); ++i)
        for (size_t j = 0; j < s.aleph.size(); ++j)
            for (size_t k = 0; k < s.omega.size(); ++k) out.push_back(s.glued(i, j, k));
    return out;
}

namespace {

// Dense arithmetic on ring indices.
struct FastRing {
    const ResidueRing& R;
    i64 n;
    std::vector<std::int32_t> add_, mul_;
    explicit FastRing(const ResidueRing& r) : R(r), n(r.size()) {
        if (n <= 1024) {
            add_.resize(static_cast<size_t>(n * n));
            mul_.resize(static_cast<size_t>(n * n));
            for (i64 a = 0; a < n; ++a)
                for (i64 b = 0; b < n; ++b) {
                    add_[static_cast<size_t>(a * n + b)] = static_cast<std::int32_t>(R.add(a, b));
                    mul_[static_cast<size_t>(a * n + b)] = static_cast<std::int32_t>(R.mul(a, b));
                }
        }
    }
    i64 add(i64 a, i64 b) const { return add_.empty() ? R.add(a, b) : add_[static_cast<size_t>(a * n + b)]; }
    i64 mul(i64 a, i64 b) const { return mul_.empty() ? R.mul(a, b) : mul_[static_cast<size_t>(a * n + b)]; }
    SL2Elem prod(const SL2Elem& x, const SL2Elem& y) const {
        auto e = [&](i64 p, i64 q, i64 r, i64 t) { return static_cast<std::int32_t>(add(mul(p, q), mul(r, t))); };
        return {e(x.a, y.a, x.b, y.c), e(x.a, y.b, x.b, y.d), e(x.c, y.a, x.d, y.c), e(x.c, y.b, x.d, y.d)};
    }
    i64 trace_prod(const SL2Elem& x, const SL2Elem& y) const {
        return add(add(mul(x.a, y.a), mul(x.b, y.c)), add(mul(x.c, y.b), mul(x.d, y.d)));
    }
};

u64 pack(int letter, const SL2Elem& m) {
    return (static_cast<u64>(letter) << 48) | (static_cast<u64>(m.a) << 36) | (static_cast<u64>(m.b) << 24) |
           (static_cast<u64>(m.c) << 12) | static_cast<u64>(m.d);
}

struct Group {
    int letter;
    SL2Elem m;
    u64 count;
};

std::vector<Group> group_by(const ResidueRing& R, const std::vector<Word>& ws, const std::vector<Mat2>& ms, bool last) {
    std::unordered_map<u64, size_t> at;
    std::vector<Group> out;
    for (size_t k = 0; k < ws.size(); ++k) {
        const int letter = last ? ws[k].back() : ws[k].front();
        const SL2Elem m = reduce_matrix(R, ms[k]);
        auto [it, fresh] = at.emplace(pack(letter, m), out.size());
        if (fresh) out.push_back({letter, m, 0});
        ++out[it->second].count;
    }
    return out;
}

}  // namespace

UCount count_U(const SiftingSet& s, GaussianInt q) {
    if (q.is_zero()) throw DomainError("count_U: zero modulus");
    UCount out;
    out.q = canonical_associate(q);
    if (q.is_unit()) {
        out.U = out.U_from_levels = s.size();
        out.by_trace.assign(1, s.size());
        return out;
    }
    if (!is_squarefree(q)) throw DomainError("count_U: modulus is not square-free");
    if (norm(q) >= 4096) throw LimitError("count_U: modulus norm too large");
    const ResidueRing R(out.q);
    const FastRing F(R);
    const i64 four = R.reduce(GaussianInt(4));
    out.by_trace.assign(static_cast<size_t>(R.size()), 0);

    const auto xis = group_by(R, s.xi, s.xi_m, true);
    const auto oms = group_by(R, s.omega, s.omega_m, false);
    // W = M_omega * M_glue(l, f) for each last letter l of the middle word
    std::map<int, std::vector<SL2Elem>> W;
    std::map<std::pair<int, int>, SL2Elem> glue_red;
    auto glue_of = [&](int x, int y) -> const SL2Elem& {
        auto it = glue_red.find({x, y});
        if (it == glue_red.end()) it = glue_red.emplace(std::pair{x, y}, reduce_matrix(R, glue_matrix(s, x, y))).first;
        return it->second;
    };
    for (const auto& a : s.aleph) {
        auto& v = W[a.back()];
        if (!v.empty()) continue;
        for (const auto& g : oms) v.push_back(F.prod(g.m, glue_of(a.back(), g.letter)));
    }

    u64 direct = 0;
    std::vector<u64> levels(static_cast<size_t>(R.size()), 0);
    std::vector<SL2Elem> L(xis.size());
    std::map<int, SL2Elem> head;  // M_a * M_glue(x, first letter of a), per x
    for (size_t j = 0; j < s.aleph.size(); ++j) {
        const SL2Elem Ma = reduce_matrix(R, s.aleph_m[j]);
        head.clear();
        for (size_t g = 0; g < xis.size(); ++g) {
            auto it = head.find(xis[g].letter);
            if (it == head.end())
                it = head.emplace(xis[g].letter, F.prod(Ma, glue_of(xis[g].letter, s.aleph[j].front()))).first;
            L[g] = F.prod(it->second, xis[g].m);
        }
        const auto& Wl = W.at(s.aleph[j].back());
        std::fill(levels.begin(), levels.end(), 0);
        for (size_t g = 0; g < xis.size(); ++g) {
            const u64 c = xis[g].count;
            for (size_t h = 0; h < oms.size(); ++h) levels[static_cast<size_t>(F.trace_prod(Wl[h], L[g]))] += c * oms[h].count;
        }
        for (i64 t = 0; t < R.size(); ++t) {
            if (!levels[t]) continue;
            out.by_trace[t] += levels[t];
            if (R.sub(F.mul(t, t), four) == 0) direct += levels[t];
        }
    }
    out.U = direct;
    for (i64 t = 0; t < R.size(); ++t)
        if (F.mul(t, t) == four) out.U_from_levels += out.by_trace[t];
    return out;
}

u64 count_U_materialized(const SiftingSet& s, GaussianInt q, u64 max_size) {
    if (s.size() > max_size) throw LimitError("count_U_materialized: sifting set too large");
    if (!q.is_unit() && !is_squarefree(q)) throw DomainError("count_U_materialized: modulus is not square-free");
    u64 n = 0;
    for (const auto& w : materialize(s, max_size)) {
        const GaussianInt t = word_to_matrix(*s.sys, w).trace();
        if (divides(q, t * t - GaussianInt(4))) ++n;
    }
    return n;
}

std::vector<GaussianInt> squarefree_moduli(i64 Q) {
    std::vector<GaussianInt> out{GaussianInt(1)};
    for (i64 a = 1; a * a <= Q; ++a)
        for (i64 b = 0; a * a + b * b <= Q; ++b) {
            const GaussianInt z{a, b};
            if (norm(z) > 1 && is_squarefree(z)) out.push_back(z);
        }
    std::sort(out.begin(), out.end(), prime_order);
    return out;
}

SieveLedger sieve_ledger(const SiftingSet& s, i64 Q) {
    if (Q > kMaxEnumNorm) throw LimitError("sieve_ledger: level above the enumeration bound");
    SieveLedger l;
    l.pi_size = s.size();
    std::map<GaussianInt, Rational> beta_p;
    for (GaussianInt q : squarefree_moduli(Q)) {
        LedgerRow r;
        r.q = q;
        r.U = count_U(s, q).U;
        r.beta = 1;
        for (auto [p, e] : factor(q).factors) {
            auto it = beta_p.find(p);
            if (it == beta_p.end()) it = beta_p.emplace(p, beta(p)).first;
            r.beta *= it->second;
        }
        // beta |Pi| is exact in 128 bits; only the final division rounds
        const i64 den = r.beta.denominator();
        const i128 scaled = static_cast<i128>(r.beta.numerator()) * static_cast<i128>(l.pi_size);
        r.main = static_cast<double>(scaled / den) + static_cast<double>(scaled % den) / static_cast<double>(den);
        r.remainder = static_cast<double>(static_cast<i128>(r.U) * den - scaled) / static_cast<double>(den);
        l.abs_remainder_sum += std::abs(r.remainder);
        l.rows.push_back(r);
    }
    return l;
}

std::string ledger_csv(const SieveLedger& l) {
    std::ostringstream os;
    os << "q_re,q_im,Uq,beta_num,beta_den,main,remainder\n";
    for (const auto& r : l.rows)
        os << r.q.re << ',' << r.q.im << ',' << r.U << ',' << r.beta.numerator() << ',' << r.beta.denominator() << ','
           << format_real(r.main) << ',' << format_real(r.remainder) << '\n';
    return os.str();
}

BallConstant measure_ball_constant(const SiftingSet& s, u64 max_scan) {
    BallConstant b;
    const u64 total = s.size();
    if (total == 0) return b;
    const u64 step = total <= max_scan ? 1 : (total + max_scan - 1) / max_scan;
    b.sampled = step > 1;
    const u64 nj = s.aleph.size(), nk = s.omega.size();
    i64 best = 0;
    for (u64 idx = 0; idx < total; idx += step) {
        const size_t i = static_cast<size_t>(idx / (nj * nk)), j = static_cast<size_t>(idx / nk % nj),
                     k = static_cast<size_t>(idx % nk);
        best = std::max(best, s.glued_matrix(i, j, k).frobenius_sq());
    }
    b.C = std::sqrt(static_cast<double>(best)) / s.N();
    std::set<int> xl, af, al, of;
    for (const auto& w : s.xi) xl.insert(w.back());
    for (const auto& w : s.aleph) af.insert(w.front()), al.insert(w.back());
    for (const auto& w : s.omega) of.insert(w.front());
    auto widest = [&](const std::set<int>& from, const std::set<int>& to) {
        i64 m = 0;
        for (int x : from)
            for (int y : to) m = std::max(m, glue_matrix(s, x, y).frobenius_sq());
        return std::sqrt(static_cast<double>(m));
    };
    b.glue_factor = widest(xl, af) * widest(al, of);
    return b;
}

u64 count_almost_prime(const SiftingSet& s, i64 z, u64 max_size) {
    if (s.size() > max_size) throw LimitError("count_almost_prime: sifting set too large");
    const auto primes = z >= 2 ? gaussian_primes_up_to(z) : std::vector<GaussianInt>{};
    u64 n = 0;
    for (size_t i = 0; i < s.xi.size(); ++i)
        for (size_t j = 0; j < s.aleph.size(); ++j)
            for (size_t k = 0; k < s.omega.size(); ++k) {
                const GaussianInt t = s.glued_matrix(i, j, k).trace();
                const GaussianInt D = t * t - GaussianInt(4);
                if (D.is_zero()) continue;
                bool ok = true;
                for (GaussianInt p : primes)
                    if (divides(p, D)) {
                        ok = false;
                        break;
                    }
                n += ok;
            }
    return n;
}

MertensResult mertens_check(double n) {
    if (!(n >= 10)) throw DomainError("mertens_check: n must be >= 10");
    MertensResult r;
    r.n = n;
    const u64 N = static_cast<u64>(n);
    const bool exact = N <= 40;
    Rational ex(0);
    for (u64 p : nt::primes_up_to(N)) {
        const double inv = 1.0 / static_cast<double>(p);
        if (p == 2) {
            r.sum += inv;
            if (exact) ex += Rational(1, 2);
        } else if (p % 4 == 1) {
            r.sum += 2 * inv;
            r.split_sum += inv;
            if (exact) ex += Rational(2, static_cast<i64>(p));
        } else {
            r.inert_sum += inv;
            if (p * p <= N) {
                r.sum += inv * inv;
                if (exact) ex += Rational(1, static_cast<i64>(p * p));
            }
        }
    }
    r.value = r.sum - std::log(std::log(n));
    if (exact) r.exact = ex;
    return r;
}

Rational beta_closed_form(GaussianInt p) {
    const i64 N = norm(p);
    const i64 roots = N == 2 ? 1 : 2;
    return Rational(roots) * (Rational(1) + Rational(1, N * N - 1)) / Rational(N);
}

DimensionProduct dimension_product(double w, double z) {
    if (!(w >= 2 && w <= z && z <= 1e6)) throw DomainError("dimension_product: need 2 <= w <= z <= 1e6");
    DimensionProduct d;
    double log_prod = 0;
    auto take = [&](i64 N, int copies) {
        if (static_cast<double>(N) < w || static_cast<double>(N) >= z) return;
        const double b = N == 2 ? 2.0 / 3.0 : 2.0 * N / (static_cast<double>(N) * N - 1);
        log_prod -= copies * std::log1p(-b);
    };
    for (u64 p : nt::primes_up_to(static_cast<u64>(z))) {
        const i64 P = static_cast<i64>(p);
        if (p == 2) take(2, 1);
        else if (p % 4 == 1) take(P, 2);
        else if (static_cast<double>(P) * P < z) take(P * P, 1);
    }
    d.product = std::exp(log_prod);
    d.reference = std::pow(std::log(z) / std::log(w), 2);
    d.ratio = d.product / d.reference;
    return d;
}

bool squarefree_disc_shortcut(GaussianInt t) {
    const GaussianInt a = t - GaussianInt(2), b = t + GaussianInt(2);
    if (a.is_zero() || b.is_zero()) return false;
    // a prime dividing both factors divides 4, and then its square divides the product
    return is_squarefree(a) && is_squarefree(b) && norm(gcd(a, b)) == 1;
}

HarvestResult harvest(const std::vector<GeodesicClass>& classes, double R, double X, double delta, double eta) {
    HarvestResult h;
    h.R = R;
    h.X = X;
    h.classes = static_cast<i64>(classes.size());
    for (const auto& c : classes) ++h.multiplicity[c.trace];
    std::set<GaussianInt> D;
    const double expo = 2 * delta - 2 - 2 * eta;
    for (auto [t, M] : h.multiplicity) {
        const GaussianInt d = t * t - GaussianInt(4);
        if (d.is_zero() || !is_squarefree(d)) continue;
        h.T.push_back(t);
        D.insert(d);
        if (static_cast<double>(M) >= std::pow(static_cast<double>(norm(t)), expo)) ++h.above_threshold;
    }
    h.D.assign(D.begin(), D.end());
    return h;
}

HarvestResult harvest(const System& sys, double X, double delta, double eta) {
    if (!(X <= 64)) throw LimitError("harvest: X above desk scale");
    return harvest(enumerate_ball(sys, X, true), sys.R, X, delta, eta);
}

std::string harvest_csv(const HarvestResult& h) {
    std::ostringstream os;
    os << "t_re,t_im,M,disc_re,disc_im,squarefree\n";
    for (auto [t, M] : h.multiplicity) {
        const GaussianInt d = t * t - GaussianInt(4);
        const bool sf = !d.is_zero() && is_squarefree(d);
        os << t.re << ',' << t.im << ',' << M << ',' << d.re << ',' << d.im << ',' << (sf ? 1 : 0) << '\n';
    }
    return os.str();
}

std::map<GaussianInt, i64> ball_trace_fibers(double X) {
    if (!(X > 0 && X <= 12)) throw LimitError("ball_trace_fibers: X must be in (0, 12]");
    const i64 B = static_cast<i64>(std::ceil(X * X));  // frobenius_sq < X^2 means <= B - 1 when X^2 is integral
    auto inside = [&](i64 f) { return static_cast<double>(f) < X * X; };
    std::vector<GaussianInt> pts;
    for (i64 x = -B; x <= B; ++x)
        for (i64 y = -B; y <= B; ++y)
            if (inside(x * x + y * y)) pts.push_back({x, y});
    std::sort(pts.begin(), pts.end(), [](GaussianInt a, GaussianInt b) { return norm(a) < norm(b); });
    std::map<GaussianInt, i64> out;
    const GaussianInt one(1);
    for (GaussianInt a : pts)
        for (GaussianInt b : pts) {
            const i64 nab = norm(a) + norm(b);
            if (!inside(nab)) break;
            for (GaussianInt c : pts) {
                const i64 nabc = nab + norm(c);
                if (!inside(nabc)) break;
                if (!a.is_zero()) {
                    const GaussianInt num = one + b * c;
                    if (!divides(a, num)) continue;
                    const GaussianInt d = exact_div(num, a);
                    if (inside(nabc + norm(d))) ++out[a + d];
                } else {
                    if (!(b * c == GaussianInt(-1))) continue;
                    for (GaussianInt d : pts) {
                        if (!inside(nabc + norm(d))) break;
                        ++out[d];
                    }
                }
            }
        }
    return out;
}

}  // namespace geolab

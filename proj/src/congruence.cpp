#include "geolab/congruence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace geolab {

SL2Elem reduce_matrix(const ResidueRing& R, const Mat2& m) {
    return {static_cast<std::int32_t>(R.reduce(m.a)), static_cast<std::int32_t>(R.reduce(m.b)),
            static_cast<std::int32_t>(R.reduce(m.c)), static_cast<std::int32_t>(R.reduce(m.d))};
}

SL2Elem sl2_mul(const ResidueRing& R, const SL2Elem& x, const SL2Elem& y) {
    auto f = [&](i64 p, i64 q, i64 r, i64 s) { return static_cast<std::int32_t>(R.add(R.mul(p, q), R.mul(r, s))); };
    return {f(x.a, y.a, x.b, y.c), f(x.a, y.b, x.b, y.d), f(x.c, y.a, x.d, y.c), f(x.c, y.b, x.d, y.d)};
}

SL2Elem sl2_identity(const ResidueRing& R) {
    const auto one = static_cast<std::int32_t>(R.one());
    return {one, 0, 0, one};
}

bool is_sl2(const ResidueRing& R, const SL2Elem& x) {
    return R.sub(R.mul(x.a, x.d), R.mul(x.b, x.c)) == R.one();
}

namespace {

void check_enum_norm(GaussianInt q, const char* what) {
    if (q.is_zero()) throw DomainError(std::string(what) + ": modulus is zero");
    if (norm(q) > kMaxEnumNorm)
        throw LimitError(std::string(what) + ": norm " + std::to_string(norm(q)) + " exceeds the enumeration bound " +
                         std::to_string(kMaxEnumNorm));
}

bool is_gaussian_prime(GaussianInt p) {
    auto f = factor(p);
    return f.factors.size() == 1 && f.factors[0].second == 1;
}

}  // namespace

void for_each_sl2(const ResidueRing& R, const std::function<void(const SL2Elem&)>& visit) {
    const i64 N = R.size();
    std::vector<std::int32_t> start(static_cast<size_t>(N) + 1), sols(static_cast<size_t>(N));
    std::vector<i64> prod(static_cast<size_t>(N));
    for (i64 a = 0; a < N; ++a) {
        // solutions d of a d = v, grouped by v in increasing d
        std::fill(start.begin(), start.end(), 0);
        for (i64 d = 0; d < N; ++d) {
            prod[d] = R.mul(a, d);
            ++start[prod[d] + 1];
        }
        for (i64 v = 0; v < N; ++v) start[v + 1] += start[v];
        std::vector<std::int32_t> fill(start.begin(), start.end() - 1);
        for (i64 d = 0; d < N; ++d) sols[fill[prod[d]]++] = static_cast<std::int32_t>(d);
        for (i64 b = 0; b < N; ++b)
            for (i64 c = 0; c < N; ++c) {
                const i64 v = R.add(R.one(), R.mul(b, c));
                for (std::int32_t t = start[v]; t < start[v + 1]; ++t)
                    visit({static_cast<std::int32_t>(a), static_cast<std::int32_t>(b), static_cast<std::int32_t>(c), sols[t]});
            }
    }
}

std::vector<SL2Elem> enumerate_sl2(GaussianInt q) {
    check_enum_norm(q, "enumerate_sl2");
    ResidueRing R(q);
    std::vector<SL2Elem> out;
    for_each_sl2(R, [&](const SL2Elem& e) { out.push_back(e); });
    return out;
}

i64 sl2_order_formula(GaussianInt q) {
    if (q.is_zero()) throw DomainError("sl2_order_formula: modulus is zero");
    auto f = factor(q);
    i64 r = 1;
    for (auto [p, e] : f.factors) {
        if (e != 1) throw DomainError("sl2_order_formula: modulus is not square-free");
        const i64 n = norm(p);
        r *= n * n * n - n;
    }
    return r;
}

namespace {
u64 pack(const SL2Elem& x) {
    return (static_cast<u64>(x.a) << 48) | (static_cast<u64>(x.b) << 32) | (static_cast<u64>(x.c) << 16) | static_cast<u64>(x.d);
}
}  // namespace

SL2Index::SL2Index(GaussianInt q) : ring_(q) {
    check_enum_norm(q, "SL2Index");
    for_each_sl2(ring_, [&](const SL2Elem& e) { elems_.push_back(e); });
    index_.reserve(elems_.size());
    for (size_t t = 0; t < elems_.size(); ++t) index_.emplace(pack(elems_[t]), static_cast<i64>(t));
}

i64 SL2Index::index_of(const SL2Elem& x) const {
    auto it = index_.find(pack(x));
    if (it == index_.end()) throw DomainError("SL2Index: element is not in SL2");
    return it->second;
}

std::vector<i64> trace_distribution(GaussianInt p) {
    check_enum_norm(p, "trace_distribution");
    if (!is_gaussian_prime(p)) throw DomainError("trace_distribution: modulus is not a Gaussian prime");
    ResidueRing R(p);
    std::vector<i64> out(static_cast<size_t>(R.size()), 0);
    for_each_sl2(R, [&](const SL2Elem& e) { ++out[R.add(e.a, e.d)]; });
    return out;
}

i64 trace_fiber_count(GaussianInt p, GaussianInt t) {
    auto dist = trace_distribution(p);
    return dist[ResidueRing(p).reduce(t)];
}

Rational rho_t(GaussianInt p, GaussianInt t) {
    const i64 n = norm(p);
    const i64 g = sl2_order_formula(p);
    return Rational(n * trace_fiber_count(p, t) - g, g);
}

i64 roots_of_four(GaussianInt p) {
    ResidueRing R(p);
    const i64 four = R.reduce(GaussianInt(4));
    i64 k = 0;
    for (i64 t = 0; t < R.size(); ++t)
        if (R.mul(t, t) == four) ++k;
    return k;
}

Rational beta(GaussianInt q) {
    if (q.is_zero()) throw DomainError("beta: modulus is zero");
    auto f = factor(q);
    Rational r(1);
    for (auto [p, e] : f.factors) {
        if (e != 1) throw DomainError("beta: modulus is not square-free");
        r *= Rational(roots_of_four(p)) * (Rational(1) + rho_t(p, GaussianInt(2))) / Rational(norm(p));
    }
    return r;
}

EquidistReport equidist_stats(const std::vector<GeodesicClass>& classes, GaussianInt q, double X) {
    if (!is_squarefree(q)) throw DomainError("equidist_stats: modulus is not square-free");
    if (classes.empty()) throw DomainError("equidist_stats: empty enumeration");
    SL2Index G(q);
    EquidistReport r;
    r.q = q;
    r.X = X;
    r.counts.assign(static_cast<size_t>(G.size()), 0);
    for (const auto& c : classes) ++r.counts[G.index_of(reduce_matrix(G.ring(), c.matrix))];
    r.total = static_cast<i64>(classes.size());
    r.expected = static_cast<double>(r.total) / static_cast<double>(G.size());
    double ss = 0;
    for (i64 k : r.counts) {
        const double d = (static_cast<double>(k) - r.expected) / r.expected;
        r.max_rel_dev = std::max(r.max_rel_dev, std::abs(d));
        ss += d * d;
        if (k > 0) ++r.classes_hit;
    }
    r.l2_dev = std::sqrt(ss / static_cast<double>(G.size()));
    if (is_gaussian_prime(q)) {
        const ResidueRing& R = G.ring();
        std::vector<i64> fiber(static_cast<size_t>(R.size()), 0), got(static_cast<size_t>(R.size()), 0);
        for (size_t t = 0; t < G.elements().size(); ++t) {
            const auto& e = G.elements()[t];
            const i64 tr = R.add(e.a, e.d);
            ++fiber[tr];
            got[tr] += r.counts[t];
        }
        for (size_t t = 0; t < fiber.size(); ++t) {
            if (!fiber[t]) continue;
            const double e = static_cast<double>(r.total) * static_cast<double>(fiber[t]) / static_cast<double>(G.size());
            r.trace_max_rel_dev = std::max(r.trace_max_rel_dev, std::abs(static_cast<double>(got[t]) - e) / e);
        }
    }
    return r;
}

EquidistReport equidist_stats(const System& sys, double X, GaussianInt q) {
    check_enum_norm(q, "equidist_stats");
    return equidist_stats(enumerate_ball(sys, X), q, X);
}

std::string equidist_csv(double R, const EquidistReport& r) {
    std::ostringstream os;
    os << "R,X,q_re,q_im,class_index,count,expected\n";
    for (size_t k = 0; k < r.counts.size(); ++k)
        os << format_real(R) << ',' << format_real(r.X) << ',' << r.q.re << ',' << r.q.im << ',' << k << ',' << r.counts[k] << ','
           << format_real(r.expected) << '\n';
    return os.str();
}

namespace {

Mat2 sign_normalize(Mat2 m) {
    for (GaussianInt e : {m.a, m.b, m.c, m.d}) {
        if (e.is_zero()) continue;
        if (e.re < 0 || (e.re == 0 && e.im < 0)) return {-m.a, -m.b, -m.c, -m.d};
        return m;
    }
    return m;
}

std::array<i64, 8> key(const Mat2& m) { return {m.a.re, m.a.im, m.b.re, m.b.im, m.c.re, m.c.im, m.d.re, m.d.im}; }

Mat2 letter_matrix(const System& sys, int code) {
    return code >= 0 ? sys.branch[code].forward : sys.branch[-1 - code].inverse;
}

}  // namespace

Mat2 witness_product(const System& sys, const std::vector<int>& word) {
    Mat2 m;
    for (int c : word) m = m * letter_matrix(sys, c);
    return m;
}

GeneratorCheck verify_generators(const System& sys, int max_depth, i64 frob_cap) {
    GeneratorCheck out;
    const Mat2 T1{{1}, {1}, {0}, {1}}, Ti{{1}, {0, 1}, {0}, {1}}, Q{{0, -1}, {0}, {0}, {0, 1}}, S{{0}, {-1}, {1}, {0}};
    for (auto [name, m] : {std::pair{"T1", T1}, {"Ti", Ti}, {"Q", Q}, {"S", S}}) out.witnesses.push_back({name, m, {}, false});

    // distinct letters up to sign
    std::vector<int> gens;
    std::set<std::array<i64, 8>> seen_gen;
    for (int x = 0; x < sys.size(); ++x)
        for (int code : {x, -1 - x})
            if (seen_gen.insert(key(sign_normalize(letter_matrix(sys, code)))).second) gens.push_back(code);

    struct Node {
        Mat2 m;
        i64 parent;
        int letter;
    };
    std::vector<Node> nodes{{Mat2{}, -1, 0}};
    std::map<std::array<i64, 8>, i64> index{{key(Mat2{}), 0}};
    size_t level_begin = 0, level_end = 1;
    int remaining = static_cast<int>(out.witnesses.size());
    auto record = [&](i64 id) {
        const Mat2 m = nodes[id].m;
        for (auto& w : out.witnesses) {
            if (w.found || !(sign_normalize(w.target) == m)) continue;
            for (i64 t = id; nodes[t].parent >= 0; t = nodes[t].parent) w.word.push_back(nodes[t].letter);
            std::reverse(w.word.begin(), w.word.end());
            w.found = true;
            --remaining;
        }
    };
    for (int depth = 1; depth <= max_depth && remaining > 0 && level_begin < level_end; ++depth) {
        for (size_t t = level_begin; t < level_end && remaining > 0; ++t) {
            for (int g : gens) {
                Mat2 m = sign_normalize(nodes[t].m * letter_matrix(sys, g));
                if (m.frobenius_sq() > frob_cap) continue;
                auto [it, fresh] = index.emplace(key(m), static_cast<i64>(nodes.size()));
                if (!fresh) continue;
                nodes.push_back({m, static_cast<i64>(t), g});
                record(it->second);
            }
        }
        level_begin = level_end;
        level_end = nodes.size();
    }
    out.states = static_cast<i64>(nodes.size());
    out.all_found = remaining == 0;
    for (const auto& w : out.witnesses)
        if (w.found && !(sign_normalize(witness_product(sys, w.word)) == sign_normalize(w.target))) out.all_found = false;

    // closure of the reduced branch matrices mod 1+i
    ResidueRing R2(GaussianInt{1, 1});
    std::set<SL2Elem> group{sl2_identity(R2)};
    std::deque<SL2Elem> q{sl2_identity(R2)};
    std::vector<SL2Elem> red;
    for (int x = 0; x < sys.size(); ++x) red.push_back(reduce_matrix(R2, sys.branch[x].forward));
    while (!q.empty()) {
        SL2Elem e = q.front();
        q.pop_front();
        for (const auto& g : red) {
            SL2Elem f = sl2_mul(R2, e, g);
            if (group.insert(f).second) q.push_back(f);
        }
    }
    out.onto_sl2_1_plus_i = static_cast<i64>(group.size()) == sl2_order_formula(GaussianInt{1, 1});
    return out;
}

}  // namespace geolab

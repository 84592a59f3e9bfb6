#include "geolab/subshift.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

namespace geolab {

void TransitionMatrix::init(int n) {
    n_ = n;
    bits_.assign(static_cast<size_t>(n), std::vector<u64>(static_cast<size_t>((n + 63) / 64), 0));
    succ_.assign(static_cast<size_t>(n), {});
}

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<int>>& dense) {
    init(static_cast<int>(dense.size()));
    for (int x = 0; x < n_; ++x) {
        if (static_cast<int>(dense[x].size()) != n_) throw DomainError("TransitionMatrix: matrix is not square");
        for (int y = 0; y < n_; ++y)
            if (dense[x][y]) set(x, y);
    }
}

void TransitionMatrix::set(int x, int y) {
    if ((*this)(x, y)) return;
    bits_[x][static_cast<size_t>(y) >> 6] |= u64{1} << (y & 63);
    auto& s = succ_[x];
    s.insert(std::upper_bound(s.begin(), s.end(), y), y);
}

i64 TransitionMatrix::ones() const {
    i64 t = 0;
    for (const auto& s : succ_) t += static_cast<i64>(s.size());
    return t;
}

namespace {

std::vector<RPoint> check_points(const Part& p) {
    std::vector<RPoint> pts{p.sample};
    const size_t n = p.cover.size();
    for (size_t t : {size_t{0}, n / 2, n - 1}) {
        cplx c = p.cover[t].center();
        RPoint r{static_cast<i64>(std::llround(c.real() * 256)), static_cast<i64>(std::llround(c.imag() * 256)), 256};
        if (contains(p.region, r)) pts.push_back(r);
    }
    return pts;
}

}  // namespace

TransitionMatrix build_transitions(const Partition& P) {
    const int n = static_cast<int>(P.size());
    TransitionMatrix A;
    A.init(n);
    std::vector<std::vector<RPoint>> pts(static_cast<size_t>(n));
    for (int y = 0; y < n; ++y) pts[y] = check_points(P.parts[y]);
    const bool sampled = n <= 1200;
    for (int x = 0; x < n; ++x) {
        Region img = part_image(P.parts[x]);
        for (const auto& sc : img) {
            if (!is_partition_cline(sc.cline)) {
                std::ostringstream os;
                os << "build_transitions: image boundary of part " << x << " is not a partition cline (" << sc.cline.A << ","
                   << sc.cline.Bre << "," << sc.cline.Bim << "," << sc.cline.C << ")";
                throw CertificationError(os.str());
            }
        }
        for (int y = 0; y < n; ++y) {
            bool in = contains(img, pts[y][0]);
            if (sampled) {
                for (size_t t = 1; t < pts[y].size(); ++t)
                    if (contains(img, pts[y][t]) != in)
                        throw CertificationError("build_transitions: part " + std::to_string(y) + " straddles the image of part " +
                                                 std::to_string(x));
            }
            if (in) A.set(x, y);
        }
        if (A.successors(x).empty()) throw CertificationError("build_transitions: part " + std::to_string(x) + " has no successor");
    }
    return A;
}

std::string transitions_csv(const TransitionMatrix& A) {
    std::ostringstream os;
    os << "from_label,to_label\n";
    for (int x = 0; x < A.size(); ++x)
        for (int y : A.successors(x)) os << x << "," << y << "\n";
    return os.str();
}

Structure check_irreducible_aperiodic(const TransitionMatrix& A) {
    Structure s;
    const int n = A.size();
    if (n == 0) return s;
    std::vector<int> level(static_cast<size_t>(n), -1);
    std::deque<int> q{0};
    level[0] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v : A.successors(u))
            if (level[v] < 0) { level[v] = level[u] + 1; q.push_back(v); }
    }
    std::vector<std::vector<int>> pred(static_cast<size_t>(n));
    for (int u = 0; u < n; ++u)
        for (int v : A.successors(u)) pred[v].push_back(u);
    std::vector<char> back(static_cast<size_t>(n), 0);
    q = {0};
    back[0] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v : pred[u])
            if (!back[v]) { back[v] = 1; q.push_back(v); }
    }
    s.irreducible = std::all_of(level.begin(), level.end(), [](int l) { return l >= 0; }) &&
                    std::all_of(back.begin(), back.end(), [](char b) { return b != 0; });
    if (!s.irreducible) return s;
    int g = 0;
    for (int u = 0; u < n; ++u)
        for (int v : A.successors(u)) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
    s.period = g;
    if (g != 1) return s;

    const size_t W = static_cast<size_t>((n + 63) / 64);
    const u64 tail = (n % 64) ? ((u64{1} << (n % 64)) - 1) : ~u64{0};
    auto full = [&](const std::vector<u64>& r) {
        for (size_t w = 0; w + 1 < W; ++w)
            if (r[w] != ~u64{0}) return false;
        return (r[W - 1] & tail) == tail;
    };
    std::vector<std::vector<u64>> P(static_cast<size_t>(n));
    for (int x = 0; x < n; ++x) P[x] = A.row_bits(x);
    const i64 cap = static_cast<i64>(n) * n;
    for (i64 k = 1; k <= cap; ++k) {
        bool all = true;
        for (int x = 0; x < n && all; ++x) all = full(P[x]);
        if (all) {
            s.primitivity_index = static_cast<int>(k);
            break;
        }
        // P_{k+1}[x] = OR over successors y of x of P_k[y]
        std::vector<std::vector<u64>> Q(static_cast<size_t>(n), std::vector<u64>(W, 0));
        for (int x = 0; x < n; ++x)
            for (int y : A.successors(x))
                for (size_t w = 0; w < W; ++w) Q[x][w] |= P[y][w];
        P = std::move(Q);
    }
    return s;
}

bool is_admissible(const TransitionMatrix& A, const Word& w) {
    for (int x : w)
        if (x < 0 || x >= A.size()) return false;
    for (size_t t = 1; t < w.size(); ++t)
        if (!A(w[t - 1], w[t])) return false;
    return true;
}

u64 count_words(const TransitionMatrix& A, int n, int from, int to) {
    if (n == 0) return (from < 0 && to < 0) ? 1 : 0;
    const int m = A.size();
    std::vector<u64> v(static_cast<size_t>(m), 0);
    for (int x = 0; x < m; ++x) v[x] = (from < 0 || from == x) ? 1 : 0;
    for (int step = 1; step < n; ++step) {
        std::vector<u64> w(static_cast<size_t>(m), 0);
        for (int x = 0; x < m; ++x) {
            if (!v[x]) continue;
            for (int y : A.successors(x))
                if (__builtin_add_overflow(w[y], v[x], &w[y])) throw OverflowError("count_words: overflow");
        }
        v = std::move(w);
    }
    u64 t = 0;
    for (int x = 0; x < m; ++x)
        if (to < 0 || to == x) t += v[x];
    return t;
}

GlueTable::GlueTable(const TransitionMatrix& A) : n_(A.size()) {
    const int n = n_;
    const size_t W = static_cast<size_t>((n + 63) / 64);
    table_.assign(static_cast<size_t>(n) * n, {-1, -1, -1});
    for (int x = 0; x < n; ++x) {
        std::vector<u64> remaining(W, ~u64{0});
        if (n % 64) remaining[W - 1] = (u64{1} << (n % 64)) - 1;
        int left = n;
        for (int a : A.successors(x)) {
            for (int b : A.successors(a)) {
                for (int c : A.successors(b)) {
                    const auto& row = A.row_bits(c);
                    for (size_t w = 0; w < W; ++w) {
                        u64 fresh = row[w] & remaining[w];
                        remaining[w] &= ~fresh;
                        while (fresh) {
                            int y = static_cast<int>(w * 64 + static_cast<size_t>(__builtin_ctzll(fresh)));
                            fresh &= fresh - 1;
                            table_[static_cast<size_t>(x) * n + y] = {a, b, c};
                            --left;
                        }
                    }
                    if (left == 0) goto next_x;
                }
            }
        }
    next_x:;
    }
}

const std::array<int, 3>& GlueTable::at(int x, int y) const {
    const auto& e = table_.at(static_cast<size_t>(x) * n_ + y);
    if (e[0] < 0) throw CertificationError("glue: no length-3 connector from " + std::to_string(x) + " to " + std::to_string(y));
    return e;
}

Word glue(const Word& a, const Word& b, const GlueTable& table) {
    if (a.empty() || b.empty()) throw DomainError("glue: empty word");
    const auto& g = table.at(a.back(), b.front());
    Word out;
    out.reserve(a.size() + b.size() + 3);
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), g.begin(), g.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

int smallest_period(const Word& w) {
    const int n = static_cast<int>(w.size());
    if (n == 0) return 0;
    std::vector<int> fail(static_cast<size_t>(n) + 1, 0);
    fail[0] = -1;
    for (int i = 1; i <= n; ++i) {
        int k = fail[i - 1];
        while (k >= 0 && w[k] != w[i - 1]) k = fail[k];
        fail[i] = k + 1;
    }
    int p = n - fail[n];
    return n % p == 0 ? p : n;
}

PeriodicWord canonical_periodic(const TransitionMatrix& A, const Word& w) {
    if (w.empty()) throw DomainError("canonical_periodic: empty word");
    if (!is_admissible(A, w) || !A(w.back(), w.front())) throw DomainError("canonical_periodic: word is not cyclically admissible");
    const size_t n = w.size();
    size_t best = 0;
    for (size_t r = 1; r < n; ++r) {
        for (size_t t = 0; t < n; ++t) {
            int a = w[(r + t) % n], b = w[(best + t) % n];
            if (a != b) {
                if (a < b) best = r;
                break;
            }
        }
    }
    PeriodicWord out;
    out.word.resize(n);
    for (size_t t = 0; t < n; ++t) out.word[t] = w[(best + t) % n];
    out.primitive = smallest_period(w) == static_cast<int>(n);
    return out;
}

std::string word_to_string(const Word& w) {
    std::string s;
    for (size_t t = 0; t < w.size(); ++t) {
        if (t) s += ',';
        s += std::to_string(w[t]);
    }
    return s;
}

}  // namespace geolab

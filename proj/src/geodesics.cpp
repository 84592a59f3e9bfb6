#include "geolab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace geolab {

System make_system(double R) {
    System sys;
    sys.R = R;
    sys.partition = build_partition(R);
    sys.A = build_transitions(sys.partition);
    const int n = sys.size();
    sys.branch.reserve(static_cast<size_t>(n));
    sys.min_modulus.resize(static_cast<size_t>(n));
    for (const auto& p : sys.partition.parts) {
        sys.branch.push_back(branch_matrix(p));
        double mm = INFINITY;
        for (const auto& b : p.cover) mm = std::min(mm, b.min_modulus());
        sys.min_modulus[p.label] = mm;
    }
    sys.succ_min_modulus.resize(static_cast<size_t>(n));
    sys.succ_cells.resize(static_cast<size_t>(n));
    for (int x = 0; x < n; ++x) {
        double mm = INFINITY;
        std::set<std::pair<i64, i64>> cells;
        for (int y : sys.A.successors(x)) {
            mm = std::min(mm, sys.min_modulus[y]);
            const Part& q = sys.partition.parts[y];
            if (cells.insert({q.k, q.l}).second)
                sys.succ_cells[x].push_back({q.k / 2.0, (q.k + 1) / 2.0, q.l / 2.0, (q.l + 1) / 2.0});
        }
        sys.succ_min_modulus[x] = mm;
    }
    return sys;
}

Mat2 word_to_matrix(const System& sys, const Word& w) {
    if (!is_admissible(sys.A, w)) throw DomainError("word_to_matrix: inadmissible word");
    Mat2 m;
    for (int x : w) m = sys.branch[x].forward * m;
    return m;
}

cplx expanding_eigenvalue(GaussianInt trace) {
    cplx t = to_complex(trace);
    const cplx s = std::sqrt(t * t - 4.0);
    // pick the sign without cancellation; the other root is its inverse
    const cplx lam = std::abs(t + s) >= std::abs(t - s) ? (t + s) / 2.0 : (t - s) / 2.0;
    return lam;
}

LengthHolonomy length_holonomy(const Mat2& m) {
    GaussianInt t = m.trace();
    cplx lam = expanding_eigenvalue(t);
    double r = std::abs(lam);
    if (std::abs(r - 1) < 1e-9) throw DomainError("length_holonomy: matrix is not loxodromic (trace " + to_string(t) + ")");
    double th = std::fmod(2 * std::arg(lam), 2 * std::numbers::pi);
    if (th < 0) th += 2 * std::numbers::pi;
    if (th >= 2 * std::numbers::pi) th = 0;
    return {2 * std::log(r), th};
}

VisualPoints visual_points(const Mat2& m) {
    GaussianInt t = m.trace();
    cplx disc = std::sqrt(to_complex(t * t - GaussianInt(4)));
    if (std::abs(disc) < 1e-12 || std::abs(std::abs(expanding_eigenvalue(t)) - 1) < 1e-9)
        throw DomainError("visual_points: matrix is not loxodromic");
    cplx a = to_complex(m.a), d = to_complex(m.d);
    if (m.c.is_zero()) {
        // fixed points b/(d - a) and infinity
        return {to_complex(m.b) / (d - a), cplx(INFINITY, 0), true};
    }
    cplx c2 = 2.0 * to_complex(m.c);
    return {(a - d + disc) / c2, (a - d - disc) / c2, false};
}

namespace {

struct Quat {
    double w = 0, x = 0, y = 0, z = 0;  // w + x i + y j + z k
    friend Quat operator+(Quat p, Quat q) { return {p.w + q.w, p.x + q.x, p.y + q.y, p.z + q.z}; }
    friend Quat operator*(Quat p, Quat q) {
        return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z, p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
                p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x, p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
    }
    Quat inv() const {
        double n = w * w + x * x + y * y + z * z;
        return {w / n, -x / n, -y / n, -z / n};
    }
};

Quat embed(cplx c) { return {c.real(), c.imag(), 0, 0}; }

}  // namespace

double hyperbolic_distance_identity_check(const CMat2& m) {
    const Quat j{0, 0, 1, 0};
    Quat num = embed(m.a) * j + embed(m.b);
    Quat den = embed(m.c) * j + embed(m.d);
    Quat p = num * den.inv();
    // p = z + t j with z = p.w + p.x i; the k-part vanishes for the upper half-space action
    double t = p.y;
    double z2 = p.w * p.w + p.x * p.x;
    double two_cosh = 2 + (z2 + (t - 1) * (t - 1)) / t;
    double fro = std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d);
    return std::abs(two_cosh - fro) + std::abs(p.z);
}

double hyperbolic_distance_identity_check(const Mat2& m) {
    return hyperbolic_distance_identity_check(CMat2{to_complex(m.a), to_complex(m.b), to_complex(m.c), to_complex(m.d)});
}

DirichletForm dirichlet_form(const Mat2& m) {
    GaussianInt A = m.c, B = m.d - m.a, C = -m.b;
    if (A.is_zero() && B.is_zero() && C.is_zero()) throw DomainError("dirichlet_form: zero form (matrix is +-identity)");
    GaussianInt g = A;
    for (GaussianInt v : {B, C})
        if (!v.is_zero()) g = g.is_zero() ? canonical_associate(v) : gcd(g, v);
    g = canonical_associate(g);
    A = exact_div(A, g);
    B = exact_div(B, g);
    C = exact_div(C, g);
    GaussianInt lead = !A.is_zero() ? A : !B.is_zero() ? B : C;
    GaussianInt u;
    canonical_associate(lead, &u);
    GaussianInt ui = conj(u);  // lead * ui is canonical
    return {A * ui, B * ui, C * ui, g};
}

bool is_fundamental_eligible(GaussianInt D) {
    if (D.is_zero()) throw DomainError("is_fundamental_eligible: zero discriminant");
    DiscClass c = discriminant_residue_class(D);
    if (c != DiscClass::one && c != DiscClass::minus_one) return false;
    return is_squarefree(D);
}

GeodesicClass make_class(const System& sys, const Word& w, bool primitive) {
    GeodesicClass g;
    g.word = w;
    g.matrix = word_to_matrix(sys, w);
    g.trace = g.matrix.trace();
    g.discriminant = g.trace * g.trace - GaussianInt(4);
    auto lh = length_holonomy(g.matrix);
    g.length = lh.length;
    g.holonomy = lh.holonomy;
    g.primitive = primitive;
    g.squarefree_disc = is_squarefree(g.discriminant);
    DiscClass c = discriminant_residue_class(g.discriminant);
    g.fundamental_eligible = g.squarefree_disc && (c == DiscClass::one || c == DiscClass::minus_one);
    return g;
}

namespace {

double box_dist2(const Box& b, cplx p) {
    double dx = p.real() < b.x0 ? b.x0 - p.real() : (p.real() > b.x1 ? p.real() - b.x1 : 0.0);
    double dy = p.imag() < b.y0 ? b.y0 - p.imag() : (p.imag() > b.y1 ? p.imag() - b.y1 : 0.0);
    return dx * dx + dy * dy;
}

// Safety factor against rounding in the float bounds.
constexpr double kSlack = 1.0 - 1e-9;

struct BallSearch {
    const System& sys;
    double X2;
    bool aperiodic_only;
    Pruning pruning;
    const std::function<void(const Word&, const Mat2&)>& visit;
    BallStats stats;
    Word w;

    // Lower bound for frobenius_sq of every proper extension of w (matrix M).
    bool prune_matrix(const Mat2& M) const {
        // extensions wv satisfy ||M_wv||^2 >= (2/3) min_{z in succ(last)} |p - r z|^2
        const cplx p = to_complex(M.a), r = to_complex(M.c);
        const int x = w.back();
        const double r2 = std::norm(r);
        if (r2 == 0) return (2.0 / 3.0) * std::norm(p) * kSlack >= X2;
        const cplx pole = p / r;
        double d = sys.succ_min_modulus[x] - std::abs(pole);
        if (d > 0 && (2.0 / 3.0) * r2 * d * d * kSlack >= X2) return true;
        double best = INFINITY;
        for (const Box& b : sys.succ_cells[x]) {
            best = std::min(best, box_dist2(b, pole));
            if ((2.0 / 3.0) * r2 * best * kSlack < X2) return false;
        }
        return (2.0 / 3.0) * r2 * best * kSlack >= X2;
    }

    u64 words = 0;

    // every admissible word, no necklace condition
    void dfs_all(const Mat2& M, double geo) {
        ++stats.nodes;
        if (static_cast<double>(M.frobenius_sq()) < X2) {
            ++words;
            if (visit) visit(w, M);
        }
        if (pruning == Pruning::matrix ? prune_matrix(M) : geo * (2.0 / 3.0) * kSlack >= X2) return;
        for (int a : sys.A.successors(w.back())) {
            w.push_back(a);
            dfs_all(sys.branch[a].forward * M, geo * sys.min_modulus[a] * sys.min_modulus[a]);
            w.pop_back();
        }
    }

    void dfs(const Mat2& M, int period, double geo) {
        ++stats.nodes;
        const int n = static_cast<int>(w.size());
        if (n > 0 && n % period == 0 && (!aperiodic_only || period == n) && sys.A(w.back(), w.front()) &&
            static_cast<double>(M.frobenius_sq()) < X2) {
            ++stats.emitted;
            visit(w, M);
        }
        if (n > 0) {
            if (pruning == Pruning::matrix ? prune_matrix(M) : geo * (2.0 / 3.0) * kSlack >= X2) return;
        }
        auto step = [&](int a, int new_period) {
            w.push_back(a);
            double g = n == 0 ? 1.0 : geo * sys.min_modulus[a] * sys.min_modulus[a];
            dfs(sys.branch[a].forward * M, new_period, g);
            w.pop_back();
        };
        if (n == 0) return;  // first letter handled by the caller
        const int ref = w[static_cast<size_t>(n - period)];
        for (int a : sys.A.successors(w.back())) {
            if (a < ref) continue;
            step(a, a == ref ? period : n + 1);
        }
    }

    void run(int first) {
        w.assign(1, first);
        dfs(sys.branch[first].forward, 1, 1.0);
        w.clear();
    }
};

}  // namespace

void visit_ball(const System& sys, double X, bool aperiodic_only, const std::function<void(const Word&, const Mat2&)>& visit,
                Pruning pruning, BallStats* stats, int first_letter) {
    if (!(X >= std::sqrt(2.0))) throw DomainError("enumerate_ball: X must be >= sqrt(2)");
    BallSearch s{sys, X * X, aperiodic_only, pruning, visit, {}, {}};
    if (first_letter >= 0) s.run(first_letter);
    else
        for (int x = 0; x < sys.size(); ++x) s.run(x);
    if (stats) {
        stats->nodes += s.stats.nodes;
        stats->emitted += s.stats.emitted;
    }
}

void visit_ball_words(const System& sys, double X, const std::function<void(const Word&, const Mat2&)>& visit, Pruning pruning) {
    if (!(X >= std::sqrt(2.0))) throw DomainError("ball words: X must be >= sqrt(2)");
    BallSearch s{sys, X * X, false, pruning, visit, {}, {}};
    for (int x = 0; x < sys.size(); ++x) {
        s.w.assign(1, x);
        s.dfs_all(sys.branch[x].forward, 1.0);
    }
}

u64 count_ball_words(const System& sys, double X, Pruning pruning) {
    u64 n = 0;
    visit_ball_words(sys, X, [&](const Word&, const Mat2&) { ++n; }, pruning);
    return n;
}

std::vector<GeodesicClass> enumerate_ball(const System& sys, double X, bool aperiodic_only, int workers, Pruning pruning) {
    const int n = sys.size();
    std::vector<std::vector<GeodesicClass>> parts(static_cast<size_t>(n));
    auto job = [&](int first) {
        visit_ball(
            sys, X, aperiodic_only,
            [&](const Word& w, const Mat2&) { parts[first].push_back(make_class(sys, w, smallest_period(w) == (int)w.size())); },
            pruning, nullptr, first);
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        for (int x = 0; x < n; ++x) job(x);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (int x; (x = next.fetch_add(1)) < n;) job(x);
            });
        for (auto& th : pool) th.join();
    }
    std::vector<GeodesicClass> out;
    for (auto& p : parts)
        for (auto& g : p) out.push_back(std::move(g));
    std::stable_sort(out.begin(), out.end(), [](const GeodesicClass& a, const GeodesicClass& b) {
        if (a.word.size() != b.word.size()) return a.word.size() < b.word.size();
        return a.word < b.word;
    });
    return out;
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string geodesics_csv(const std::vector<GeodesicClass>& classes) {
    std::ostringstream os;
    os << "word,trace_re,trace_im,disc_re,disc_im,frob_sq,length,holonomy,squarefree,fundamental_eligible\n";
    for (const auto& g : classes) {
        os << '"' << word_to_string(g.word) << "\"," << g.trace.re << ',' << g.trace.im << ',' << g.discriminant.re << ','
           << g.discriminant.im << ',' << g.matrix.frobenius_sq() << ',' << format_real(g.length) << ',' << format_real(g.holonomy)
           << ',' << (g.squarefree_disc ? 1 : 0) << ',' << (g.fundamental_eligible ? 1 : 0) << '\n';
    }
    return os.str();
}

std::vector<GeodesicClass> parse_geodesics_csv(const System& sys, const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    if (line.rfind("word,", 0) != 0) throw DomainError("parse_geodesics_csv: missing header");
    std::vector<GeodesicClass> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] != '"') throw DomainError("parse_geodesics_csv: malformed row");
        size_t close = line.find('"', 1);
        if (close == std::string::npos) throw DomainError("parse_geodesics_csv: malformed row");
        Word w;
        std::istringstream ws(line.substr(1, close - 1));
        for (std::string tok; std::getline(ws, tok, ',');) w.push_back(std::stoi(tok));
        GeodesicClass g = make_class(sys, w, smallest_period(w) == static_cast<int>(w.size()));
        // the stored columns must agree with the recomputed class
        std::istringstream rest(line.substr(close + 2));
        std::vector<std::string> f;
        for (std::string tok; std::getline(rest, tok, ',');) f.push_back(tok);
        if (f.size() != 9 || std::stoll(f[0]) != g.trace.re || std::stoll(f[1]) != g.trace.im ||
            std::stoll(f[4]) != g.matrix.frobenius_sq())
            throw DomainError("parse_geodesics_csv: row disagrees with recomputed class");
        out.push_back(std::move(g));
    }
    return out;
}

size_t matrix_collisions(const std::vector<GeodesicClass>& classes) {
    std::map<std::array<i64, 8>, int> seen;
    size_t dup = 0;
    for (const auto& g : classes) {
        const Mat2& m = g.matrix;
        if (seen[{m.a.re, m.a.im, m.b.re, m.b.im, m.c.re, m.c.im, m.d.re, m.d.im}]++) ++dup;
    }
    return dup;
}

}  // namespace geolab

#include "geolab/thermo.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

namespace geolab {

double tau(cplx z) { return 2 * std::log(std::abs(apply_fhat(z))); }

double birkhoff_sum(cplx z, int n) {
    double t = 0;
    for (int k = 0; k < n; ++k) {
        cplx w = apply_fhat(z);
        t += 2 * std::log(std::abs(w));
        z = w;
    }
    return t;
}

cplx repelling_fixed_point(const Mat2& m) {
    const cplx a = to_complex(m.a), b = to_complex(m.b), c = to_complex(m.c), d = to_complex(m.d);
    if (m.c.is_zero()) {
        if (std::abs(a) <= 1) throw DomainError("repelling_fixed_point: no finite repelling fixed point");
        return b / (d - a);
    }
    // roots of c z^2 + (d - a) z - b = 0, avoiding cancellation
    const cplx t = a + d;
    const cplx disc = std::sqrt(t * t - 4.0);
    cplx q = a - d + disc;
    if (std::abs(a - d - disc) > std::abs(q)) q = a - d - disc;
    if (std::abs(q) == 0) throw DomainError("repelling_fixed_point: parabolic matrix");
    const cplx r1 = q / (2.0 * c);
    const cplx r2 = -b / (c * r1);
    const cplx r2b = (a - d) / c - r1;
    const cplx other = std::isfinite(std::abs(r2)) && std::abs(r1) > 0 ? r2 : r2b;
    return std::abs(c * r1 + d) < std::abs(c * other + d) ? r1 : other;
}

namespace {

Mat2 forward_matrix(const System& sys, const Word& w) {
    Mat2 m;
    for (int x : w) m = sys.branch[x].forward * m;
    return m;
}

Word rotate(const Word& w, size_t k) {
    Word r(w.size());
    for (size_t t = 0; t < w.size(); ++t) r[t] = w[(t + k) % w.size()];
    return r;
}

// Sum of tau over the first M points of the orbit of the periodic point of u.
double orbit_birkhoff(const System& sys, const Word& u, int M) {
    double t = 0;
    for (int k = 1; k <= M; ++k) t += 2 * std::log(std::abs(periodic_point(sys, rotate(u, static_cast<size_t>(k) % u.size()))));
    return t;
}

}  // namespace

cplx periodic_point(const System& sys, const Word& w) {
    if (w.empty() || !is_admissible(sys.A, w) || !sys.A(w.back(), w.front()))
        throw DomainError("periodic_point: word is not cyclically admissible");
    return repelling_fixed_point(forward_matrix(sys, w));
}

double periodic_birkhoff_sum(const System& sys, const Word& w) {
    if (w.empty() || !is_admissible(sys.A, w) || !sys.A(w.back(), w.front()))
        throw DomainError("periodic_birkhoff_sum: word is not cyclically admissible");
    return orbit_birkhoff(sys, w, static_cast<int>(w.size()));
}

namespace {

// True if the strict condition certainly fails everywhere on the box.
bool excludes(const Box& b, const SignedCline& sc) {
    auto sq_range = [](double lo, double hi) -> std::pair<double, double> {
        if (lo <= 0 && hi >= 0) return {0.0, std::max(lo * lo, hi * hi)};
        return {std::min(lo * lo, hi * hi), std::max(lo * lo, hi * hi)};
    };
    auto lin = [](double k, double lo, double hi) -> std::pair<double, double> {
        return k >= 0 ? std::pair{k * lo, k * hi} : std::pair{k * hi, k * lo};
    };
    const Cline& c = sc.cline;
    auto [x2l, x2h] = sq_range(b.x0, b.x1);
    auto [y2l, y2h] = sq_range(b.y0, b.y1);
    auto [lxl, lxh] = lin(2.0 * c.Bre, b.x0, b.x1);
    auto [lyl, lyh] = lin(2.0 * c.Bim, b.y0, b.y1);
    auto [ql, qh] = lin(static_cast<double>(c.A), x2l + y2l, x2h + y2h);
    const double lo = ql + lxl + lyl + c.C, hi = qh + lxh + lyh + c.C;
    const double eps = 1e-9 * (1 + std::abs(lo) + std::abs(hi));
    return sc.sign > 0 ? hi < -eps : lo > eps;
}

struct ModRange {
    double lo = INFINITY, hi = 0;
    void add(double l, double h) {
        lo = std::min(lo, l);
        hi = std::max(hi, h);
    }
};

void bound_box(const Mat2& N, const Box& b, const Region& region, int depth, ModRange& out) {
    for (const auto& sc : region)
        if (excludes(b, sc)) return;
    const cplx cb = b.center();
    const double hd = b.half_diag();
    const double m = std::abs(N.mobius(cb));
    if (N.c.is_zero()) {
        out.add(m - hd, m + hd);  // isometry
        return;
    }
    const cplx cc = to_complex(N.c);
    const cplx pole = -to_complex(N.d) / cc;
    double dx = pole.real() < b.x0 ? b.x0 - pole.real() : (pole.real() > b.x1 ? pole.real() - b.x1 : 0.0);
    double dy = pole.imag() < b.y0 ? b.y0 - pole.imag() : (pole.imag() > b.y1 ? pole.imag() - b.y1 : 0.0);
    const double dist2 = dx * dx + dy * dy;
    const double rad = dist2 > 0 ? hd / (std::norm(cc) * dist2) : INFINITY;
    if (rad <= 0.05 * m || depth >= 6) {
        out.add(m - rad, m + rad);
        return;
    }
    const double xm = (b.x0 + b.x1) / 2, ym = (b.y0 + b.y1) / 2;
    bound_box(N, {b.x0, xm, b.y0, ym}, region, depth + 1, out);
    bound_box(N, {xm, b.x1, b.y0, ym}, region, depth + 1, out);
    bound_box(N, {b.x0, xm, ym, b.y1}, region, depth + 1, out);
    bound_box(N, {xm, b.x1, ym, b.y1}, region, depth + 1, out);
}

constexpr double kRel = 1e-12;

struct LevelBuilder {
    const System& sys;
    std::vector<double> part_lo, part_hi;
    std::unique_ptr<GlueTable> glue;

    explicit LevelBuilder(const System& s) : sys(s) {
        const int n = s.size();
        part_lo.resize(static_cast<size_t>(n));
        part_hi.resize(static_cast<size_t>(n));
        for (int x = 0; x < n; ++x) {
            ModRange r;
            for (const auto& b : s.partition.parts[x].cover) r.add(b.min_modulus(), b.max_modulus());
            part_lo[x] = r.lo * (1 - kRel);
            part_hi[x] = r.hi * (1 + kRel);
        }
    }

    double center_modulus(const Word& v) {
        Word u = v;
        if (!sys.A(v.back(), v.front())) {
            if (!glue) glue = std::make_unique<GlueTable>(sys.A);
            const auto& g = glue->at(v.back(), v.front());
            u.insert(u.end(), g.begin(), g.end());
        }
        return std::abs(repelling_fixed_point(forward_matrix(sys, u)));
    }

    CylinderLevel letters() {
        CylinderLevel L;
        L.depth = 2;
        const int n = sys.size();
        L.explicit_succ.resize(static_cast<size_t>(n));
        for (int x = 0; x < n; ++x) {
            L.explicit_succ[x] = sys.A.successors(x);
            L.mod_lo.push_back(part_lo[x]);
            L.mod_hi.push_back(part_hi[x]);
            L.mod_center.push_back(std::clamp(center_modulus({x}), part_lo[x], part_hi[x]));
        }
        return L;
    }

    // States are words of length Lw >= 2; prev holds the level of length Lw - 1.
    CylinderLevel words(int Lw, const CylinderLevel& prev) {
        const int n = sys.size();
        // cnt[k][x]: admissible words of length k starting with x
        std::vector<std::vector<u64>> cnt(static_cast<size_t>(Lw) + 1, std::vector<u64>(static_cast<size_t>(n), 0));
        for (int x = 0; x < n; ++x) cnt[1][x] = 1;
        for (int k = 2; k <= Lw; ++k)
            for (int x = 0; x < n; ++x)
                for (int y : sys.A.successors(x)) cnt[k][x] += cnt[k - 1][y];
        std::vector<std::vector<std::vector<u64>>> S(static_cast<size_t>(Lw) + 1);
        for (int k = 1; k <= Lw; ++k) {
            S[k].resize(static_cast<size_t>(n));
            for (int x = 0; x < n; ++x) {
                const auto& su = sys.A.successors(x);
                S[k][x].assign(su.size() + 1, 0);
                for (size_t t = 0; t < su.size(); ++t) S[k][x][t + 1] = S[k][x][t] + cnt[k][su[t]];
            }
        }
        std::vector<u64> G(static_cast<size_t>(n) + 1, 0);
        for (int x = 0; x < n; ++x) G[x + 1] = G[x] + cnt[Lw][x];

        CylinderLevel L;
        L.depth = Lw + 1;
        const size_t total = G[n];
        L.succ_lo.reserve(total);
        L.succ_hi.reserve(total);
        L.mod_lo.reserve(total);
        L.mod_hi.reserve(total);
        L.mod_center.reserve(total);

        Word w(static_cast<size_t>(Lw));
        std::vector<Mat2> N(static_cast<size_t>(Lw));  // N[j] = inv(w0)...inv(w_{j-1})
        size_t parent = 0;
        auto leaf = [&] {
            // successor block: words starting with w[1..Lw-1]
            u64 r = G[w[1]];
            for (int j = 2; j < Lw; ++j) {
                const auto& su = sys.A.successors(w[j - 1]);
                size_t pos = static_cast<size_t>(std::lower_bound(su.begin(), su.end(), w[j]) - su.begin());
                r += S[Lw - j + 1][w[j - 1]][pos];
            }
            L.succ_lo.push_back(static_cast<std::uint32_t>(r));
            L.succ_hi.push_back(static_cast<std::uint32_t>(r + sys.A.successors(w[Lw - 1]).size()));
            const Part& last = sys.partition.parts[w[Lw - 1]];
            ModRange mr;
            for (const auto& b : last.cover) bound_box(N[Lw - 1], b, last.region, 0, mr);
            double lo = std::max({mr.lo * (1 - kRel), prev.mod_lo[parent], part_lo[w[0]]});
            double hi = std::min({mr.hi * (1 + kRel), prev.mod_hi[parent], part_hi[w[0]]});
            if (lo > hi) throw CertificationError("cylinder bounds are inconsistent");
            L.mod_lo.push_back(lo);
            L.mod_hi.push_back(hi);
            L.mod_center.push_back(std::clamp(center_modulus(w), lo, hi));
        };
        auto rec = [&](auto&& self, int j) -> void {
            if (j == Lw) {
                leaf();
                return;
            }
            const std::vector<int>* choices = nullptr;
            std::vector<int> all;
            if (j == 0) {
                all.resize(static_cast<size_t>(n));
                for (int x = 0; x < n; ++x) all[x] = x;
                choices = &all;
            } else {
                choices = &sys.A.successors(w[j - 1]);
            }
            for (int x : *choices) {
                w[j] = x;
                if (j + 1 < Lw) N[j + 1] = N[j] * sys.branch[x].inverse;
                self(self, j + 1);
                if (j == Lw - 2) ++parent;
            }
        };
        N[0] = Mat2{};
        rec(rec, 0);
        return L;
    }
};

}  // namespace

std::vector<CylinderLevel> build_cylinder_levels(const System& sys, int max_depth, size_t state_budget) {
    if (max_depth < 2) throw DomainError("build_cylinder_levels: depth must be >= 2");
    LevelBuilder B(sys);
    std::vector<CylinderLevel> out;
    out.push_back(B.letters());
    for (int depth = 3; depth <= max_depth; ++depth) {
        const int Lw = depth - 1;
        long double states = 0;
        {
            std::vector<long double> c(static_cast<size_t>(sys.size()), 1);
            for (int k = 2; k <= Lw; ++k) {
                std::vector<long double> d(c.size(), 0);
                for (int x = 0; x < sys.size(); ++x)
                    for (int y : sys.A.successors(x)) d[x] += c[y];
                c = std::move(d);
            }
            for (auto v : c) states += v;
        }
        if (states > static_cast<long double>(state_budget)) break;
        out.push_back(B.words(Lw, out.back()));
    }
    return out;
}

CylinderLevel full_shift_control(int k, double c) {
    if (k < 1) throw DomainError("full_shift_control: k must be positive");
    CylinderLevel L;
    L.depth = 2;
    std::vector<int> all(static_cast<size_t>(k));
    for (int x = 0; x < k; ++x) all[x] = x;
    const double m = std::exp(c / 2);
    for (int x = 0; x < k; ++x) {
        L.explicit_succ.push_back(all);
        L.mod_lo.push_back(m);
        L.mod_hi.push_back(m);
        L.mod_center.push_back(m);
    }
    return L;
}

namespace {

struct CW {
    double lo, hi;
    int iterations;
    bool converged;
};

CW spectral_bounds(const CylinderLevel& L, const std::vector<double>& mod, double s) {
    const size_t n = L.size();
    std::vector<double> wgt(n), x(n, 1.0), y(n);
    std::vector<long double> P(n + 1);  // long double keeps short range sums accurate
    for (size_t v = 0; v < n; ++v) wgt[v] = std::pow(mod[v], -2 * s);
    const bool expl = !L.explicit_succ.empty();
    CW r{0, INFINITY, 0, false};
    int stall = 0;
    constexpr int kCap = 100000;
    for (int it = 1; it <= kCap; ++it) {
        if (expl) {
            for (size_t v = 0; v < n; ++v) {
                double t = 0;
                for (int u : L.explicit_succ[v]) t += x[u];
                y[v] = wgt[v] * t;
            }
        } else {
            P[0] = 0;
            for (size_t v = 0; v < n; ++v) P[v + 1] = P[v] + x[v];
            for (size_t v = 0; v < n; ++v) y[v] = wgt[v] * static_cast<double>(P[L.succ_hi[v]] - P[L.succ_lo[v]]);
        }
        double lo = INFINITY, hi = 0, mx = 0;
        for (size_t v = 0; v < n; ++v) {
            double q = y[v] / x[v];
            lo = std::min(lo, q);
            hi = std::max(hi, q);
            mx = std::max(mx, y[v]);
        }
        if (lo > r.lo || hi < r.hi) stall = 0;
        else ++stall;
        r.lo = std::max(r.lo, lo);
        r.hi = std::min(r.hi, hi);
        r.iterations = it;
        if (r.hi - r.lo <= 1e-12 * r.hi) {
            r.converged = true;
            break;
        }
        if (stall >= 200) break;  // rounding floor
        for (size_t v = 0; v < n; ++v) x[v] = y[v] / mx;
    }
    return r;
}

}  // namespace

PressureEstimate pressure(const CylinderLevel& level, double s) {
    if (!(s > 0)) throw DomainError("pressure: s must be positive");
    PressureEstimate p;
    p.s = s;
    p.depth = level.depth;
    CW up = spectral_bounds(level, level.mod_lo, s);
    CW dn = spectral_bounds(level, level.mod_hi, s);
    CW mid = spectral_bounds(level, level.mod_center, s);
    p.upper = std::log(up.hi) + 1e-12;
    p.lower = std::log(dn.lo) - 1e-12;
    p.center = std::log(0.5 * (mid.lo + mid.hi));
    p.iterations = std::max({up.iterations, dn.iterations, mid.iterations});
    p.residual = std::max({(up.hi - up.lo) / up.hi, (dn.hi - dn.lo) / dn.hi, (mid.hi - mid.lo) / mid.hi});
    p.converged = up.converged && dn.converged && mid.converged;
    return p;
}

PressureEstimate pressure(const System& sys, double s, int depth) {
    if (depth < 2) throw DomainError("pressure: depth must be >= 2");
    auto levels = build_cylinder_levels(sys, depth, ~size_t{0});
    return pressure(levels.back(), s);
}

double periodic_pressure_estimate(const System& sys, double s, int N) {
    if (N < 1) throw DomainError("periodic_pressure_estimate: N must be positive");
    auto Z = [&](int len) {
        long double z = 0;
        for (int x = 0; x < sys.size(); ++x) {
            Word w{x};
            std::vector<Mat2> M{sys.branch[x].forward};
            auto rec = [&](auto&& self) -> void {
                if (static_cast<int>(w.size()) == len) {
                    if (!sys.A(w.back(), w.front())) return;
                    z += std::pow(static_cast<long double>(std::abs(expanding_eigenvalue(M.back().trace()))), -2.0L * s);
                    return;
                }
                for (int y : sys.A.successors(w.back())) {
                    w.push_back(y);
                    M.push_back(sys.branch[y].forward * M.back());
                    self(self);
                    M.pop_back();
                    w.pop_back();
                }
            };
            rec(rec);
        }
        return z;
    };
    return static_cast<double>(std::log(Z(N + 1) / Z(N)));
}

namespace {

double find_root(const std::function<double(double)>& f) {
    double a = 1e-3, b = 4.0;
    double fa = f(a), fb = f(b);
    while (fb > 0 && b < 64) {
        a = b;
        fa = fb;
        b *= 2;
        fb = f(b);
    }
    if (fa < 0 || fb > 0) throw DomainError("solve_delta: pressure has no sign change");
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(45), iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

DeltaResult solve_delta(const std::vector<CylinderLevel>& levels, double R, double tol) {
    if (levels.empty()) throw DomainError("solve_delta: no levels");
    if (!(tol >= 1e-4)) throw DomainError("solve_delta: tol must be >= 1e-4");
    DeltaResult d;
    d.R = R;
    d.lo = 0;
    d.hi = 2;
    for (const auto& L : levels) {
        // the lower pressure bound vanishes at or below delta, the upper one at or above
        double lo = find_root([&](double s) { return std::log(spectral_bounds(L, L.mod_hi, s).lo) - 1e-12; });
        double hi = find_root([&](double s) { return std::log(spectral_bounds(L, L.mod_lo, s).hi) + 1e-12; });
        d.lo = std::max(d.lo, lo);
        d.hi = std::min(d.hi, hi);
        d.delta = find_root([&](double s) {
            CW c = spectral_bounds(L, L.mod_center, s);
            return std::log(0.5 * (c.lo + c.hi));
        });
        d.depth = L.depth;
        d.certified = d.hi - d.lo <= tol;
        if (d.certified) break;
    }
    return d;
}

DeltaResult solve_delta(const System& sys, double tol, int max_depth, size_t state_budget) {
    return solve_delta(build_cylinder_levels(sys, max_depth, state_budget), sys.R, tol);
}

double alphabet_tail_bound(double R, double s) {
    if (!(s > 1)) throw DomainError("alphabet_tail_bound: s must exceed 1");
    const double r0 = R - 1;
    const i64 rmax = std::max<i64>(static_cast<i64>(std::ceil(R)) + 2, 400);
    double sum = 0;
    for (i64 x = -rmax; x <= rmax; ++x)
        for (i64 y = -rmax; y <= rmax; ++y) {
            const double n2 = static_cast<double>(x * x + y * y);
            if (n2 > r0 * r0 && n2 <= static_cast<double>(rmax * rmax)) sum += std::pow(n2, -s);
        }
    // lattice points beyond rmax, by the area integral
    sum += 2 * std::numbers::pi * std::pow(static_cast<double>(rmax), 2 - 2 * s) / (2 * s - 2);
    return sum;
}

namespace {

Word random_walk(const System& sys, std::mt19937_64& rng, int start, int len) {
    Word w;
    int x = start;
    if (x < 0) x = std::uniform_int_distribution<int>(0, sys.size() - 1)(rng);
    w.push_back(x);
    while (static_cast<int>(w.size()) < len) {
        const auto& su = sys.A.successors(w.back());
        w.push_back(su[std::uniform_int_distribution<size_t>(0, su.size() - 1)(rng)]);
    }
    return w;
}

Word close_up(const System& sys, const GlueTable& g, Word w) {
    if (!sys.A(w.back(), w.front())) {
        const auto& c = g.at(w.back(), w.front());
        w.insert(w.end(), c.begin(), c.end());
    }
    return w;
}

}  // namespace

namespace {

// Max over samples of |S_steps tau| differences for pairs sharing an itinerary prefix of length prefix.
double distortion(const System& sys, int prefix, int steps, int samples, std::uint64_t seed) {
    if (prefix < 1 || steps < 1 || samples < 1) throw DomainError("distortion check: arguments must be positive");
    std::mt19937_64 rng(seed);
    GlueTable g(sys.A);
    double worst = 0;
    for (int t = 0; t < samples; ++t) {
        Word b = random_walk(sys, rng, -1, prefix);
        Word x = random_walk(sys, rng, b.back(), 9), x0 = random_walk(sys, rng, b.back(), 9);
        Word u = b, u0 = b;
        u.insert(u.end(), x.begin() + 1, x.end());
        u0.insert(u0.end(), x0.begin() + 1, x0.end());
        u = close_up(sys, g, u);
        u0 = close_up(sys, g, u0);
        worst = std::max(worst, std::abs(orbit_birkhoff(sys, u, steps) - orbit_birkhoff(sys, u0, steps)));
    }
    return worst;
}

}  // namespace

double birkhoff_distortion_check(const System& sys, int M, int samples, std::uint64_t seed) {
    return distortion(sys, M, M, samples, seed);
}

double single_step_deviation(const System& sys, int k, int samples, std::uint64_t seed) {
    return distortion(sys, k, 1, samples, seed);
}

std::string pressure_csv_row(double R, const PressureEstimate& p) {
    std::ostringstream os;
    os << format_real(R) << ',' << format_real(p.s) << ',' << p.depth << ',' << format_real(p.lower) << ',' << format_real(p.upper)
       << ',' << format_real(p.center);
    return os.str();
}

}  // namespace geolab

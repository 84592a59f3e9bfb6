#include "geolab/hurwitz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace geolab {

namespace {

i128 sq(i128 x) { return x * x; }

}  // namespace

int Cline::sign_at(const RPoint& p) const {
    i128 X = p.X, Y = p.Y, D = p.D;
    i128 v = static_cast<i128>(A) * (sq(X) + sq(Y)) + 2 * D * (static_cast<i128>(Bre) * X + static_cast<i128>(Bim) * Y) +
             static_cast<i128>(C) * sq(D);
    return (v > 0) - (v < 0);
}

double Cline::eval(cplx z) const {
    return static_cast<double>(A) * std::norm(z) + 2.0 * (static_cast<double>(Bre) * z.real() + static_cast<double>(Bim) * z.imag()) +
           static_cast<double>(C);
}

Cline Cline::transformed(const Mat2& M) const {
    const Mat2 N = M.inverse();
    const GaussianInt a = N.a, b = N.b, c = N.c, d = N.d;
    const GaussianInt B{Bre, Bim};
    const GaussianInt Bc = conj(B);
    GaussianInt h11 = GaussianInt(A) * a * conj(a) + conj(a) * B * c + conj(c) * Bc * a + GaussianInt(C) * c * conj(c);
    GaussianInt h12 = GaussianInt(A) * conj(a) * b + conj(a) * B * d + conj(c) * Bc * b + GaussianInt(C) * conj(c) * d;
    GaussianInt h22 = GaussianInt(A) * b * conj(b) + conj(b) * B * d + conj(d) * Bc * b + GaussianInt(C) * d * conj(d);
    if (h11.im != 0 || h22.im != 0) throw CertificationError("cline transform produced a non-Hermitian form");
    return Cline{h11.re, h12.re, h12.im, h22.re};
}

Cline Cline::normalized() const {
    i64 g = std::gcd(std::gcd(A, Bre), std::gcd(Bim, C));
    if (g == 0) return *this;
    Cline r{A / g, Bre / g, Bim / g, C / g};
    i64 lead = r.A != 0 ? r.A : r.Bre != 0 ? r.Bre : r.Bim != 0 ? r.Bim : r.C;
    if (lead < 0) r = {-r.A, -r.Bre, -r.Bim, -r.C};
    return r;
}

bool contains(const Region& r, const RPoint& p) {
    for (const auto& sc : r)
        if (sc.cline.sign_at(p) != sc.sign) return false;
    return true;
}

bool contains(const Region& r, cplx z, double tol) {
    for (const auto& sc : r)
        if (sc.sign * sc.cline.eval(z) <= tol) return false;
    return true;
}

std::string to_string(Flag f) {
    switch (f) {
        case Flag::inside: return "inside";
        case Flag::outside: return "outside";
        case Flag::not_adjacent: return "not-adjacent";
    }
    return "not-adjacent";
}

double Box::half_diag() const { return 0.5 * std::hypot(x1 - x0, y1 - y0); }

double Box::min_modulus() const {
    double dx = x0 > 0 ? x0 : (x1 < 0 ? -x1 : 0.0);
    double dy = y0 > 0 ? y0 : (y1 < 0 ? -y1 : 0.0);
    return std::hypot(dx, dy);
}

double Box::max_modulus() const { return std::hypot(std::max(std::abs(x0), std::abs(x1)), std::max(std::abs(y0), std::abs(y1))); }

namespace {

// Squared distance range from c to the closed box.
std::pair<double, double> dist2_range(const Box& b, cplx c) {
    double cx = c.real(), cy = c.imag();
    double dx = cx < b.x0 ? b.x0 - cx : (cx > b.x1 ? cx - b.x1 : 0.0);
    double dy = cy < b.y0 ? b.y0 - cy : (cy > b.y1 ? cy - b.y1 : 0.0);
    double fx = std::max(std::abs(cx - b.x0), std::abs(cx - b.x1));
    double fy = std::max(std::abs(cy - b.y0), std::abs(cy - b.y1));
    return {dx * dx + dy * dy, fx * fx + fy * fy};
}

struct CircleCond {
    cplx center;
    int sign;  // +1 outside, -1 inside
};

enum class BoxStatus { violated, satisfied, mixed };

BoxStatus classify(const Box& b, const std::vector<CircleCond>& conds) {
    bool all = true;
    for (const auto& cc : conds) {
        auto [lo, hi] = dist2_range(b, cc.center);
        if (cc.sign > 0) {
            if (hi <= 1.0) return BoxStatus::violated;
            if (lo < 1.0) all = false;
        } else {
            if (lo >= 1.0) return BoxStatus::violated;
            if (hi > 1.0) all = false;
        }
    }
    return all ? BoxStatus::satisfied : BoxStatus::mixed;
}

void build_cover(const Box& b, const std::vector<CircleCond>& conds, int depth, int max_depth, std::vector<Box>& out,
                 std::vector<Box>& full) {
    BoxStatus s = classify(b, conds);
    if (s == BoxStatus::violated) return;
    if (s == BoxStatus::satisfied) {
        out.push_back(b);
        full.push_back(b);
        return;
    }
    if (depth == max_depth) {
        out.push_back(b);
        return;
    }
    double xm = (b.x0 + b.x1) / 2, ym = (b.y0 + b.y1) / 2;
    build_cover({b.x0, xm, b.y0, ym}, conds, depth + 1, max_depth, out, full);
    build_cover({xm, b.x1, b.y0, ym}, conds, depth + 1, max_depth, out, full);
    build_cover({b.x0, xm, ym, b.y1}, conds, depth + 1, max_depth, out, full);
    build_cover({xm, b.x1, ym, b.y1}, conds, depth + 1, max_depth, out, full);
}

constexpr int kCoverDepth = 6;
constexpr int kDeepDepth = 14;
constexpr i64 kDyadic = i64{1} << (kDeepDepth + 2);

RPoint dyadic_point(cplx z) {
    return {static_cast<i64>(std::llround(z.real() * kDyadic)), static_cast<i64>(std::llround(z.imag() * kDyadic)), kDyadic};
}

enum class Crossing { inside, outside, crosses };

Crossing cross_test(const Box& b, cplx c) {
    auto [lo, hi] = dist2_range(b, c);
    if (hi <= 1.0) return Crossing::inside;
    if (lo >= 1.0) return Crossing::outside;
    return Crossing::crosses;
}

}  // namespace

GaussianInt nearest_gaussian(cplx z) {
    double fx = std::floor(z.real()), fy = std::floor(z.imag());
    GaussianInt best;
    double bd = INFINITY;
    for (double x : {fx, fx + 1})
        for (double y : {fy, fy + 1}) {
            double d = std::norm(z - cplx(x, y));
            // candidates are visited in (re, im) order, so strict < keeps the smaller one on ties
            if (d < bd) {
                bd = d;
                best = {static_cast<i64>(x), static_cast<i64>(y)};
            }
        }
    return best;
}

bool in_X(cplx z) {
    return z.imag() > 0 && std::abs(z - cplx(0, 1)) > 1 && std::abs(z - cplx(1, 0)) > 1 && std::abs(z - cplx(-1, 0)) > 1;
}

cplx apply_fhat(cplx z) {
    double x2 = 2 * z.real(), y2 = 2 * z.imag();
    if (!(z.imag() > 0)) throw DomainError("apply_fhat: point not in the open upper half-plane");
    if (x2 == std::floor(x2) || y2 == std::floor(y2)) throw DomainError("apply_fhat: point on the removed half-integer grid");
    GaussianInt m = nearest_gaussian(z);
    cplx w = z - to_complex(m);
    return z.imag() > static_cast<double>(m.im) ? -1.0 / w : 1.0 / w;
}

int Partition::find(const std::array<i64, 4>& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? -1 : it->second;
}

int Partition::locate(cplx z) const {
    i64 k = static_cast<i64>(std::floor(2 * z.real())), l = static_cast<i64>(std::floor(2 * z.imag()));
    auto fl = [&](cplx c) { return std::abs(z - c) < 1 ? Flag::inside : Flag::outside; };
    for (Flag fp : {Flag::not_adjacent, fl({1, 1})})
        for (Flag fm : {Flag::not_adjacent, fl({-1, 1})}) {
            int lab = find({k, l, static_cast<i64>(fp), static_cast<i64>(fm)});
            if (lab >= 0 && contains(parts[lab].region, z)) return lab;
        }
    return -1;
}

std::string Partition::to_json() const {
    nlohmann::ordered_json j;
    j["radius"] = radius;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : parts) {
        nlohmann::ordered_json e;
        e["label"] = p.label;
        e["cell"] = {p.k, p.l};
        e["flags"] = {{"C(1+i)", to_string(p.flag_p)}, {"C(-1+i)", to_string(p.flag_m)}};
        e["round_target"] = {p.round_target.re, p.round_target.im};
        e["branch_sign"] = p.branch_sign;
        arr.push_back(std::move(e));
    }
    j["parts"] = std::move(arr);
    return j.dump(2) + "\n";
}

Partition build_partition(double R) {
    if (!(R >= 3)) throw DomainError("build_partition: R must be >= 3");
    Partition P;
    P.radius = R;
    const i64 K = static_cast<i64>(std::ceil(2 * R));
    const std::array<GaussianInt, 3> clip{GaussianInt{0, 1}, GaussianInt{1, 0}, GaussianInt{-1, 0}};
    const std::array<GaussianInt, 2> split{GaussianInt{1, 1}, GaussianInt{-1, 1}};
    for (i64 k = -K; k <= K; ++k) {
        for (i64 l = 0; l <= K; ++l) {
            Box cell{k / 2.0, (k + 1) / 2.0, l / 2.0, (l + 1) / 2.0};
            if (!(cell.max_modulus() < R)) continue;
            Region base{{Cline::vertical(k), 1}, {Cline::vertical(k + 1), -1}, {Cline::horizontal(l), 1}, {Cline::horizontal(l + 1), -1}};
            std::vector<CircleCond> base_conds;
            bool excluded = false;
            for (auto c : clip) {
                Crossing cr = cross_test(cell, to_complex(c));
                if (cr == Crossing::inside) excluded = true;
                if (cr == Crossing::crosses) {
                    base.push_back({Cline::unit_circle(c), 1});
                    base_conds.push_back({to_complex(c), 1});
                }
            }
            if (excluded) continue;
            std::array<std::vector<Flag>, 2> options;
            for (int s = 0; s < 2; ++s) {
                if (cross_test(cell, to_complex(split[s])) == Crossing::crosses) options[s] = {Flag::inside, Flag::outside};
                else options[s] = {Flag::not_adjacent};
            }
            for (Flag fp : options[0]) {
                for (Flag fm : options[1]) {
                    Part part;
                    part.k = k;
                    part.l = l;
                    part.flag_p = fp;
                    part.flag_m = fm;
                    part.region = base;
                    auto conds = base_conds;
                    Flag fs[2] = {fp, fm};
                    for (int s = 0; s < 2; ++s) {
                        if (fs[s] == Flag::not_adjacent) continue;
                        int sign = fs[s] == Flag::inside ? -1 : 1;
                        part.region.push_back({Cline::unit_circle(split[s]), sign});
                        conds.push_back({to_complex(split[s]), sign});
                    }
                    std::vector<Box> full;
                    build_cover(cell, conds, 0, kCoverDepth, part.cover, full);
                    if (part.cover.empty()) continue;  // every sub-box violates some condition: empty part
                    if (full.empty()) {
                        // Only boundary boxes survive, e.g. around a point where three clines meet.
                        // A nonempty open part contains a fully satisfied box at some depth.
                        std::vector<Box> deep, deep_full;
                        build_cover(cell, conds, 0, kDeepDepth, deep, deep_full);
                        if (deep_full.empty()) continue;
                        full = std::move(deep_full);
                    }
                    bool found = false;
                    if (!full.empty()) {
                        auto big = std::max_element(full.begin(), full.end(), [](const Box& a, const Box& b) {
                            return (a.x1 - a.x0) < (b.x1 - b.x0);
                        });
                        part.sample = dyadic_point(big->center());
                        found = contains(part.region, part.sample);
                    }
                    for (size_t t = 0; !found && t < part.cover.size(); ++t) {
                        part.sample = dyadic_point(part.cover[t].center());
                        found = contains(part.region, part.sample);
                    }
                    if (!found)
                        throw CertificationError("build_partition: cannot certify nonempty part at cell (" + std::to_string(k) +
                                                 "," + std::to_string(l) + ")");
                    part.round_target = {detail::floor_div(k + 1, 2), detail::floor_div(l + 1, 2)};
                    part.branch_sign = static_cast<int>(detail::floor_mod(l, 2));
                    P.parts.push_back(std::move(part));
                }
            }
        }
    }
    std::sort(P.parts.begin(), P.parts.end(), [](const Part& a, const Part& b) { return a.key() < b.key(); });
    for (size_t t = 0; t < P.parts.size(); ++t) {
        P.parts[t].label = static_cast<int>(t);
        P.index_[P.parts[t].key()] = static_cast<int>(t);
    }
    return P;
}

BranchMatrix branch_matrix(const Part& p) {
    const Mat2 S{{0}, {-1}, {1}, {0}};
    const Mat2 Q{{0, -1}, {0}, {0}, {0, 1}};
    const Mat2 T{{1}, -p.round_target, {0}, {1}};
    Mat2 f = p.branch_sign ? S * Q * T : S * T;
    return {f, f.inverse()};
}

Region part_image(const Part& p) {
    const Mat2 G = branch_matrix(p).forward;
    Region out;
    out.reserve(p.region.size());
    for (const auto& sc : p.region) out.push_back({sc.cline.transformed(G), sc.sign});
    return out;
}

bool is_partition_cline(const Cline& raw) {
    Cline c = raw.normalized();
    if (c.A == 0) {
        // Re z = -C/2 or Im z = -C/2
        return (c.Bre == 1 && c.Bim == 0) || (c.Bre == 0 && c.Bim == 1);
    }
    if (c.A != 1) return false;
    GaussianInt center{-c.Bre, -c.Bim};
    return norm(center) <= 2 && norm(center) - c.C == 1;
}

}  // namespace geolab

#include <fstream>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace geolab;
using testing::sys;

namespace {

// Every canonical cyclic word of length <= max_len with frobenius_sq < X^2, no pruning at all.
std::set<Word> brute_classes(const System& S, double X, int max_len, bool aperiodic_only) {
    std::set<Word> out;
    const double X2 = X * X;
    Word w;
    auto rec = [&](auto&& self, const Mat2& m) -> void {
        if (!w.empty() && S.A(w.back(), w.front()) && static_cast<double>(m.frobenius_sq()) < X2) {
            const auto c = canonical_periodic(S.A, w);
            if (c.word == w && (c.primitive || !aperiodic_only)) out.insert(w);
        }
        if (static_cast<int>(w.size()) == max_len) return;
        const auto next = w.empty() ? [&] {
            std::vector<int> all(static_cast<size_t>(S.size()));
            for (int x = 0; x < S.size(); ++x) all[x] = x;
            return all;
        }()
                                    : S.A.successors(w.back());
        for (int y : next) {
            w.push_back(y);
            self(self, S.branch[y].forward * m);
            w.pop_back();
        }
    };
    rec(rec, Mat2::identity());
    return out;
}

std::set<Word> words_of(const std::vector<GeodesicClass>& cs) {
    std::set<Word> s;
    for (const auto& g : cs) s.insert(g.word);
    return s;
}

}  // namespace

TEST_CASE("word matrices") {
    const System& S = sys(4);
    CHECK(word_to_matrix(S, {}) == Mat2::identity());
    for (int x = 0; x < S.size(); ++x) CHECK(word_to_matrix(S, {x}) == S.branch[x].forward);
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        const Word w = testing::random_word(S.A, 2 + t % 5, rng);
        Mat2 m;
        for (int x : w) m = S.branch[x].forward * m;
        CHECK(word_to_matrix(S, w) == m);
        CHECK(word_to_matrix(S, w).det() == GaussianInt(1));
    }
    // x then y acts as B_y B_x
    const int x = S.partition.locate({2.75, 0.25});
    CHECK(word_to_matrix(S, {x, x}) == S.branch[x].forward * S.branch[x].forward);
    for (int y = 0; y < S.size(); ++y)
        if (!S.A(x, y)) {
            CHECK_THROWS_AS(word_to_matrix(S, {x, y}), DomainError);
            break;
        }
}

TEST_CASE("length and holonomy") {
    const Mat2 m{2, 1, 1, 1};
    const auto lh = length_holonomy(m);
    CHECK(lh.length == doctest::Approx(2 * std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-14));
    CHECK(lh.length == doctest::Approx(1.92485).epsilon(1e-5));
    CHECK(lh.holonomy == 0);
    CHECK_THROWS_AS(length_holonomy(Mat2::identity()), DomainError);
    CHECK_THROWS_AS(length_holonomy(Mat2{1, 1, 0, 1}), DomainError);
    CHECK_THROWS_AS(length_holonomy(Mat2{0, -1, 1, 0}), DomainError);
    // trace 2i: lambda = i(1 + sqrt 2), holonomy pi
    const cplx lam = expanding_eigenvalue({0, 2});
    CHECK(std::abs(lam - cplx(0, 1 + std::sqrt(2.0))) < 1e-12);

    const System& S = sys(4);
    for (const auto& g : enumerate_ball(S, 8)) {
        CHECK(g.holonomy >= 0);
        CHECK(g.holonomy < 2 * std::numbers::pi);
        // ||m||^2 >= |lambda|^2 + |lambda|^-2 = 2 cosh l
        CHECK(static_cast<double>(g.matrix.frobenius_sq()) >= 2 * std::cosh(g.length) - 1e-9);
        const cplx lam2 = expanding_eigenvalue(g.trace);
        CHECK(std::abs(lam2 + 1.0 / lam2 - to_complex(g.trace)) < 1e-9);
    }
}

TEST_CASE("visual points are the fixed points") {
    const auto v = visual_points(Mat2{2, 1, 1, 1});
    CHECK_FALSE(v.at_infinity);
    CHECK(std::abs(v.alpha - (1 + std::sqrt(5.0)) / 2) < 1e-12);
    CHECK(std::abs(v.other - (1 - std::sqrt(5.0)) / 2) < 1e-12);
    CHECK_THROWS_AS(visual_points(Mat2{1, 1, 0, 1}), DomainError);
    for (const auto& g : enumerate_ball(sys(4), 8)) {
        const auto p = visual_points(g.matrix);
        CHECK(std::abs(g.matrix.mobius(p.alpha) - p.alpha) < 1e-8 * std::max(1.0, std::abs(p.alpha)));
        CHECK(std::abs(g.matrix.mobius(p.other) - p.other) < 1e-8 * std::max(1.0, std::abs(p.other)));
        CHECK(std::abs(p.alpha - p.other) > 1e-9);
    }
}

TEST_CASE("distance identity for the upper half-space action") {
    CHECK(hyperbolic_distance_identity_check(Mat2::identity()) < 1e-12);
    CHECK(hyperbolic_distance_identity_check(Mat2{2, 1, 1, 1}) < 1e-12);
    std::mt19937_64 rng(32);
    std::normal_distribution<double> n(0, 1.5);
    for (int t = 0; t < 200; ++t) {
        const cplx a{n(rng), n(rng)}, b{n(rng), n(rng)}, c{n(rng), n(rng)};
        if (std::abs(a) < 0.2) continue;
        const CMat2 m{a, b, c, (1.0 + b * c) / a};
        const double fro = std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d);
        CHECK(hyperbolic_distance_identity_check(m) < 1e-9 * fro);
    }
    for (const auto& g : enumerate_ball(sys(4), 8)) CHECK(hyperbolic_distance_identity_check(g.matrix) < 1e-9 * g.matrix.frobenius_sq());
}

TEST_CASE("dirichlet forms") {
    const auto f = dirichlet_form(Mat2{2, 1, 1, 1});
    CHECK(f.A == GaussianInt(1));
    CHECK(f.B == GaussianInt(-1));
    CHECK(f.C == GaussianInt(-1));
    CHECK(f.disc() == GaussianInt(5));
    CHECK(f.content == GaussianInt(1));
    CHECK_THROWS_AS(dirichlet_form(Mat2::identity()), DomainError);
    for (const auto& g : enumerate_ball(sys(4), 8)) {
        const auto d = dirichlet_form(g.matrix);
        // disc(form) * content^2 = t^2 - 4 up to the square of the normalizing unit
        const GaussianInt lhs = d.disc() * d.content * d.content;
        CHECK((lhs == g.discriminant || lhs == -g.discriminant));
    }
}

TEST_CASE("fundamental eligibility") {
    CHECK(is_fundamental_eligible(5));
    CHECK(is_fundamental_eligible(-1 + 4));  // 3 = -1 mod 4
    CHECK_FALSE(is_fundamental_eligible({3, 4}));
    CHECK_FALSE(is_fundamental_eligible(4));
    CHECK_FALSE(is_fundamental_eligible(2));
    CHECK_THROWS_AS(is_fundamental_eligible(0), DomainError);
}

TEST_CASE("class invariants") {
    const System& S = sys(4);
    std::mt19937_64 rng(33);
    for (int t = 0; t < 100; ++t) {
        const Word w = testing::random_cyclic_word(S.A, 1 + t % 6, rng);
        const Mat2 m = word_to_matrix(S, w);
        const GaussianInt tr = m.trace();
        // (t - 2)(t + 2) = t^2 - 4
        CHECK((tr - GaussianInt(2)) * (tr + GaussianInt(2)) == tr * tr - GaussianInt(4));
        // rotations are conjugates
        for (size_t r = 1; r < w.size(); ++r) {
            Word rot(w.begin() + static_cast<long>(r), w.end());
            rot.insert(rot.end(), w.begin(), w.begin() + static_cast<long>(r));
            CHECK(word_to_matrix(S, rot).trace() == tr);
        }
        // conjugation by an arbitrary element keeps the trace
        const Mat2 g = S.branch[rng() % S.size()].forward;
        CHECK((g * m * g.inverse()).trace() == tr);
        // powers: tr(m^2) = t^2 - 2, length doubles
        Word sq = w;
        sq.insert(sq.end(), w.begin(), w.end());
        const Mat2 m2 = word_to_matrix(S, sq);
        CHECK(m2.trace() == tr * tr - GaussianInt(2));
        if (std::abs(std::abs(expanding_eigenvalue(tr)) - 1) > 1e-6) {
            CHECK(length_holonomy(m2).length == doctest::Approx(2 * length_holonomy(m).length).epsilon(1e-9));
            const auto c = make_class(S, canonical_periodic(S.A, w).word, true);
            CHECK(c.trace == tr);
            CHECK(c.length == doctest::Approx(length_holonomy(m).length).epsilon(1e-12));
        }
    }
}

TEST_CASE("ball enumeration agrees with the reference and brute force") {
    const System& S = sys(4);
    for (double X : {6.0, 8.0}) {
        for (bool aper : {true, false}) {
            const auto a = enumerate_ball(S, X, aper);
            const auto b = enumerate_ball(S, X, aper, 1, Pruning::geometric);
            const auto brute = brute_classes(S, X, 5, aper);
            CHECK(words_of(a) == words_of(b));
            CHECK(words_of(a) == brute);
            CHECK(a.size() == brute.size());
        }
        CHECK(count_ball_words(S, X) == count_ball_words(S, X, Pruning::geometric));
    }
    const auto c6 = enumerate_ball(S, 6);
    CHECK(c6.size() == 66);
    const auto c8 = enumerate_ball(S, 8);
    CHECK(c8.size() == 204);
    for (size_t k = 1; k < c8.size(); ++k) {
        const auto& p = c8[k - 1].word;
        const auto& q = c8[k].word;
        CHECK((p.size() < q.size() || (p.size() == q.size() && p < q)));
    }
    for (const auto& g : c8) {
        CHECK(g.primitive);
        CHECK(static_cast<double>(g.matrix.frobenius_sq()) < 64);
        CHECK(canonical_periodic(S.A, g.word).word == g.word);
    }
    CHECK_THROWS_AS(enumerate_ball(S, 1.0), DomainError);
    // the pruned search visits far fewer nodes
    BallStats m, r;
    visit_ball(S, 8, true, [](const Word&, const Mat2&) {}, Pruning::matrix, &m);
    visit_ball(S, 8, true, [](const Word&, const Mat2&) {}, Pruning::geometric, &r);
    CHECK(m.emitted == r.emitted);
    CHECK(m.nodes < r.nodes);
}

TEST_CASE("golden enumeration at R=4, X=16") {
    // produced by enumerate_ball(make_system(4), 16, true, 1, Pruning::geometric)
    std::ifstream in(std::string(GEOLAB_TEST_DATA) + "/golden_r4_x16.csv");
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    const System& S = sys(4);
    const auto golden = parse_geodesics_csv(S, ss.str());
    CHECK(golden.size() == 1764);
    const auto got = enumerate_ball(S, 16);
    CHECK(geodesics_csv(got) == ss.str());
    CHECK(geodesics_csv(enumerate_ball(S, 16, true, 4)) == ss.str());
    CHECK(matrix_collisions(got) == 2);
}

TEST_CASE("csv round trip") {
    const System& S = sys(4);
    const auto cs = enumerate_ball(S, 8);
    const std::string csv = geodesics_csv(cs);
    const auto back = parse_geodesics_csv(S, csv);
    CHECK(geodesics_csv(back) == csv);
    CHECK_THROWS_AS(parse_geodesics_csv(S, "nope\n"), DomainError);
    std::string bad = csv;
    const auto pos = bad.find('\n') + 1;
    const auto comma = bad.find("\",", pos) + 2;
    bad.insert(comma, "9");  // corrupt the trace column
    CHECK_THROWS_AS(parse_geodesics_csv(S, bad), DomainError);
}

TEST_CASE("format_real round trips") {
    for (double x : {0.0, 1.0, 1.9248473002384139, 1e-300, 2.0 / 3.0}) CHECK(std::stod(format_real(x)) == x);
}

#include "support.hpp"

#include "geolab/charsums.hpp"

using namespace geolab;

namespace {

std::shared_ptr<const ResidueRing> ring(GaussianInt q) { return std::make_shared<const ResidueRing>(q); }

Xi random_xi(std::mt19937_64& rng, i64 span = 20) {
    std::uniform_int_distribution<i64> d(-span, span);
    return {GaussianInt{d(rng), d(rng)}, GaussianInt{d(rng), d(rng)}, GaussianInt{d(rng), d(rng)}, GaussianInt{d(rng), d(rng)}};
}

}  // namespace

TEST_CASE("additive characters") {
    for (GaussianInt q : {GaussianInt{1, 1}, GaussianInt{2, 1}, GaussianInt{3, 0}, GaussianInt{3, 1}}) {
        auto R = ring(q);
        const i64 n = R->size();
        const auto chars = all_characters(R);
        CHECK(static_cast<i64>(chars.size()) == n);
        for (const auto& chi : chars) {
            for (i64 u = 0; u < n; ++u)
                for (i64 v = 0; v < n; ++v) CHECK(std::abs(chi(R->add(u, v)) - chi(u) * chi(v)) < 1e-12);
            cplx s = 0;
            for (i64 u = 0; u < n; ++u) s += chi(u);
            CHECK(std::abs(s - (chi.trivial() ? cplx(static_cast<double>(n)) : cplx(0))) < 1e-9);
        }
        // distinct characters are orthogonal
        for (size_t i = 0; i < chars.size(); ++i)
            for (size_t j = 0; j < chars.size(); ++j) {
                cplx s = 0;
                for (i64 u = 0; u < n; ++u) s += chars[i](u) * std::conj(chars[j](u));
                CHECK(std::abs(s - (i == j ? cplx(static_cast<double>(n)) : cplx(0))) < 1e-9);
            }
    }
}

TEST_CASE("character orders") {
    CHECK(characters_of_order(ring({2, 1}), 5).size() == 4);
    CHECK(characters_of_order(ring(3), 3).size() == 8);
    // Z[i]/((1+i)(2+i)) is cyclic of order 10
    auto R = ring(GaussianInt(1, 1) * GaussianInt(2, 1));
    CHECK(characters_of_order(R, 1).size() == 1);
    CHECK(characters_of_order(R, 2).size() == 1);
    CHECK(characters_of_order(R, 5).size() == 4);
    CHECK(characters_of_order(R, 10).size() == 4);
    CHECK_THROWS_AS(characters_of_order(R, 3), DomainError);
    // Z[i]/(2) has exponent 2
    CHECK(characters_of_order(ring(2), 2).size() == 3);
    CHECK(characters_of_order(ring(2), 4).empty());
}

TEST_CASE("kloosterman sums") {
    auto R = ring({2, 1});
    const auto chi = standard_character(R);
    // 2 + 2 cos(4 pi / 5)
    CHECK(std::abs(kloosterman(chi, R->one(), R->one()) - cplx(0.3819660112501051, 0)) < 1e-12);
    CHECK_THROWS_AS(kloosterman(make_character(R, 0), 1, 1), DomainError);
    CHECK_THROWS_AS(standard_character(ring(3 * GaussianInt(1, 1))), DomainError);

    for (GaussianInt p : gaussian_primes_up_to(25)) {
        auto F = ring(p);
        const i64 n = F->size();
        for (const auto& chi : all_characters(F)) {
            if (chi.trivial()) continue;
            for (i64 a : F->units()) {
                // Ramanujan sum
                CHECK(std::abs(kloosterman(chi, a, 0) - cplx(-1)) < 1e-9);
                for (i64 b : F->units()) {
                    const cplx k = kloosterman(chi, a, b);
                    CHECK(std::abs(k) <= 2 * std::sqrt(static_cast<double>(n)) + 1e-9);
                    CHECK(std::abs(k - kloosterman(chi, b, a)) < 1e-9);
                    CHECK(std::abs(k - kloosterman(chi, F->one(), F->mul(a, b))) < 1e-9);
                    CHECK(std::abs(k.imag()) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("charsum over SL2") {
    std::mt19937_64 rng(61);
    // trivial character: the group order
    for (GaussianInt q : {GaussianInt{1, 1}, GaussianInt{2, 1}, GaussianInt{3, 0}}) {
        auto R = ring(q);
        const cplx s = sl2_charsum_direct(make_character(R, 0), random_xi(rng));
        CHECK(std::abs(s - cplx(static_cast<double>(sl2_order_formula(q)))) < 1e-9);
    }

    // the c = 0 stratum vanishes once chi(y .) is nontrivial
    for (GaussianInt p : {GaussianInt{2, 1}, GaussianInt{3, 0}, GaussianInt{3, 2}}) {
        auto R = ring(p);
        const auto chi = standard_character(R);
        const auto group = enumerate_sl2(p);
        for (int t = 0; t < 20; ++t) {
            Xi xi = random_xi(rng);
            if (R->reduce(xi[1]) == 0) xi[1] = 1;  // y a unit
            CHECK(std::abs(sl2_charsum_c0(chi, group, xi)) < 1e-9);
        }
    }

    // nontrivial linear forms obey 2 N^{3/2}
    for (GaussianInt p : {GaussianInt{1, 1}, GaussianInt{2, 1}}) {
        auto R = ring(p);
        const i64 n = R->size();
        const auto group = enumerate_sl2(p);
        const double bound = 2 * std::pow(static_cast<double>(n), 1.5);
        for (const auto& chi : all_characters(R)) {
            if (chi.trivial()) continue;
            for (i64 x = 0; x < n; ++x)
                for (i64 y = 0; y < n; ++y)
                    for (i64 z = 0; z < n; ++z)
                        for (i64 w = 0; w < n; ++w) {
                            if (x == 0 && y == 0 && z == 0 && w == 0) continue;
                            const Xi xi{R->rep(x), R->rep(y), R->rep(z), R->rep(w)};
                            CHECK(std::abs(sl2_charsum_direct(chi, group, xi)) <= bound + 1e-9);
                        }
        }
    }
    {
        auto R = ring(3);
        const auto chi = standard_character(R);
        const auto group = enumerate_sl2(3);
        for (int t = 0; t < 300; ++t) {
            const Xi xi = random_xi(rng);
            bool zero = true;
            for (const auto& e : xi) zero = zero && R->reduce(e) == 0;
            if (zero) continue;
            CHECK(std::abs(sl2_charsum_direct(chi, group, xi)) <= 2 * std::pow(9.0, 1.5) + 1e-9);
        }
    }
}

TEST_CASE("strata evaluation matches the direct sum") {
    std::mt19937_64 rng(62);
    for (GaussianInt p : gaussian_primes_up_to(25)) {
        auto R = ring(p);
        const auto group = enumerate_sl2(p);
        for (const auto& chi : all_characters(R))
            for (int t = 0; t < 5; ++t) {
                const Xi xi = random_xi(rng);
                CHECK(std::abs(sl2_charsum_strata(chi, xi) - sl2_charsum_direct(chi, group, xi)) < 1e-7);
            }
    }
    for (GaussianInt q : {GaussianInt{1, 1} * GaussianInt{2, 1}, GaussianInt{1, 1} * GaussianInt{1, 2}, GaussianInt{1, 1} * GaussianInt{3, 0},
                          GaussianInt{2, 1} * GaussianInt{1, 2}}) {
        auto R = ring(q);
        const auto group = enumerate_sl2(q);
        const auto chars = all_characters(R);
        for (int t = 0; t < 12; ++t) {
            const auto& chi = chars[rng() % chars.size()];
            const Xi xi = random_xi(rng);
            const cplx direct = sl2_charsum_direct(chi, group, xi);
            CHECK(std::abs(sl2_charsum_strata(chi, xi) - direct) < 1e-6);
            // CRT: the sum factors through the prime restrictions
            cplx prod = 1;
            for (auto [p, e] : factor(q).factors) prod *= sl2_charsum_direct(restrict_to_prime(chi, p), xi);
            CHECK(std::abs(prod - direct) < 1e-6);
        }
    }
    CHECK_THROWS_AS(restrict_to_prime(make_character(ring({2, 1}), 1), 3), DomainError);
}

TEST_CASE("margins csv") {
    MarginRow r;
    r.q = {2, 1};
    r.character_index = 3;
    r.xi = {GaussianInt(1), GaussianInt(0), GaussianInt(0, 1), GaussianInt(2)};
    r.abs_sum = 1.5;
    r.bound = 4;
    CHECK(r.margin() == 2.5);
    const std::string csv = charsum_margins_csv({r});
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(csv.find("\"2+i\",3,\"1;0;i;2\",1.5,4,2.5\n") != std::string::npos);
}

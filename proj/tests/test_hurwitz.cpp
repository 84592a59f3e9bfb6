#include <set>

#include "support.hpp"

using namespace geolab;
using testing::interior_point;
using testing::sys;

TEST_CASE("nearest gaussian integer") {
    CHECK(nearest_gaussian({0.3, 0.4}) == GaussianInt(0));
    CHECK(nearest_gaussian({2.6, 0.2}) == GaussianInt(3));
    CHECK(nearest_gaussian({1.5, 0.25}) == GaussianInt(1));
    CHECK(nearest_gaussian({-0.5, 0.5}) == GaussianInt(-1, 0));
}

TEST_CASE("apply_fhat") {
    const cplx a = apply_fhat({2.3, 0.2});
    CHECK(a.real() == doctest::Approx(-2.307692307692).epsilon(1e-10));
    CHECK(a.imag() == doctest::Approx(1.538461538462).epsilon(1e-10));
    const cplx b = apply_fhat({2.75, 0.25});
    CHECK(std::abs(b - cplx(2, 2)) < 1e-12);
    // below the round target the 1/w branch still lands in the upper half-plane
    CHECK(apply_fhat({2.2, 0.7}).imag() > 0);
    CHECK_THROWS_AS(apply_fhat({2.5, 0.2}), DomainError);
    CHECK_THROWS_AS(apply_fhat({2.2, 1.0}), DomainError);
}

TEST_CASE("partition geometry") {
    CHECK_THROWS_AS(build_partition(2.5), DomainError);
    for (double R : {3.0, 4.0, 5.0}) {
        const Partition& P = sys(R).partition;
        for (const auto& p : P.parts) {
            // whole closed cell within the open ball
            const double far = std::max(std::abs(cplx(p.k / 2.0, p.l / 2.0)), std::abs(cplx((p.k + 1) / 2.0, (p.l + 1) / 2.0)));
            const double far2 = std::max(std::abs(cplx(p.k / 2.0, (p.l + 1) / 2.0)), std::abs(cplx((p.k + 1) / 2.0, p.l / 2.0)));
            CHECK(std::max(far, far2) < R);
            const cplx s = p.sample.to_complex();
            CHECK(contains(p.region, p.sample));
            CHECK(in_X(s));
            CHECK(nearest_gaussian(s) == p.round_target);
            CHECK(P.locate(s) == p.label);
        }
    }
}

TEST_CASE("square part left of 3") {
    CHECK(build_partition(3.0).locate({2.75, 0.25}) < 0);
    for (double R : {3.05, 3.5, 4.0}) {
        const Partition P = build_partition(R);
        const int x = P.locate({2.75, 0.25});
        REQUIRE(x >= 0);
        const Part& p = P.parts[x];
        CHECK(p.k == 5);
        CHECK(p.l == 0);
        CHECK(p.flag_p == Flag::not_adjacent);
        CHECK(p.flag_m == Flag::not_adjacent);
    }
}

TEST_CASE("partitions are nested in R") {
    size_t last = 0;
    for (double R : {3.0, 4.0, 5.0, 6.0}) {
        const Partition& P = sys(R).partition;
        CHECK(P.size() >= last);
        last = P.size();
        const Partition& Q = sys(R + 1 > 6 ? 6.0 : R + 1).partition;
        for (const auto& p : P.parts) CHECK(Q.find(p.key()) >= 0);
    }
}

TEST_CASE("branch matrices") {
    const Partition& P = sys(4).partition;
    const int x = P.locate({2.75, 0.25});
    REQUIRE(x >= 0);
    const BranchMatrix b = branch_matrix(P.parts[x]);
    CHECK(P.parts[x].round_target == GaussianInt(3));
    CHECK(P.parts[x].branch_sign == 0);
    CHECK(b.forward == Mat2{0, -1, 1, -3});
    CHECK(b.inverse == Mat2{-3, 1, -1, 0});

    std::mt19937_64 rng(11);
    for (const auto& p : P.parts) {
        const BranchMatrix m = branch_matrix(p);
        CHECK(m.forward.det() == GaussianInt(1));
        CHECK(m.forward * m.inverse == Mat2::identity());
        for (int t = 0; t < 20; ++t) {
            auto z = interior_point(p, rng);
            REQUIRE(z);
            const cplx f = apply_fhat(*z);
            CHECK(std::abs(m.forward.mobius(*z) - f) < 1e-12 * std::max(1.0, std::abs(f)));
            // expanding: |fhat'| = 1/|z - [z]|^2 > 1, and the image lies in the upper half-plane
            CHECK(std::abs(*z - to_complex(p.round_target)) < 1.0);
            CHECK(f.imag() > 0);
            // the inverse branch in S-coordinates: |f'(w)| = 1/|w|^2 < 1 at w = -1/fhat(z)
            const cplx w = -1.0 / f;
            CHECK(std::abs(w.real()) <= 0.5 + 1e-12);
            CHECK(w.imag() <= 0.5 + 1e-12);
        }
    }
}

TEST_CASE("part images have exact coefficients and respect the Markov property") {
    const System& S = sys(4);
    std::mt19937_64 rng(12);
    std::vector<std::vector<cplx>> pts(S.partition.size());
    for (const auto& q : S.partition.parts)
        for (int t = 0; t < 4; ++t) {
            auto z = interior_point(q, rng);
            REQUIRE(z);
            pts[q.label].push_back(*z);
        }
    for (const auto& p : S.partition.parts) {
        const Region img = part_image(p);
        // boundaries go to boundaries of the partition or the real axis
        for (const auto& sc : img) CHECK((is_partition_cline(sc.cline) || sc.cline.normalized() == Cline::horizontal(0)));
        for (const auto& q : S.partition.parts) {
            int in = 0;
            for (cplx z : pts[q.label]) in += contains(img, z);
            // all or nothing, and in agreement with the transition matrix
            CHECK((in == 0 || in == 4));
            CHECK((in == 4) == S.A(p.label, q.label));
        }
    }
    // the square part left of 3 lies inside its own image
    const int x = S.partition.locate({2.75, 0.25});
    CHECK(S.A(x, x));
}

TEST_CASE("clines transform exactly") {
    const Cline c = Cline::unit_circle({1, 1});
    const Mat2 m{0, -1, 1, -3};
    const Cline t = c.transformed(m);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0, 6.283185307179586);
    for (int k = 0; k < 20; ++k) {
        const cplx z = cplx(1, 1) + std::polar(1.0, u(rng));
        const cplx w = m.mobius(z);
        CHECK(std::abs(t.eval(w)) < 1e-9 * std::max(1.0, std::norm(w)));
    }
}

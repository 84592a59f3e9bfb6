#include <set>

#include "support.hpp"

using namespace geolab;
using testing::sys;

TEST_CASE("structure of the subshift") {
    for (double R : {4.0, 5.0, 6.0}) {
        const auto st = check_irreducible_aperiodic(sys(R).A);
        CHECK(st.irreducible);
        CHECK(st.period == 1);
        REQUIRE(st.primitivity_index);
        CHECK(*st.primitivity_index <= 3);
    }
}

TEST_CASE("synthetic cycles and reducible matrices") {
    const TransitionMatrix cyc({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    auto st = check_irreducible_aperiodic(cyc);
    CHECK(st.irreducible);
    CHECK(st.period == 3);
    CHECK_FALSE(st.primitivity_index);

    const TransitionMatrix red({{1, 1}, {0, 1}});
    st = check_irreducible_aperiodic(red);
    CHECK_FALSE(st.irreducible);
    CHECK_FALSE(st.primitivity_index);

    // full shift on 2 symbols: primitive at once
    st = check_irreducible_aperiodic(TransitionMatrix({{1, 1}, {1, 1}}));
    CHECK(st.primitivity_index == 1);
}

TEST_CASE("word enumeration and counting") {
    const auto& A = sys(4).A;
    int n0 = 0;
    enumerate_words(A, 0, [&](const Word& w) { n0 += w.empty(); });
    CHECK(n0 == 1);
    u64 n1 = 0;
    enumerate_words(A, 1, [&](const Word&) { ++n1; });
    CHECK(n1 == static_cast<u64>(A.size()));
    u64 n2 = 0;
    enumerate_words(A, 2, [&](const Word& w) {
        CHECK(is_admissible(A, w));
        ++n2;
    });
    CHECK(n2 == static_cast<u64>(A.ones()));
    CHECK(count_words(A, 2) == n2);

    u64 n3 = 0;
    Word prev;
    bool ordered = true;
    enumerate_words(A, 3, [&](const Word& w) {
        if (!prev.empty() && !(prev < w)) ordered = false;
        prev = w;
        ++n3;
    });
    CHECK(ordered);
    CHECK(count_words(A, 3) == n3);

    // splitting at a middle letter: the matrix power identity
    for (int x : {0, 7, 33})
        for (int z : {1, 40, 79}) {
            u64 sum = 0;
            for (int y = 0; y < A.size(); ++y) sum += count_words(A, 3, x, y) * count_words(A, 3, y, z);
            CHECK(count_words(A, 5, x, z) == sum);
        }
    u64 fixed = 0;
    enumerate_words(A, 4, [&](const Word&) { ++fixed; }, 3, 10);
    CHECK(count_words(A, 4, 3, 10) == fixed);
}

TEST_CASE("admissibility") {
    const auto& A = sys(4).A;
    CHECK(is_admissible(A, {}));
    CHECK(is_admissible(A, {0}));
    CHECK_FALSE(is_admissible(A, {-1}));
    CHECK_FALSE(is_admissible(A, {A.size()}));
    for (int x = 0; x < A.size(); ++x)
        for (int y = 0; y < A.size(); ++y) CHECK(is_admissible(A, {x, y}) == A(x, y));
}

TEST_CASE("glue table") {
    const auto& A = sys(4).A;
    const GlueTable G(A);
    for (int x = 0; x < A.size(); ++x)
        for (int y = 0; y < A.size(); ++y) {
            const auto& g = G.at(x, y);
            CHECK(is_admissible(A, {x, g[0], g[1], g[2], y}));
        }
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
        const Word a = testing::random_word(A, 1 + t % 7, rng), b = testing::random_word(A, 1 + t % 5, rng);
        const Word w = glue(a, b, G);
        CHECK(is_admissible(A, w));
        CHECK(w.size() == a.size() + b.size() + 3);
        CHECK(glue(a, b, G) == w);
        CHECK(std::equal(a.begin(), a.end(), w.begin()));
        CHECK(std::equal(b.rbegin(), b.rend(), w.rbegin()));
    }
}

TEST_CASE("canonical periodic words") {
    const auto& A = sys(4).A;
    std::mt19937_64 rng(22);
    for (int t = 0; t < 200; ++t) {
        const Word w = testing::random_cyclic_word(A, 1 + t % 9, rng);
        const PeriodicWord c = canonical_periodic(A, w);
        CHECK(canonical_periodic(A, c.word).word == c.word);
        for (size_t r = 0; r < w.size(); ++r) {
            Word rot(w.begin() + static_cast<long>(r), w.end());
            rot.insert(rot.end(), w.begin(), w.begin() + static_cast<long>(r));
            CHECK(canonical_periodic(A, rot).word == c.word);
            CHECK(c.word <= rot);
        }
        CHECK(c.primitive == (smallest_period(w) == static_cast<int>(w.size())));
        Word sq = w;
        sq.insert(sq.end(), w.begin(), w.end());
        CHECK_FALSE(canonical_periodic(A, sq).primitive);
    }
    CHECK(smallest_period({1, 2, 1, 2}) == 2);
    CHECK(smallest_period({1, 2, 1}) == 3);
    CHECK(smallest_period({4}) == 1);
}

TEST_CASE("transitions agree across radii by key") {
    const System& S4 = sys(4);
    const System& S5 = sys(5);
    for (const auto& p : S4.partition.parts)
        for (const auto& q : S4.partition.parts) {
            const int x = S5.partition.find(p.key()), y = S5.partition.find(q.key());
            REQUIRE(x >= 0);
            REQUIRE(y >= 0);
            CHECK(S4.A(p.label, q.label) == S5.A(x, y));
        }
}

TEST_CASE("transitions csv") {
    const auto& A = sys(4).A;
    const std::string csv = transitions_csv(A);
    CHECK(csv.rfind("from_label,to_label\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == A.ones() + 1);
}

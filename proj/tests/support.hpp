#pragma once

#include <doctest.h>

#include <map>
#include <optional>
#include <random>

#include "geolab/geodesics.hpp"

namespace testing {

using namespace geolab;

inline const System& sys(double R) {
    static std::map<double, System> cache;
    auto it = cache.find(R);
    if (it == cache.end()) it = cache.emplace(R, make_system(R)).first;
    return it->second;
}

// Rejection sample inside the part (strictly interior, float geometry).
inline std::optional<cplx> interior_point(const Part& p, std::mt19937_64& rng, int tries = 400) {
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < tries; ++t) {
        const Box& b = p.cover[rng() % p.cover.size()];
        const cplx z{b.x0 + (b.x1 - b.x0) * u(rng), b.y0 + (b.y1 - b.y0) * u(rng)};
        if (contains(p.region, z, 1e-9)) return z;
    }
    return std::nullopt;
}

inline Word random_word(const TransitionMatrix& A, int n, std::mt19937_64& rng) {
    Word w{static_cast<int>(rng() % A.size())};
    while (static_cast<int>(w.size()) < n) {
        const auto& s = A.successors(w.back());
        w.push_back(s[rng() % s.size()]);
    }
    return w;
}

// Random word that also closes up cyclically.
inline Word random_cyclic_word(const TransitionMatrix& A, int n, std::mt19937_64& rng) {
    for (;;) {
        Word w = random_word(A, n, rng);
        if (A(w.back(), w.front())) return w;
    }
}

}  // namespace testing

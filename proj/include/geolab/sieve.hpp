#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geolab/congruence.hpp"

namespace geolab {

struct SiftingSet {
    double R = 0, X = 0, Y = 0, Z = 0;
    int l_x = 0, l_z = 0;
    std::shared_ptr<const System> sys;  // alphabet of all stored words: radius max(R, 8)
    std::shared_ptr<const GlueTable> glue;
    std::vector<Word> xi, aleph, omega;
    std::vector<Mat2> xi_m, aleph_m, omega_m;

    u64 size() const { return static_cast<u64>(xi.size()) * aleph.size() * omega.size(); }
    double N() const { return X * Y * Z; }
    Word glued(size_t i, size_t j, size_t k) const;
    Mat2 glued_matrix(size_t i, size_t j, size_t k) const;
    // Splits a glued word back into (i, j, k); nullopt if it is not of that shape.
    std::optional<std::array<size_t, 3>> decompose(const Word& w) const;
};

SiftingSet build_sifting_set(double R, double X, double Y, double Z);

// Glued words of the whole set; throws LimitError above max_size.
std::vector<Word> materialize(const SiftingSet& s, u64 max_size = 5'000'000);

struct UCount {
    GaussianInt q;
    u64 U = 0;                  // triples with tr^2 = 4 mod q
    std::vector<u64> by_trace;  // triples per trace residue index
    u64 U_from_levels = 0;      // sum of by_trace over t with t^2 = 4
};
UCount count_U(const SiftingSet& s, GaussianInt q);
// Same count from materialized glued words with exact traces (small sets only).
u64 count_U_materialized(const SiftingSet& s, GaussianInt q, u64 max_size = 5'000'000);

struct LedgerRow {
    GaussianInt q;
    u64 U = 0;
    Rational beta;
    double main = 0;       // beta |Pi|
    double remainder = 0;  // U - main
};
struct SieveLedger {
    u64 pi_size = 0;
    std::vector<LedgerRow> rows;
    double abs_remainder_sum = 0;
    double health() const { return pi_size ? abs_remainder_sum / static_cast<double>(pi_size) : 0; }
};
// Square-free moduli up to associates with norm <= Q (the unit modulus included).
std::vector<GaussianInt> squarefree_moduli(i64 Q);
SieveLedger sieve_ledger(const SiftingSet& s, i64 Q);
std::string ledger_csv(const SieveLedger& l);

// max ||pi(w)|| / (X Y Z) over the set, or over an evenly spaced sample of max_scan triples.
// glue_factor is the largest ||g1|| ||g2|| over the glue pairs that occur.
struct BallConstant {
    double C = 0;
    double glue_factor = 1;
    double C_reduced() const { return C / glue_factor; }
    bool sampled = false;
};
BallConstant measure_ball_constant(const SiftingSet& s, u64 max_scan = 2'000'000);

// Triples whose tr^2 - 4 has no Gaussian prime factor of norm <= z (direct filtering).
u64 count_almost_prime(const SiftingSet& s, i64 z, u64 max_size = 5'000'000);

struct MertensResult {
    double n = 0;
    double sum = 0;           // over Gaussian primes up to associates with norm <= n
    double value = 0;         // sum - log log n
    double split_sum = 0;     // rational primes p = 1 mod 4, 1/p
    double inert_sum = 0;     // rational primes p = 3 mod 4, 1/p
    std::optional<Rational> exact;  // when the denominators stay small
};
MertensResult mertens_check(double n);

// beta(p) from the closed form: (roots of 4) (1 + 1/(N^2 - 1)) / N.
Rational beta_closed_form(GaussianInt p);

struct DimensionProduct {
    double product = 1, reference = 1, ratio = 1;  // reference = (log z / log w)^2
};
DimensionProduct dimension_product(double w, double z);

// Canonical square-free test of t^2 - 4 through t - 2 and t + 2.
bool squarefree_disc_shortcut(GaussianInt t);

struct HarvestResult {
    double R = 0, X = 0;
    std::map<GaussianInt, i64> multiplicity;  // trace -> number of classes
    std::vector<GaussianInt> T;                // traces with t^2 - 4 square-free
    std::vector<GaussianInt> D;                // distinct discriminants t^2 - 4 over T
    i64 classes = 0;
    i64 above_threshold = 0;                   // t in T with M(t) >= N(t)^(2 delta - 2 - 2 eta)
};
HarvestResult harvest(const std::vector<GeodesicClass>& classes, double R, double X, double delta, double eta);
HarvestResult harvest(const System& sys, double X, double delta, double eta);
std::string harvest_csv(const HarvestResult& h);

// #{s in SL2(Z[i]) : frobenius_sq(s) < X^2} per trace, by brute force (X <= 12).
std::map<GaussianInt, i64> ball_trace_fibers(double X);

}  // namespace geolab

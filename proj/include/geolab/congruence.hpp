#pragma once

#include <boost/rational.hpp>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "geolab/geodesics.hpp"

namespace geolab {

using Rational = boost::rational<i64>;

// Largest norm for which SL2(Z[i]/(q)) is enumerated.
inline constexpr i64 kMaxEnumNorm = 200;

// Entries are ResidueRing indices.
struct SL2Elem {
    std::int32_t a = 0, b = 0, c = 0, d = 0;
    friend auto operator<=>(const SL2Elem&, const SL2Elem&) = default;
};

SL2Elem reduce_matrix(const ResidueRing& R, const Mat2& m);
SL2Elem sl2_mul(const ResidueRing& R, const SL2Elem& x, const SL2Elem& y);
SL2Elem sl2_identity(const ResidueRing& R);
bool is_sl2(const ResidueRing& R, const SL2Elem& x);

// Visits SL2(Z[i]/(q)) in lexicographic order of (a, b, c, d) indices.
void for_each_sl2(const ResidueRing& R, const std::function<void(const SL2Elem&)>& visit);
std::vector<SL2Elem> enumerate_sl2(GaussianInt q);
// Product of N(p)^3 - N(p) over the prime divisors of a square-free q.
i64 sl2_order_formula(GaussianInt q);

// Lexicographic index of each element, for binning.
class SL2Index {
public:
    explicit SL2Index(GaussianInt q);
    const ResidueRing& ring() const { return ring_; }
    const std::vector<SL2Elem>& elements() const { return elems_; }
    i64 size() const { return static_cast<i64>(elems_.size()); }
    i64 index_of(const SL2Elem& x) const;

private:
    ResidueRing ring_;
    std::vector<SL2Elem> elems_;
    std::unordered_map<u64, i64> index_;
};

// Counts of SL2 elements by trace residue index; q must be a Gaussian prime.
std::vector<i64> trace_distribution(GaussianInt p);
i64 trace_fiber_count(GaussianInt p, GaussianInt t);
Rational rho_t(GaussianInt p, GaussianInt t);
// Number of t with t^2 = 4 mod p, by squaring every residue.
i64 roots_of_four(GaussianInt p);
Rational beta(GaussianInt q);

struct EquidistReport {
    GaussianInt q;
    double X = 0;
    std::vector<i64> counts;  // per class, lexicographic order
    i64 total = 0;
    double expected = 0;
    double max_rel_dev = 0;
    double l2_dev = 0;            // root mean square of relative deviations
    double trace_max_rel_dev = 0; // same, over trace-level sets (prime q only, else 0)
    i64 classes_hit = 0;
};

EquidistReport equidist_stats(const std::vector<GeodesicClass>& classes, GaussianInt q, double X);
EquidistReport equidist_stats(const System& sys, double X, GaussianInt q);
std::string equidist_csv(double R, const EquidistReport& r);

struct GeneratorWitness {
    std::string name;
    Mat2 target;
    std::vector<int> word;  // letters; negative entries -1-x stand for the inverse of branch x
    bool found = false;
};

struct GeneratorCheck {
    std::vector<GeneratorWitness> witnesses;
    bool all_found = false;
    i64 states = 0;
    bool onto_sl2_1_plus_i = false;
};

// Breadth-first search over products of branch matrices and their inverses, up to sign.
GeneratorCheck verify_generators(const System& sys, int max_depth = 12, i64 frob_cap = 64);
// Product of the witness letters, in the order written.
Mat2 witness_product(const System& sys, const std::vector<int>& word);

}  // namespace geolab

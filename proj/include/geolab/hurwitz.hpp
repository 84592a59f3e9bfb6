#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "geolab/mat2.hpp"

namespace geolab {

// Point (X + iY)/D with D > 0.
struct RPoint {
    i64 X = 0, Y = 0, D = 1;
    cplx to_complex() const { return {static_cast<double>(X) / D, static_cast<double>(Y) / D}; }
};

// Generalized circle A|z|^2 + 2Re(conj(B) z) + C = 0, i.e. the Hermitian form
// [[A, B], [conj(B), C]] evaluated at (z, 1). Integer coefficients throughout.
struct Cline {
    i64 A = 0, Bre = 0, Bim = 0, C = 0;

    static Cline vertical(i64 k) { return {0, 1, 0, -k}; }      // Re z = k/2
    static Cline horizontal(i64 l) { return {0, 0, 1, -l}; }    // Im z = l/2
    static Cline unit_circle(GaussianInt c) { return {1, -c.re, -c.im, norm(c) - 1}; }  // |z - c| = 1

    bool is_line() const { return A == 0; }
    // Sign of the form at an exact point.
    int sign_at(const RPoint& p) const;
    double eval(cplx z) const;
    // Cline of the image set under z -> M z (det M = 1); the form's sign is preserved.
    Cline transformed(const Mat2& M) const;
    // Divide by the content and make the first nonzero coefficient positive.
    Cline normalized() const;
    friend bool operator==(const Cline&, const Cline&) = default;
    friend auto operator<=>(const Cline&, const Cline&) = default;
};

// Region condition: sign(F(z)) == sign.
struct SignedCline {
    Cline cline;
    int sign = 1;
};
using Region = std::vector<SignedCline>;

bool contains(const Region& r, const RPoint& p);
// Float test with a relative margin: true when every condition holds with |F| > tol.
bool contains(const Region& r, cplx z, double tol = 0.0);

enum class Flag : std::uint8_t { inside = 0, outside = 1, not_adjacent = 2 };
std::string to_string(Flag f);

// Axis-aligned closed box used for conservative covers of parts.
struct Box {
    double x0, x1, y0, y1;
    cplx center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
    double half_diag() const;
    double min_modulus() const;
    double max_modulus() const;
};

struct Part {
    int label = -1;
    i64 k = 0, l = 0;                     // cell [k/2,(k+1)/2) x [l/2,(l+1)/2)
    Flag flag_p = Flag::not_adjacent;     // relative to C(1+i)
    Flag flag_m = Flag::not_adjacent;     // relative to C(-1+i)
    GaussianInt round_target;
    int branch_sign = 0;
    Region region;                        // defining strict conditions
    RPoint sample;                        // exact interior point
    std::vector<Box> cover;               // boxes whose union contains the part

    std::array<i64, 4> key() const { return {k, l, static_cast<i64>(flag_p), static_cast<i64>(flag_m)}; }
};

struct BranchMatrix {
    Mat2 forward, inverse;
};

struct Partition {
    double radius = 0;
    std::vector<Part> parts;

    size_t size() const { return parts.size(); }
    // Label of the part with the given key, or -1.
    int find(const std::array<i64, 4>& key) const;
    // Label of the part containing z (float geometry), or -1.
    int locate(cplx z) const;
    std::string to_json() const;

private:
    std::map<std::array<i64, 4>, int> index_;
    friend Partition build_partition(double R);
};

GaussianInt nearest_gaussian(cplx z);
cplx apply_fhat(cplx z);
bool in_X(cplx z);

Partition build_partition(double R);
BranchMatrix branch_matrix(const Part& p);
Region part_image(const Part& p);

// True if the cline is a boundary of the partition grid: Re z = k/2, Im z = l/2,
// or |z - c| = 1 with N(c) <= 2 (the circles that can meet or bound X).
bool is_partition_cline(const Cline& c);

}  // namespace geolab

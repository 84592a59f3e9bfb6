#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geolab/subshift.hpp"

namespace geolab {

// Partition, transitions and branch matrices for one radius.
struct System {
    double R = 0;
    Partition partition;
    TransitionMatrix A;
    std::vector<BranchMatrix> branch;
    std::vector<double> min_modulus;       // per part, lower bound over its closure
    std::vector<double> succ_min_modulus;  // per letter, min over successor parts
    std::vector<std::vector<Box>> succ_cells;  // per letter, cell boxes of successor parts

    int size() const { return static_cast<int>(partition.size()); }
};

System make_system(double R);

Mat2 word_to_matrix(const System& sys, const Word& w);

struct LengthHolonomy {
    double length = 0;
    double holonomy = 0;  // in [0, 2 pi)
};
LengthHolonomy length_holonomy(const Mat2& m);
// Eigenvalue of modulus > 1 of a loxodromic matrix.
cplx expanding_eigenvalue(GaussianInt trace);

struct VisualPoints {
    cplx alpha, other;
    bool at_infinity = false;  // c = 0: alpha is the finite fixed point, other is infinity
};
VisualPoints visual_points(const Mat2& m);

struct CMat2 {
    cplx a{1}, b{0}, c{0}, d{1};
};
// |2 cosh d(j, m.j) - ||m||^2| using the quaternion action on upper half-space.
double hyperbolic_distance_identity_check(const CMat2& m);
double hyperbolic_distance_identity_check(const Mat2& m);

struct DirichletForm {
    GaussianInt A, B, C;   // A x^2 + B x y + C y^2
    GaussianInt content;   // gcd removed from (c, d - a, -b)
    GaussianInt disc() const { return B * B - GaussianInt(4) * A * C; }
};
DirichletForm dirichlet_form(const Mat2& m);

bool is_fundamental_eligible(GaussianInt D);

struct GeodesicClass {
    Word word;
    Mat2 matrix;
    GaussianInt trace, discriminant;
    double length = 0, holonomy = 0;
    bool primitive = true;
    bool squarefree_disc = false;
    bool fundamental_eligible = false;
};

GeodesicClass make_class(const System& sys, const Word& canonical_word, bool primitive);

enum class Pruning {
    matrix,    // bound from the prefix matrix and the successor geometry
    geometric  // bound from per-letter minimal moduli only (reference)
};

struct BallStats {
    u64 nodes = 0;
    u64 emitted = 0;
};

// Visits canonical cyclically admissible words whose matrix has frobenius_sq < X^2,
// in lexicographic order of the word. Non-primitive necklaces are included only
// when aperiodic_only is false.
void visit_ball(const System& sys, double X, bool aperiodic_only, const std::function<void(const Word&, const Mat2&)>& visit,
                Pruning pruning = Pruning::matrix, BallStats* stats = nullptr, int first_letter = -1);

// All classes, sorted by (word length, word). Work is split by first letter across workers.
std::vector<GeodesicClass> enumerate_ball(const System& sys, double X, bool aperiodic_only = true, int workers = 1,
                                          Pruning pruning = Pruning::matrix);

// Number of nonempty admissible words (not necessarily cyclic) whose matrix has frobenius_sq < X^2.
u64 count_ball_words(const System& sys, double X, Pruning pruning = Pruning::matrix);
// Visits those words in lexicographic order.
void visit_ball_words(const System& sys, double X, const std::function<void(const Word&, const Mat2&)>& visit,
                      Pruning pruning = Pruning::matrix);

std::string geodesics_csv(const std::vector<GeodesicClass>& classes);
std::vector<GeodesicClass> parse_geodesics_csv(const System& sys, const std::string& text);

// Pairs of distinct classes with identical matrices (coding collisions).
size_t matrix_collisions(const std::vector<GeodesicClass>& classes);

std::string format_real(double x);

}  // namespace geolab

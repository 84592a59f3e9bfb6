#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geolab/geodesics.hpp"

namespace geolab {

// tau(z) = log|fhat'(z)| = 2 log|fhat(z)| > 0 for z in X. Throws on the removed boundary.
double tau(cplx z);
// S_n tau along n steps of fhat starting at z.
double birkhoff_sum(cplx z, int n);

// Fixed point of a loxodromic matrix at which its Mobius map expands (|c z + d| < 1).
cplx repelling_fixed_point(const Mat2& m);
// Point whose itinerary is w repeated forever; w must be cyclically admissible.
cplx periodic_point(const System& sys, const Word& w);
// S_n tau at the periodic point of w, summed over the orbit (each orbit point solved separately).
double periodic_birkhoff_sum(const System& sys, const Word& w);

// States of the depth-n approximation are admissible words of length n-1 in
// lexicographic order. Each state carries bounds on |z| over its cylinder; the
// weight of the state at parameter s is |z|^(-2s).
struct CylinderLevel {
    int depth = 0;
    std::vector<std::uint32_t> succ_lo, succ_hi;  // successors form a contiguous index range
    std::vector<std::vector<int>> explicit_succ;  // used instead when states are single letters
    std::vector<double> mod_lo, mod_hi, mod_center;

    size_t size() const { return mod_lo.size(); }
};

// Levels for depths 2..max_depth, stopping early once a level would exceed state_budget.
std::vector<CylinderLevel> build_cylinder_levels(const System& sys, int max_depth, size_t state_budget = 8'000'000);

// Full shift on k symbols with constant tau = c; P(s) = log k - s c.
CylinderLevel full_shift_control(int k, double c);

struct PressureEstimate {
    double s = 0;
    int depth = 0;
    double lower = 0, upper = 0;  // rigorous bracket for P(s) = log(leading eigenvalue)
    double center = 0;
    int iterations = 0;
    double residual = 0;  // worst relative Collatz-Wielandt gap among the three runs
    bool converged = true;
};

PressureEstimate pressure(const CylinderLevel& level, double s);
PressureEstimate pressure(const System& sys, double s, int depth);

// Brute-force periodic-orbit estimate log(Z_{N+1}/Z_N), Z_N = sum over cyclically
// admissible words of length N of exp(-s * length).
double periodic_pressure_estimate(const System& sys, double s, int N);

struct DeltaResult {
    double R = 0;
    double delta = 0;  // root of the center estimate
    double lo = 0, hi = 0;
    bool certified = false;
    int depth = 0;
};

DeltaResult solve_delta(const System& sys, double tol = 1e-4, int max_depth = 5, size_t state_budget = 8'000'000);
DeltaResult solve_delta(const std::vector<CylinderLevel>& levels, double R, double tol);

// Sum of |z|^(-2s) over Gaussian integers with |z| > R - 1 (s > 1).
double alphabet_tail_bound(double R, double s);

// Max |S_M tau(b||x) - S_M tau(b||x0)| over random words b of length M and random continuations.
double birkhoff_distortion_check(const System& sys, int M, int samples, std::uint64_t seed = 1);
// Max |tau(x) - tau(x0)| over random pairs sharing an itinerary prefix of length k.
double single_step_deviation(const System& sys, int k, int samples, std::uint64_t seed = 1);

std::string pressure_csv_row(double R, const PressureEstimate& p);

}  // namespace geolab

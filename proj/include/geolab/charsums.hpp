#pragma once

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "geolab/congruence.hpp"

namespace geolab {

// chi_mu(z) = e(Re(mu z / q)) on Z[i]/(q); every additive character has this form.
struct AdditiveCharacter {
    std::shared_ptr<const ResidueRing> ring;
    i64 multiplier = 0;     // ring index of mu
    i64 order = 1;          // additive order of mu
    std::vector<cplx> values;

    cplx operator()(i64 z) const { return values[z]; }
    bool trivial() const { return order == 1; }
};

AdditiveCharacter make_character(std::shared_ptr<const ResidueRing> ring, i64 multiplier);
std::vector<AdditiveCharacter> all_characters(std::shared_ptr<const ResidueRing> ring);
std::vector<AdditiveCharacter> characters_of_order(std::shared_ptr<const ResidueRing> ring, i64 q);
// Prime modulus: z = x + y i -> e((x + y r)/p) with r the image of i when the residue field
// is Z/p, and z -> e(2x/p) (the field trace) when it is F_{p^2}.
AdditiveCharacter standard_character(std::shared_ptr<const ResidueRing> ring);

// Sum over units c of chi(a c + b c^-1); a, b are ring indices.
cplx kloosterman(const AdditiveCharacter& chi, i64 a, i64 b);

using Xi = std::array<GaussianInt, 4>;  // (x, y, z, w); s.xi = a x + b y + c z + d w

cplx sl2_charsum_direct(const AdditiveCharacter& chi, const std::vector<SL2Elem>& group, const Xi& xi);
cplx sl2_charsum_direct(const AdditiveCharacter& chi, const Xi& xi);
// Only the elements with c = 0.
cplx sl2_charsum_c0(const AdditiveCharacter& chi, const std::vector<SL2Elem>& group, const Xi& xi);
// Evaluation through the c = 0 / c != 0 split and the Kloosterman identity on each
// prime factor; the composite case is the product over prime factors.
cplx sl2_charsum_strata(const AdditiveCharacter& chi, const Xi& xi);

// Character of Z[i]/(p) given by u -> chi(e_p u), e_p the CRT idempotent of the prime factor p.
AdditiveCharacter restrict_to_prime(const AdditiveCharacter& chi, GaussianInt p);

struct MarginRow {
    GaussianInt q;
    i64 character_index = 0;
    Xi xi{};
    double abs_sum = 0, bound = 0;
    double margin() const { return bound - abs_sum; }
};
std::string charsum_margins_csv(const std::vector<MarginRow>& rows);

}  // namespace geolab

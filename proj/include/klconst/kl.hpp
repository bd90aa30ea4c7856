#pragma once

#include <cstddef>
#include <vector>

#include "klconst/types.hpp"

namespace klconst {

// Per-antenna KL divergence D(f(Y|s_i) || f(Y|s_k)) in closed form, computed
// directly from the two signal vectors.
double kl_full(const SignalPoint& s_i, const SignalPoint& s_k, double sigma2);

// The same divergence split into a direction term and an energy term.
struct KlTerms {
    double direction = 0; // D1, vanishes for equal directions
    double energy = 0;    // D2, vanishes for equal amplitudes
    double total() const { return direction + energy; }
};

KlTerms kl_decomposed(double alpha_k, const CVector& v_k, double alpha_i, const CVector& v_i, double sigma2);

// x - ln x - 1 with x = (sigma2 + energy_i) / (sigma2 + energy_k).
double energy_divergence(double energy_i, double energy_k, double sigma2);

// alpha^4 / (sigma2 (sigma2 + alpha^2)), strictly increasing in alpha >= 0.
double intra_gain(double alpha, double sigma2);

// 1/r - ln(1/r) - 1, the divergence from a level to the next one up when their
// noise-inflated energies differ by the factor r.
double ratio_divergence(double r);

// Minimum KL distance inside one level: intra_gain(alpha) * t_v. Infinite when
// the level holds a single direction.
double d_intra(double alpha, double t_v, double sigma2);

// KL distance from level alpha_n1 to level alpha_n2 (order matters).
double d_inter(double alpha_n1, double alpha_n2, double sigma2);

// min over distinct pairs of 1 - |<v_i, v_k>|^2; +inf for a single vector.
double min_squared_chordal(const std::vector<CVector>& vectors);

struct MinKl {
    double value = 0;
    std::size_t i = 0; // first argument of kl_full
    std::size_t k = 0;
};

// Exhaustive minimum of kl_full over all ordered pairs of distinct indices.
// Ties go to the lexicographically smallest (i, k).
MinKl min_kl_bruteforce(const MultiLevelConstellation& c, double sigma2);

} // namespace klconst

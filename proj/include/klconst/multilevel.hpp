#pragma once

#include <vector>

#include "klconst/types.hpp"
#include "klconst/unitary.hpp"

namespace klconst {

inline constexpr double kDefaultBisectionEps = 1e-12;

struct BisectionResult {
    double r0 = 1;                 // common ratio of consecutive noise-inflated level energies
    double alpha0 = 1;             // lowest amplitude
    int iterations = 0;
    double residual_equality = 0;  // |D_intra(W_0) - inter distance of consecutive levels|
    double residual_power = 0;     // |mean alpha_i^2 - 1|
    double r_upper = 1;            // upper end of the initial bracket (alpha0 = 0 there)
};

// Sum_{i<n} r^i, evaluated stably near r = 1.
double geometric_sum(double r, int n);

// alpha_0^2 implied by the power constraint for ratio r and 2^{l_alpha} levels;
// the analytic limit 1 is used for |r - 1| < 1e-13.
double lowest_level_energy(double r, double sigma2, int l_alpha);

// Largest r whose implied alpha_0^2 is still nonnegative, i.e. the root of
// geometric_sum(r, N) = N (1 + sigma2) / sigma2, located by doubling r - 1 and
// then bisecting to 1e-12 (or to adjacent doubles).
double ratio_upper_bound(double sigma2, int l_alpha);

// Balances the lowest level's intra distance alpha_0^4 t_v / (sigma2 (sigma2 +
// alpha_0^2)) against the consecutive-level distance 1/r - ln(1/r) - 1 under
// the power constraint, by bisection on r in [1, r_u] until the bracket is
// narrower than eps. Requires 0 < t_v < inf and l_alpha >= 1.
BisectionResult solve_bisection(double sigma2, int l_alpha, double t_v, double eps = kDefaultBisectionEps);

// Amplitudes sqrt((sigma2 + alpha0^2) r^i - sigma2), i < 2^{l_alpha}.
LevelSet build_level_set(const BisectionResult& res, double sigma2, int l_alpha);

// On-off style levels: alpha_0 = 0 and the largest admissible ratio.
LevelSet energy_only_levels(double sigma2, int l_alpha);

struct AllocationRow {
    int l_alpha = 0;
    double min_kl = 0;
    double r0 = 0;      // NaN when the row has a single level
    double alpha0 = 1;
};

// Best multi-level constellation for a fixed split l_alpha + l_v.
struct FixedDesign {
    MultiLevelConstellation constellation;
    AllocationRow row;
};

// Objective cases:
//   l_alpha = 0          -> single level alpha = 1, value t_v / (sigma2 (sigma2 + 1))
//   directions.size()==1 -> energy_only_levels, value = consecutive-level distance
//   otherwise            -> solve_bisection, value = min of the two balanced terms
FixedDesign design_fixed(double sigma2, int l_alpha, const UnitarySet& directions,
                         double eps = kDefaultBisectionEps);

struct DesignOutcome {
    int l_alpha = 0;
    MultiLevelConstellation constellation;
    double min_kl = 0;
    std::vector<AllocationRow> table; // one row per l_alpha = 0..l_s
};

// Evaluates every split l_alpha + l_v = l_s and keeps the one with the highest
// minimum KL distance, preferring fewer levels on ties. The library must hold
// a 2^{l_v}-vector set for every l_v in 0..l_s (ConfigError otherwise).
DesignOutcome allocate_bits(int l_s, double sigma2, const UnitaryLibrary& library,
                            double eps = kDefaultBisectionEps);

} // namespace klconst

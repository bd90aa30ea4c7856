#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "klconst/io.hpp"
#include "klconst/types.hpp"

namespace klconst {

struct PackingConfig {
    int K = 2;
    std::size_t cardinality = 2;
    int restarts = 6;
    int iterations = 1500;
    // Final soft-min sharpness. The schedule starts at min(smoothing, 5) and
    // sharpens geometrically to this value on the last iteration.
    double smoothing = 4000.0;
    std::uint64_t seed = 1;

    void validate() const;
};

// Minimum squared chordal distance min_{i != k} (1 - |v_k^T v_i^*|^2); +inf for
// a single vector. Throws InvalidArgument on non-unit input.
double t_v_of(const std::vector<CVector>& vectors);
double t_v_of(const UnitarySet& set);

// Upper bound on t_v for N lines in C^K: 1 if N <= K, else
// 1 - (N - K) / (K (N - 1)).
double welch_limit(int K, std::size_t N);

struct PackingReport {
    UnitarySet best;
    std::vector<double> restart_t_v;    // exact t_v reached by each restart
    std::vector<double> best_so_far;    // running max over restarts
};

// Random restarts of projected gradient ascent on a soft-min of the pairwise
// squared chordal distances. Every restart is scored by its exact t_v; the
// earliest restart wins ties.
PackingReport pack_unitary(const PackingConfig& cfg);
UnitarySet optimize_unitary(const PackingConfig& cfg);

// Direction sets indexed by l_v, holding 2^{l_v} vectors each.
using UnitaryLibrary = std::map<int, UnitarySet>;

// l_v = 0 maps to {e_0}; every other entry comes from optimize_unitary with
// seed + l_v and the remaining settings of `base`.
UnitaryLibrary build_unitary_library(int K, int max_l_v, const PackingConfig& base = {});

} // namespace klconst

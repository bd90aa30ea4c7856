#include "klconst/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "klconst/errors.hpp"
#include "klconst/kl.hpp"
#include "klconst/rng.hpp"

namespace klconst {

namespace {

constexpr double kStartSharpness = 5.0;
constexpr double kStartStep = 0.2;
constexpr double kEndStep = 1e-4;

std::vector<CVector> random_directions(int K, std::size_t n, PhiloxStream& rng) {
    std::vector<CVector> out(n, CVector(K));
    for (auto& v : out) {
        for (int j = 0; j < K; ++j) v(j) = rng.complex_normal();
        v.normalize();
    }
    return out;
}

// One ascent run; returns the vectors with the best exact t_v seen.
std::vector<CVector> ascend(std::vector<CVector> vs, const PackingConfig& cfg, double& best_t) {
    const std::size_t n = vs.size();
    const int iters = cfg.iterations;
    const double beta0 = std::min(cfg.smoothing, kStartSharpness);
    const double beta_growth = iters > 1 ? std::pow(cfg.smoothing / beta0, 1.0 / (iters - 1)) : 1.0;
    const double step_decay = iters > 1 ? std::pow(kEndStep / kStartStep, 1.0 / (iters - 1)) : 1.0;

    std::vector<CVector> best = vs;
    best_t = min_squared_chordal(vs);

    std::vector<double> dist(n * n);
    std::vector<cdouble> inner(n * n);
    std::vector<CVector> grad(n, CVector(cfg.K));
    double beta = beta0;
    double step = kStartStep;
    for (int it = 0; it < iters; ++it, beta *= beta_growth, step *= step_decay) {
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cdouble c = vs[q].dot(vs[p]); // v_q^H v_p
                inner[p * n + q] = c;
                inner[q * n + p] = std::conj(c);
                const double d = 1.0 - std::norm(c);
                dist[p * n + q] = d;
                dmin = std::min(dmin, d);
            }
        }
        if (dmin > best_t) {
            best_t = dmin;
            best = vs;
        }

        for (auto& g : grad) g.setZero();
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                // Softmax weight of this pair in the soft-min; constant
                // normalisation drops out after the step rescaling below.
                const double w = std::exp(-beta * (dist[p * n + q] - dmin));
                grad[p] -= (2.0 * w) * inner[p * n + q] * vs[q];
                grad[q] -= (2.0 * w) * inner[q * n + p] * vs[p];
            }
        }
        double gmax = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            grad[p] -= vs[p] * vs[p].dot(grad[p]); // tangent to the sphere
            gmax = std::max(gmax, grad[p].norm());
        }
        if (gmax == 0.0) break;
        for (std::size_t p = 0; p < n; ++p) {
            vs[p] += (step / gmax) * grad[p];
            vs[p].normalize();
        }
    }
    const double last = min_squared_chordal(vs);
    if (last > best_t) {
        best_t = last;
        best = vs;
    }
    return best;
}

} // namespace

void PackingConfig::validate() const {
    if (K < 1) throw InvalidArgument("packing: K must be >= 1");
    if (!is_power_of_two(cardinality)) throw InvalidArgument("packing: cardinality must be a power of two");
    if (restarts < 1) throw InvalidArgument("packing: restarts must be >= 1");
    if (iterations < 1) throw InvalidArgument("packing: iterations must be >= 1");
    if (!(smoothing > 0.0)) throw InvalidArgument("packing: smoothing must be positive");
}

double t_v_of(const std::vector<CVector>& vectors) {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (std::abs(vectors[i].norm() - 1.0) > kUnitNormTol) {
            throw InvalidArgument("vector " + std::to_string(i) + " is not unit norm");
        }
    }
    return min_squared_chordal(vectors);
}

double t_v_of(const UnitarySet& set) { return t_v_of(set.vectors()); }

double welch_limit(int K, std::size_t N) {
    if (K < 1 || N < 1) throw InvalidArgument("welch_limit needs K >= 1 and N >= 1");
    const auto k = static_cast<double>(K);
    const auto n = static_cast<double>(N);
    if (N <= static_cast<std::size_t>(K)) return 1.0;
    return 1.0 - (n - k) / (k * (n - 1.0));
}

PackingReport pack_unitary(const PackingConfig& cfg) {
    cfg.validate();
    if (cfg.cardinality == 1) {
        auto single = UnitarySet::single(cfg.K);
        return {single, {single.t_v()}, {single.t_v()}};
    }
    std::vector<CVector> best;
    double best_t = -1.0;
    std::vector<double> per_restart, running;
    for (int r = 0; r < cfg.restarts; ++r) {
        PhiloxStream rng(cfg.seed, static_cast<std::uint64_t>(r));
        double t = 0.0;
        auto vs = ascend(random_directions(cfg.K, cfg.cardinality, rng), cfg, t);
        per_restart.push_back(t);
        if (t > best_t) {
            best_t = t;
            best = std::move(vs);
        }
        running.push_back(best_t);
    }
    return {UnitarySet(cfg.K, std::move(best)), std::move(per_restart), std::move(running)};
}

UnitarySet optimize_unitary(const PackingConfig& cfg) { return pack_unitary(cfg).best; }

UnitaryLibrary build_unitary_library(int K, int max_l_v, const PackingConfig& base) {
    if (max_l_v < 0) throw InvalidArgument("max_l_v must be >= 0");
    UnitaryLibrary lib;
    lib.emplace(0, UnitarySet::single(K));
    for (int l_v = 1; l_v <= max_l_v; ++l_v) {
        PackingConfig cfg = base;
        cfg.K = K;
        cfg.cardinality = std::size_t{1} << l_v;
        cfg.seed = base.seed + static_cast<std::uint64_t>(l_v);
        lib.emplace(l_v, optimize_unitary(cfg));
    }
    return lib;
}

} // namespace klconst

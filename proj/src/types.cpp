#include "klconst/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "klconst/errors.hpp"
#include "klconst/kl.hpp"

namespace klconst {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
    if (!is_power_of_two(n)) {
        throw InvalidArgument("cardinality " + std::to_string(n) + " is not a power of two");
    }
    int b = 0;
    while ((std::size_t{1} << b) < n) ++b;
    return b;
}

ChannelParams::ChannelParams(int M_, int K_, double sigma2_) : M(M_), K(K_), sigma2(sigma2_) {
    if (M < 1) throw InvalidArgument("M must be >= 1");
    if (K < 1) throw InvalidArgument("K must be >= 1");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("sigma2 must be positive");
}

double ChannelParams::snr_db() const { return 10.0 * std::log10(snr()); }

double snr_db_to_sigma2(int K, double snr_db) {
    const double snr_linear = std::pow(10.0, snr_db / 10.0);
    return 1.0 / (K * snr_linear);
}

ChannelParams ChannelParams::from_snr_db(int M, int K, double snr_db) {
    return ChannelParams(M, K, snr_db_to_sigma2(K, snr_db));
}

SignalPoint::SignalPoint(double amplitude, CVector direction)
    : amplitude_(amplitude), direction_(std::move(direction)) {
    if (!(amplitude_ >= 0.0) || !std::isfinite(amplitude_)) {
        throw InvalidArgument("amplitude must be a finite nonnegative real");
    }
    if (direction_.size() == 0) throw InvalidArgument("direction must be non-empty");
    if (std::abs(direction_.norm() - 1.0) > kUnitNormTol) {
        throw InvalidArgument("direction is not unit norm");
    }
}

CVector canonical_direction(int K) {
    if (K < 1) throw InvalidArgument("K must be >= 1");
    CVector e = CVector::Zero(K);
    e(0) = 1.0;
    return e;
}

UnitarySet::UnitarySet(int K, std::vector<CVector> vectors) : K_(K), vectors_(std::move(vectors)) {
    if (K_ < 1) throw InvalidArgument("K must be >= 1");
    bits_ = log2_exact(vectors_.size());
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        if (vectors_[i].size() != K_) {
            throw InvalidArgument("vector " + std::to_string(i) + " has length " +
                                  std::to_string(vectors_[i].size()) + ", expected " + std::to_string(K_));
        }
        if (std::abs(vectors_[i].norm() - 1.0) > kUnitNormTol) {
            throw InvalidArgument("vector " + std::to_string(i) + " is not unit norm");
        }
    }
    t_v_ = min_squared_chordal(vectors_);
}

UnitarySet UnitarySet::single(int K) { return UnitarySet(K, {canonical_direction(K)}); }

LevelSet::LevelSet(std::vector<double> amplitudes, std::optional<double> ratio, double sigma2_design)
    : amplitudes_(std::move(amplitudes)), ratio_(ratio), sigma2_design_(sigma2_design) {
    if (!(sigma2_design_ > 0.0)) throw InvalidArgument("sigma2_design must be positive");
    bits_ = log2_exact(amplitudes_.size());
    if (amplitudes_.front() < 0.0) throw InvalidArgument("amplitudes must be nonnegative");
    for (std::size_t i = 1; i < amplitudes_.size(); ++i) {
        if (!(amplitudes_[i] > amplitudes_[i - 1])) {
            throw InvalidArgument("amplitudes must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
    double energy = 0.0;
    for (double a : amplitudes_) energy += a * a;
    energy /= static_cast<double>(amplitudes_.size());
    if (std::abs(energy - 1.0) > kPowerTol) {
        throw InvalidArgument("level set violates the unit power constraint (mean energy " +
                              std::to_string(energy) + ")");
    }
    if (ratio_) {
        if (amplitudes_.size() == 1) throw InvalidArgument("a single level has no ratio");
        if (!(*ratio_ > 1.0)) throw InvalidArgument("level ratio must exceed 1");
        const double base = sigma2_design_ + amplitudes_[0] * amplitudes_[0];
        for (std::size_t i = 1; i < amplitudes_.size(); ++i) {
            const double want = base * std::pow(*ratio_, static_cast<double>(i));
            const double got = sigma2_design_ + amplitudes_[i] * amplitudes_[i];
            if (std::abs(got - want) > 1e-9 * want) {
                throw InvalidArgument("level " + std::to_string(i) + " breaks the geometric chain");
            }
        }
    }
}

LevelSet LevelSet::from_chain(double alpha0, double ratio, double sigma2, int l_alpha) {
    const std::size_t n = std::size_t{1} << l_alpha;
    std::vector<double> amps(n);
    const double base = sigma2 + alpha0 * alpha0;
    amps[0] = alpha0;
    for (std::size_t i = 1; i < n; ++i) {
        const double radicand = base * std::pow(ratio, static_cast<double>(i)) - sigma2;
        if (radicand < 0.0) throw NumericError("negative level energy in geometric chain");
        amps[i] = std::sqrt(radicand);
    }
    return LevelSet(std::move(amps), n > 1 ? std::optional<double>(ratio) : std::nullopt, sigma2);
}

LevelSet LevelSet::normalized(std::vector<double> amplitudes, double sigma2_design) {
    if (amplitudes.empty()) throw InvalidArgument("empty amplitude list");
    double energy = 0.0;
    for (double a : amplitudes) energy += a * a;
    energy /= static_cast<double>(amplitudes.size());
    if (!(energy > 0.0)) throw InvalidArgument("amplitude list has zero energy");
    const double scale = 1.0 / std::sqrt(energy);
    for (double& a : amplitudes) a *= scale;
    return LevelSet(std::move(amplitudes), std::nullopt, sigma2_design);
}

MultiLevelConstellation::MultiLevelConstellation(LevelSet levels, UnitarySet directions)
    : levels_(std::move(levels)), directions_(std::move(directions)) {}

SignalPoint MultiLevelConstellation::point(std::size_t index) const {
    if (index >= size()) throw InvalidArgument("point index out of range");
    return SignalPoint(levels_[level_of(index)], directions_[direction_of(index)]);
}

double MultiLevelConstellation::mean_energy() const {
    double e = 0.0;
    for (std::size_t i = 0; i < size(); ++i) e += point(i).vector().squaredNorm();
    return e / static_cast<double>(size());
}

} // namespace klconst

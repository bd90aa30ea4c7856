#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace klconst {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kPowerTol = 1e-9;

struct ChannelParams {
    int M = 1;          // receive antennas
    int K = 1;          // symbols per fading block
    double sigma2 = 1;  // per-sample noise variance

    ChannelParams() = default;
    ChannelParams(int M, int K, double sigma2);

    // Average per-antenna SNR, 1/(K sigma2).
    double snr() const { return 1.0 / (K * sigma2); }
    double snr_db() const;

    static ChannelParams from_snr_db(int M, int K, double snr_db);
};

double snr_db_to_sigma2(int K, double snr_db);

class SignalPoint {
public:
    SignalPoint(double amplitude, CVector direction);

    double amplitude() const { return amplitude_; }
    const CVector& direction() const { return direction_; }
    int K() const { return static_cast<int>(direction_.size()); }

    // s = alpha * v
    CVector vector() const { return amplitude_ * direction_; }

private:
    double amplitude_;
    CVector direction_;
};

// First canonical basis vector e_0 of C^K.
CVector canonical_direction(int K);

// Ordered set of unit vectors in C^K with cached minimum squared chordal
// distance. Cardinality must be a power of two.
class UnitarySet {
public:
    UnitarySet(int K, std::vector<CVector> vectors);

    // The one-element set {e_0}; t_v = +inf.
    static UnitarySet single(int K);

    int K() const { return K_; }
    std::size_t size() const { return vectors_.size(); }
    int bits() const { return bits_; }
    const std::vector<CVector>& vectors() const { return vectors_; }
    const CVector& operator[](std::size_t i) const { return vectors_[i]; }
    double t_v() const { return t_v_; }

private:
    int K_;
    int bits_;
    std::vector<CVector> vectors_;
    double t_v_;
};

// Strictly increasing amplitudes meeting (1/N) sum alpha^2 = 1. When built by
// the bisection design the set also carries the common ratio r of the chain
// sigma2 + alpha_i^2 = (sigma2 + alpha_0^2) r^i.
class LevelSet {
public:
    LevelSet(std::vector<double> amplitudes, std::optional<double> ratio, double sigma2_design);

    // Geometric-chain amplitudes sqrt((sigma2 + alpha0^2) r^i - sigma2).
    static LevelSet from_chain(double alpha0, double ratio, double sigma2, int l_alpha);

    // Arbitrary amplitude list, rescaled to the power constraint, no ratio.
    static LevelSet normalized(std::vector<double> amplitudes, double sigma2_design);

    std::size_t size() const { return amplitudes_.size(); }
    int bits() const { return bits_; }
    const std::vector<double>& amplitudes() const { return amplitudes_; }
    double operator[](std::size_t i) const { return amplitudes_[i]; }
    const std::optional<double>& ratio() const { return ratio_; }
    double sigma2_design() const { return sigma2_design_; }

private:
    std::vector<double> amplitudes_;
    std::optional<double> ratio_;
    double sigma2_design_;
    int bits_;
};

// Cartesian product levels x directions. Point index = n * 2^{l_v} + j, so
// the level bits are the high-order bits.
class MultiLevelConstellation {
public:
    MultiLevelConstellation(LevelSet levels, UnitarySet directions);

    const LevelSet& levels() const { return levels_; }
    const UnitarySet& directions() const { return directions_; }
    double sigma2_design() const { return levels_.sigma2_design(); }
    int K() const { return directions_.K(); }
    std::size_t size() const { return levels_.size() * directions_.size(); }
    int bits() const { return levels_.bits() + directions_.bits(); }

    std::size_t index(std::size_t level, std::size_t direction) const {
        return level * directions_.size() + direction;
    }
    std::size_t level_of(std::size_t index) const { return index / directions_.size(); }
    std::size_t direction_of(std::size_t index) const { return index % directions_.size(); }

    SignalPoint point(std::size_t index) const;
    double mean_energy() const;

private:
    LevelSet levels_;
    UnitarySet directions_;
};

bool is_power_of_two(std::size_t n);
int log2_exact(std::size_t n);

} // namespace klconst

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "klconst/rng.hpp"
#include "klconst/types.hpp"

namespace klconst {

struct SerEstimate {
    double ser = 0;
    std::uint64_t trials = 0;
    std::uint64_t errors = 0;
    double ci95_low = 0;
    double ci95_high = 0;
    std::uint64_t seed = 0;

    static SerEstimate from_counts(std::uint64_t errors, std::uint64_t trials, std::uint64_t seed);
};

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

// Y = h s^T + N with h ~ CN(0, I_M) and N_mk ~ CN(0, sigma2). Draws h first,
// then N column by column.
CMatrix simulate_block(const CVector& s, const ChannelParams& params, PhiloxStream& rng);
CMatrix simulate_block(const SignalPoint& s, const ChannelParams& params, PhiloxStream& rng);

// Trial t draws everything from PhiloxStream(seed, t); `workers` = 0 uses the
// hardware concurrency. Results do not depend on the worker count.
SerEstimate estimate_ser(const MultiLevelConstellation& c, const ChannelParams& params, std::uint64_t trials,
                         std::uint64_t seed, unsigned workers = 0);

struct KlMcEstimate {
    double mean = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
};

// Sample mean of (1/M) ln f(Y|s_i) / f(Y|s_k) for Y ~ f(Y|s_i). The log-ratio
// is evaluated from the Gram matrix, never from the densities themselves.
KlMcEstimate kl_mc_estimate(const SignalPoint& s_i, const SignalPoint& s_k, const ChannelParams& params,
                            std::uint64_t samples, std::uint64_t seed, unsigned workers = 0);

// ln f(Y|s) up to the additive constant -KM ln(pi) - M (K-1) ln(sigma2).
double log_likelihood(const CMatrix& Y, const CVector& s, double sigma2);

// One pilot slot followed by K-1 square-QAM (or BPSK) data slots. Every slot
// carries 1/K of the unit block energy.
class PilotQamScheme {
public:
    PilotQamScheme(int K, int bits_per_data_symbol);

    int K() const { return K_; }
    int bits_per_data_symbol() const { return bits_; }
    int total_bits() const { return (K_ - 1) * bits_; }
    const std::vector<cdouble>& alphabet() const { return alphabet_; } // unit average energy
    double pilot_amplitude() const { return pilot_amplitude_; }
    double data_amplitude() const { return data_amplitude_; }

    // Transmitted block for the given data symbol indices (one per data slot).
    CVector block(const std::vector<std::size_t>& symbols) const;

    // Average of ||s||^2 over all messages.
    double mean_block_energy() const;

private:
    int K_;
    int bits_;
    std::vector<cdouble> alphabet_;
    double pilot_amplitude_;
    double data_amplitude_;
};

// Square QAM with 2^bits points (bits even) or BPSK (bits = 1), unit energy.
std::vector<cdouble> qam_alphabet(int bits);

// Receiver: h_hat = y_0 / pilot_amplitude, maximum-ratio combining of each data
// slot with h_hat normalised by the unbiased gain ||h_hat||^2 - M sigma2 /
// pilot_amplitude^2, nearest-neighbour decision. A trial errs if any data symbol
// errs, so the rate is per K-slot message like estimate_ser.
SerEstimate pilot_qam_run(const PilotQamScheme& scheme, const ChannelParams& params, std::uint64_t trials,
                          std::uint64_t seed, unsigned workers = 0);

} // namespace klconst

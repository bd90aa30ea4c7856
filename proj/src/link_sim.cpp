#include "klconst/link_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <thread>

#include "klconst/detection.hpp"
#include "klconst/errors.hpp"

namespace klconst {

namespace {

constexpr std::uint64_t kChunk = 4096;

// Runs body(chunk_index, begin, end) for every chunk of [0, total) on up to
// `workers` threads. Callers store per-chunk results by index, so the final
// reduction is independent of scheduling.
template <class Body>
void for_each_chunk(std::uint64_t total, unsigned workers, Body body) {
    const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));

    std::atomic<std::uint64_t> next{0};
    auto run = [&] {
        for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) {
            body(c, c * kChunk, std::min(total, (c + 1) * kChunk));
        }
    };
    if (workers <= 1) {
        run();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
}

std::uint64_t count_errors(std::uint64_t trials, unsigned workers,
                           const std::function<std::uint64_t(std::uint64_t, std::uint64_t)>& run_range) {
    const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<std::uint64_t> errs(chunks, 0);
    for_each_chunk(trials, workers, [&](std::uint64_t c, std::uint64_t b, std::uint64_t e) { errs[c] = run_range(b, e); });
    std::uint64_t total = 0;
    for (auto e : errs) total += e;
    return total;
}

struct Moments {
    double n = 0, mean = 0, m2 = 0;

    void add(double x) {
        n += 1;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }
};

} // namespace

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw InvalidArgument("wilson_interval needs trials >= 1");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::clamp(std::min(centre - half, p), 0.0, 1.0), std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

SerEstimate SerEstimate::from_counts(std::uint64_t errors, std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw InvalidArgument("SER estimate needs trials >= 1");
    SerEstimate est;
    est.trials = trials;
    est.errors = errors;
    est.ser = static_cast<double>(errors) / static_cast<double>(trials);
    std::tie(est.ci95_low, est.ci95_high) = wilson_interval(errors, trials);
    est.seed = seed;
    return est;
}

CMatrix simulate_block(const CVector& s, const ChannelParams& params, PhiloxStream& rng) {
    if (s.size() != params.K) throw InvalidArgument("signal length does not match K");
    CVector h(params.M);
    for (int m = 0; m < params.M; ++m) h(m) = rng.complex_normal();
    CMatrix Y(params.M, params.K);
    for (int k = 0; k < params.K; ++k) {
        for (int m = 0; m < params.M; ++m) Y(m, k) = h(m) * s(k) + rng.complex_normal(params.sigma2);
    }
    return Y;
}

CMatrix simulate_block(const SignalPoint& s, const ChannelParams& params, PhiloxStream& rng) {
    return simulate_block(s.vector(), params, rng);
}

SerEstimate estimate_ser(const MultiLevelConstellation& c, const ChannelParams& params, std::uint64_t trials,
                         std::uint64_t seed, unsigned workers) {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (c.K() != params.K) throw InvalidArgument("constellation K does not match channel K");
    std::vector<CVector> points;
    for (std::size_t i = 0; i < c.size(); ++i) points.push_back(c.point(i).vector());

    const auto errors = count_errors(trials, workers, [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t errs = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
            PhiloxStream rng(seed, t);
            const auto sent = static_cast<std::size_t>(rng.uniform_index(points.size()));
            const CMatrix Y = simulate_block(points[sent], params, rng);
            if (detect_two_stage(GramMatrix(Y), c, params.sigma2, params.M) != sent) ++errs;
        }
        return errs;
    });
    return SerEstimate::from_counts(errors, trials, seed);
}

double log_likelihood(const CMatrix& Y, const CVector& s, double sigma2) {
    const GramMatrix G(Y);
    const double energy = s.squaredNorm();
    const auto M = static_cast<double>(Y.rows());
    return -G.entries().trace().real() / sigma2 + G.energy_along(s) / (sigma2 * (sigma2 + energy)) -
           M * std::log(sigma2 + energy);
}

KlMcEstimate kl_mc_estimate(const SignalPoint& s_i, const SignalPoint& s_k, const ChannelParams& params,
                            std::uint64_t samples, std::uint64_t seed, unsigned workers) {
    if (samples < 1) throw InvalidArgument("samples must be >= 1");
    if (s_i.K() != params.K || s_k.K() != params.K) throw InvalidArgument("signal length does not match K");
    const CVector x_i = s_i.vector();
    const CVector x_k = s_k.vector();
    const double sigma2 = params.sigma2;
    const double e_i = x_i.squaredNorm();
    const double e_k = x_k.squaredNorm();
    const double w_i = 1.0 / (sigma2 * (sigma2 + e_i));
    const double w_k = 1.0 / (sigma2 * (sigma2 + e_k));
    // The tr(Y^H Y)/sigma2 terms cancel in the ratio.
    const double log_det_term = params.M * std::log((sigma2 + e_i) / (sigma2 + e_k));
    const double inv_M = 1.0 / params.M;

    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<Moments> parts(chunks);
    for_each_chunk(samples, workers, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
        Moments m;
        for (std::uint64_t t = begin; t < end; ++t) {
            PhiloxStream rng(seed, t);
            const GramMatrix G(simulate_block(x_i, params, rng));
            m.add((w_i * G.energy_along(x_i) - w_k * G.energy_along(x_k) - log_det_term) * inv_M);
        }
        parts[c] = m;
    });
    Moments all;
    for (const auto& p : parts) all.merge(p);

    KlMcEstimate est;
    est.samples = samples;
    est.mean = all.mean;
    est.std_error = samples > 1 ? std::sqrt(all.m2 / (all.n - 1) / all.n) : 0.0;
    return est;
}

std::vector<cdouble> qam_alphabet(int bits) {
    if (bits == 1) return {cdouble(-1.0, 0.0), cdouble(1.0, 0.0)};
    if (bits < 2 || bits % 2 != 0 || bits > 20) {
        throw InvalidArgument("QAM needs an even number of bits per symbol (or 1 for BPSK), got " +
                              std::to_string(bits));
    }
    const int side = 1 << (bits / 2);
    const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
    std::vector<cdouble> pts;
    pts.reserve(static_cast<std::size_t>(side) * side);
    for (int q = 0; q < side; ++q) {
        for (int i = 0; i < side; ++i) pts.emplace_back((2 * i - side + 1) * scale, (2 * q - side + 1) * scale);
    }
    return pts;
}

PilotQamScheme::PilotQamScheme(int K, int bits_per_data_symbol)
    : K_(K), bits_(bits_per_data_symbol), alphabet_(qam_alphabet(bits_per_data_symbol)) {
    if (K_ < 2) throw InvalidArgument("pilot-QAM needs K >= 2");
    pilot_amplitude_ = 1.0 / std::sqrt(static_cast<double>(K_));
    data_amplitude_ = pilot_amplitude_;
}

CVector PilotQamScheme::block(const std::vector<std::size_t>& symbols) const {
    if (symbols.size() != static_cast<std::size_t>(K_ - 1)) throw InvalidArgument("need one symbol per data slot");
    CVector s(K_);
    s(0) = pilot_amplitude_;
    for (int k = 1; k < K_; ++k) s(k) = data_amplitude_ * alphabet_.at(symbols[k - 1]);
    return s;
}

double PilotQamScheme::mean_block_energy() const {
    double alphabet_energy = 0.0;
    for (const auto& a : alphabet_) alphabet_energy += std::norm(a);
    alphabet_energy /= static_cast<double>(alphabet_.size());
    return pilot_amplitude_ * pilot_amplitude_ + (K_ - 1) * data_amplitude_ * data_amplitude_ * alphabet_energy;
}

SerEstimate pilot_qam_run(const PilotQamScheme& scheme, const ChannelParams& params, std::uint64_t trials,
                          std::uint64_t seed, unsigned workers) {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (scheme.K() != params.K) throw InvalidArgument("scheme K does not match channel K");
    std::vector<cdouble> scaled;
    for (const auto& a : scheme.alphabet()) scaled.push_back(scheme.data_amplitude() * a);
    const int data_slots = scheme.K() - 1;
    const double pilot_noise =
        params.M * params.sigma2 / (scheme.pilot_amplitude() * scheme.pilot_amplitude());

    const auto errors = count_errors(trials, workers, [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t errs = 0;
        std::vector<std::size_t> sent(data_slots);
        for (std::uint64_t t = begin; t < end; ++t) {
            PhiloxStream rng(seed, t);
            for (auto& s : sent) s = static_cast<std::size_t>(rng.uniform_index(scaled.size()));
            const CMatrix Y = simulate_block(scheme.block(sent), params, rng);
            const CVector h_hat = Y.col(0) / scheme.pilot_amplitude();
            // ||h_hat||^2 overstates ||h||^2 by the pilot noise energy; remove
            // it so the combiner output is unbiased for the QAM decision.
            const double gain = std::max(h_hat.squaredNorm() - pilot_noise, 0.0);
            bool block_error = false;
            for (int k = 0; k < data_slots && !block_error; ++k) {
                const cdouble z = gain > 0.0 ? h_hat.dot(Y.col(k + 1)) / gain : cdouble(0.0);
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t a = 0; a < scaled.size(); ++a) {
                    const double d = std::norm(z - scaled[a]);
                    if (d < best_d) {
                        best_d = d;
                        best = a;
                    }
                }
                block_error = best != sent[k];
            }
            if (block_error) ++errs;
        }
        return errs;
    });
    return SerEstimate::from_counts(errors, trials, seed);
}

} // namespace klconst

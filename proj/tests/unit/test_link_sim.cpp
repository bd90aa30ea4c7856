#include <doctest.h>

#include <cmath>

#include "klconst/detection.hpp"
#include "klconst/errors.hpp"
#include "klconst/kl.hpp"
#include "klconst/link_sim.hpp"
#include "klconst/multilevel.hpp"

using namespace klconst;

namespace {

MultiLevelConstellation design(int K, int l_alpha, int l_v, double s2) {
    PackingConfig cfg;
    cfg.K = K;
    cfg.cardinality = std::size_t{1} << l_v;
    cfg.iterations = 300;
    cfg.restarts = 1;
    return design_fixed(s2, l_alpha, optimize_unitary(cfg)).constellation;
}

} // namespace

TEST_CASE("simulate_block") {
    const CVector s = 0.7 * canonical_direction(3);
    SUBCASE("deterministic per stream") {
        PhiloxStream a(5, 3), b(5, 3);
        CHECK(simulate_block(s, ChannelParams(4, 3, 0.2), a) == simulate_block(s, ChannelParams(4, 3, 0.2), b));
    }
    SUBCASE("silent transmitter, vanishing noise") {
        PhiloxStream rng(5, 0);
        CHECK(simulate_block(CVector::Zero(3), ChannelParams(4, 3, 1e-300), rng).cwiseAbs().maxCoeff() < 1e-140);
    }
    SUBCASE("received energy per antenna is ||s||^2 + K sigma2") {
        const ChannelParams p(4, 3, 0.2);
        const int n = 100000;
        double sum = 0, sum2 = 0;
        for (int t = 0; t < n; ++t) {
            PhiloxStream rng(6, static_cast<std::uint64_t>(t));
            const double e = simulate_block(s, p, rng).squaredNorm() / p.M;
            sum += e;
            sum2 += e * e;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / n);
        CHECK(std::abs(mean - (0.49 + 3 * 0.2)) <= 3 * se);
    }
    SUBCASE("channel covariance is the identity") {
        const ChannelParams p(3, 1, 1e-12);
        const CVector one = canonical_direction(1);
        CMatrix cov = CMatrix::Zero(3, 3);
        const int n = 50000;
        for (int t = 0; t < n; ++t) {
            PhiloxStream rng(7, static_cast<std::uint64_t>(t));
            const CVector h = simulate_block(one, p, rng).col(0);
            cov += h * h.adjoint();
        }
        cov /= n;
        CHECK((cov - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.03);
    }
    CHECK_THROWS_AS([] {
        PhiloxStream rng(1, 1);
        simulate_block(CVector::Zero(2), ChannelParams(4, 3, 0.2), rng);
    }(), InvalidArgument);
}

TEST_CASE("wilson interval") {
    const auto [lo, hi] = wilson_interval(0, 100);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(0.03699).epsilon(1e-3));
    const auto [lo2, hi2] = wilson_interval(50, 100);
    CHECK(lo2 == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(hi2 == doctest::Approx(0.5962).epsilon(1e-3));
    const SerEstimate e = SerEstimate::from_counts(7, 1000, 3);
    CHECK(e.ser == 0.007);
    CHECK(e.ci95_low <= e.ser);
    CHECK(e.ser <= e.ci95_high);
}

TEST_CASE("estimate_ser") {
    SUBCASE("single point never errs") {
        const MultiLevelConstellation one(LevelSet({1.0}, std::nullopt, 0.5), UnitarySet::single(2));
        CHECK(estimate_ser(one, ChannelParams(2, 2, 0.5), 2000, 1).errors == 0);
    }
    SUBCASE("nearly noiseless massive array") {
        const auto c = design(2, 1, 2, 1e-3);
        const SerEstimate e = estimate_ser(c, ChannelParams(256, 2, 1e-3), 10000, 2);
        CHECK(e.ser < 1e-3);
    }
    SUBCASE("independent of worker count") {
        const auto c = design(2, 1, 3, 0.3);
        const ChannelParams p(4, 2, 0.3);
        const SerEstimate a = estimate_ser(c, p, 10000, 9, 1);
        const SerEstimate b = estimate_ser(c, p, 10000, 9, 3);
        CHECK(a.errors == b.errors);
        CHECK(a.errors > 0);
        CHECK(a.seed == 9);
        CHECK(a.ser == static_cast<double>(a.errors) / 10000);
    }
    SUBCASE("SER does not increase with SNR") {
        const auto c = design(2, 1, 3, snr_db_to_sigma2(2, 5.0));
        double prev = 1.0;
        for (double db : {-5.0, 0.0, 5.0, 10.0}) {
            const SerEstimate e = estimate_ser(c, ChannelParams::from_snr_db(4, 2, db), 4000, 4);
            CHECK(e.ci95_low <= prev);
            prev = e.ci95_high;
        }
    }
}

TEST_CASE("kl_mc_estimate") {
    const ChannelParams p(4, 2, 0.5);
    const SignalPoint a(0.9, canonical_direction(2));
    CVector v(2);
    v << cdouble(0.6, 0.1), cdouble(-0.3, 0.7);
    const SignalPoint b(1.2, v.normalized());

    const KlMcEstimate self = kl_mc_estimate(a, a, p, 20000, 1);
    CHECK(std::abs(self.mean) <= 3 * self.std_error + 1e-15);

    const KlMcEstimate ab = kl_mc_estimate(a, b, p, 200000, 2);
    CHECK(std::abs(ab.mean - kl_full(a, b, p.sigma2)) <= 3 * ab.std_error);

    const SignalPoint b_same_dir(1.2, canonical_direction(2));
    const KlMcEstimate energy = kl_mc_estimate(a, b_same_dir, p, 200000, 3);
    const double d2 = kl_decomposed(1.2, canonical_direction(2), 0.9, canonical_direction(2), p.sigma2).energy;
    CHECK(std::abs(energy.mean - d2) <= 3 * energy.std_error);

    const KlMcEstimate w1 = kl_mc_estimate(a, b, p, 10000, 4, 1);
    const KlMcEstimate w3 = kl_mc_estimate(a, b, p, 10000, 4, 3);
    CHECK(w1.mean == w3.mean);
    CHECK(w1.std_error == w3.std_error);
}

TEST_CASE("pilot-QAM scheme") {
    CHECK(qam_alphabet(6).size() == 64);
    CHECK(qam_alphabet(1).size() == 2);
    CHECK_THROWS_AS(qam_alphabet(3), InvalidArgument);
    CHECK_THROWS_AS(PilotQamScheme(1, 2), InvalidArgument);
    for (int bits : {1, 2, 4, 6}) {
        double e = 0;
        for (const auto& a : qam_alphabet(bits)) e += std::norm(a);
        CHECK(e / (1 << bits) == doctest::Approx(1.0).epsilon(1e-12));
    }

    const PilotQamScheme s(3, 4);
    CHECK(s.total_bits() == 8);
    CHECK(std::abs(s.mean_block_energy() - 1.0) <= 1e-9);
    CHECK(s.block({0, 5})(0) == cdouble(s.pilot_amplitude(), 0.0));

    CHECK(pilot_qam_run(PilotQamScheme(2, 6), ChannelParams(16, 2, 1e-7), 3000, 1).errors == 0);
    const ChannelParams p(32, 2, 0.1);
    const SerEstimate a = pilot_qam_run(PilotQamScheme(2, 4), p, 8192, 5, 1);
    const SerEstimate b = pilot_qam_run(PilotQamScheme(2, 4), p, 8192, 5, 2);
    CHECK(a.errors == b.errors);
    CHECK(a.errors > 0);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../oracles.hpp"
#include "klconst/detection.hpp"
#include "klconst/errors.hpp"
#include "klconst/link_sim.hpp"
#include "klconst/multilevel.hpp"
#include "klconst/rng.hpp"

using namespace klconst;

namespace {

CMatrix random_matrix(int rows, int cols, PhiloxStream& rng) {
    CMatrix Y(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) Y(r, c) = rng.complex_normal();
    return Y;
}

MultiLevelConstellation small_design(int K, int l_alpha, int l_v, double s2, std::uint64_t seed) {
    PackingConfig cfg;
    cfg.K = K;
    cfg.cardinality = std::size_t{1} << l_v;
    cfg.iterations = 300;
    cfg.restarts = 1;
    cfg.seed = seed;
    return design_fixed(s2, l_alpha, optimize_unitary(cfg)).constellation;
}

} // namespace

TEST_CASE("gram matrix") {
    CHECK(gram(CMatrix::Zero(3, 2)).entries().isZero(0.0));

    PhiloxStream rng(1, 0);
    const CMatrix y = random_matrix(1, 3, rng);
    const CMatrix outer = y.row(0).adjoint() * y.row(0);
    CHECK((gram(y).entries() - outer).cwiseAbs().maxCoeff() <= 1e-15);

    for (int n = 0; n < 200; ++n) {
        const CMatrix Y = random_matrix(1 + static_cast<int>(rng.uniform_index(8)), 1 + static_cast<int>(rng.uniform_index(4)), rng);
        const CMatrix G = gram(Y).entries();
        REQUIRE((G - G.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
        REQUIRE(std::abs(G.trace().real() - Y.squaredNorm()) <= 1e-9 * Y.squaredNorm());
        const Eigen::SelfAdjointEigenSolver<CMatrix> eig(G);
        REQUIRE(eig.eigenvalues().minCoeff() >= -1e-10);
    }
    CHECK_THROWS_AS(gram(CMatrix(0, 2)), InvalidArgument);
}

TEST_CASE("metric differences equal log-likelihood differences") {
    PhiloxStream rng(2, 0);
    for (int n = 0; n < 200; ++n) {
        const int K = 1 + static_cast<int>(rng.uniform_index(4));
        const int M = 1 + static_cast<int>(rng.uniform_index(6));
        const double s2 = 0.05 + rng.uniform();
        const CMatrix Y = random_matrix(M, K, rng);
        CVector va(K), vb(K);
        for (int j = 0; j < K; ++j) {
            va(j) = rng.complex_normal();
            vb(j) = rng.complex_normal();
        }
        va.normalize();
        vb.normalize();
        const double aa = 2.0 * rng.uniform(), ab = 2.0 * rng.uniform();
        const GramMatrix G(Y);
        const double metric = ml_metric(aa, G.energy_along(va), s2, M) - ml_metric(ab, G.energy_along(vb), s2, M);
        const double loglik = oracle::log_density(Y, aa * va, s2) - oracle::log_density(Y, ab * vb, s2);
        REQUIRE(metric == doctest::Approx(loglik).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("noiseless blocks are detected exactly") {
    const auto c = small_design(2, 2, 3, 1e-3, 5);
    PhiloxStream rng(3, 0);
    for (std::size_t idx = 0; idx < c.size(); ++idx) {
        CVector h(64);
        for (int m = 0; m < 64; ++m) h(m) = rng.complex_normal();
        const CMatrix Y = h * c.point(idx).vector().transpose();
        CHECK(detect_joint(Y, c, 1e-3, 64) == idx);
        CHECK(detect_two_stage(Y, c, 1e-3, 64) == idx);
    }
}

TEST_CASE("degenerate constellations") {
    const MultiLevelConstellation one(LevelSet({1.0}, std::nullopt, 0.1), UnitarySet::single(3));
    PhiloxStream rng(4, 0);
    for (int n = 0; n < 20; ++n) {
        const CMatrix Y = random_matrix(4, 3, rng);
        CHECK(detect_joint(Y, one, 0.1, 4) == 0);
        CHECK(detect_two_stage(Y, one, 0.1, 4) == 0);
    }

    // One level: two-stage reduces to picking the direction with most energy.
    const auto unitary = small_design(3, 0, 4, 0.1, 6);
    for (int n = 0; n < 50; ++n) {
        const CMatrix Y = random_matrix(4, 3, rng);
        const GramMatrix G(Y);
        std::size_t best = 0;
        for (std::size_t j = 1; j < unitary.size(); ++j) {
            if (G.energy_along(unitary.directions()[j]) > G.energy_along(unitary.directions()[best])) best = j;
        }
        CHECK(detect_two_stage(Y, unitary, 0.1, 4) == best);
    }

    CHECK_THROWS_AS(detect_joint(random_matrix(4, 2, rng), one, 0.1, 4), InvalidArgument);
    CHECK_THROWS_AS(detect_two_stage(random_matrix(4, 2, rng), one, 0.1, 4), InvalidArgument);
}

TEST_CASE("two-stage equals joint detection") {
    PhiloxStream rng(7, 0);
    int checked = 0;
    for (int K = 1; K <= 4; ++K) {
        for (int l_s : {2, 4}) {
            for (double snr_db : {0.0, 10.0, 20.0}) {
                PackingConfig base;
                base.iterations = 200;
                base.restarts = 1;
                const auto lib = build_unitary_library(K, l_s, base);
                const ChannelParams p = ChannelParams::from_snr_db(8, K, snr_db);
                for (int l_alpha = 0; l_alpha <= l_s; ++l_alpha) {
                    if (l_alpha == 0 && K == 1) continue;
                    const auto c = design_fixed(p.sigma2, l_alpha, lib.at(l_s - l_alpha)).constellation;
                    for (int n = 0; n < 20; ++n) {
                        PhiloxStream trial(8, static_cast<std::uint64_t>(checked));
                        const CMatrix Y = simulate_block(c.point(trial.uniform_index(c.size())), p, trial);
                        REQUIRE(detect_two_stage(Y, c, p.sigma2, p.M) == detect_joint(Y, c, p.sigma2, p.M));
                        ++checked;
                    }
                }
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("exact ties resolve identically") {
    // Duplicated directions tie in stage one; the zero block ties everything.
    const CVector v = oracle::at_chordal_distance(0.4);
    const UnitarySet dup(2, {canonical_direction(2), v, v, canonical_direction(2)});
    const MultiLevelConstellation c(LevelSet::normalized({0.5, 1.0}, 0.2), dup);
    PhiloxStream rng(9, 0);
    CHECK(detect_two_stage(CMatrix::Zero(4, 2), c, 0.2, 4) == detect_joint(CMatrix::Zero(4, 2), c, 0.2, 4));
    for (int n = 0; n < 500; ++n) {
        const CMatrix Y = random_matrix(4, 2, rng);
        REQUIRE(detect_two_stage(Y, c, 0.2, 4) == detect_joint(Y, c, 0.2, 4));
    }

    // Zero amplitude with several directions.
    const MultiLevelConstellation onoff(LevelSet::normalized({0.0, 1.0}, 0.5), UnitarySet(2, {canonical_direction(2), v}));
    for (int n = 0; n < 500; ++n) {
        const CMatrix Y = 0.3 * random_matrix(4, 2, rng);
        REQUIRE(detect_two_stage(Y, onoff, 0.5, 4) == detect_joint(Y, onoff, 0.5, 4));
    }
}

TEST_CASE("detection is invariant to a global phase and to antenna order") {
    const auto c = small_design(3, 2, 3, 0.05, 10);
    PhiloxStream rng(12, 0);
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    for (int n = 0; n < 300; ++n) {
        const ChannelParams p(6, 3, 0.05);
        const CMatrix Y = simulate_block(c.point(rng.uniform_index(c.size())), p, rng);
        const std::size_t ref = detect_two_stage(Y, c, p.sigma2, p.M);
        REQUIRE(detect_two_stage(Y * std::polar(1.0, 6.283 * rng.uniform()), c, p.sigma2, p.M) == ref);
        std::rotate(perm.begin(), perm.begin() + 1, perm.end());
        std::swap(perm[0], perm[3]);
        CMatrix P(6, 3);
        for (int r = 0; r < 6; ++r) P.row(r) = Y.row(perm[r]);
        REQUIRE(detect_two_stage(P, c, p.sigma2, p.M) == ref);
        REQUIRE(detect_joint(P, c, p.sigma2, p.M) == ref);
    }
}

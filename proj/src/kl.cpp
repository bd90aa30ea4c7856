#include "klconst/kl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klconst/errors.hpp"

namespace klconst {

namespace {

void check_sigma2(double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("sigma2 must be positive");
}

} // namespace

double energy_divergence(double energy_i, double energy_k, double sigma2) {
    // x - 1 formed without the rounding of the quotient so that x near 1
    // keeps its relative accuracy.
    const double d = (energy_i - energy_k) / (sigma2 + energy_k);
    return std::max(0.0, d - std::log1p(d));
}

double intra_gain(double alpha, double sigma2) {
    const double a2 = alpha * alpha;
    return a2 * a2 / (sigma2 * (sigma2 + a2));
}

double ratio_divergence(double r) {
    const double d = 1.0 / r - 1.0;
    return std::max(0.0, d - std::log1p(d));
}

double kl_full(const SignalPoint& s_i, const SignalPoint& s_k, double sigma2) {
    check_sigma2(sigma2);
    if (s_i.K() != s_k.K()) throw InvalidArgument("signal points have different lengths");
    const CVector x_i = s_i.vector();
    const CVector x_k = s_k.vector();
    const double e_i = x_i.squaredNorm();
    const double e_k = x_k.squaredNorm();
    // s_k^T s_i^* = <s_i, s_k> in Eigen's conjugate-first convention.
    const double cross = std::norm(x_i.dot(x_k));
    const double d1 = std::max(0.0, e_k * e_i - cross) / (sigma2 * (sigma2 + e_k));
    return d1 + energy_divergence(e_i, e_k, sigma2);
}

KlTerms kl_decomposed(double alpha_k, const CVector& v_k, double alpha_i, const CVector& v_i, double sigma2) {
    check_sigma2(sigma2);
    if (v_k.size() != v_i.size()) throw InvalidArgument("direction vectors have different lengths");
    const double a_k2 = alpha_k * alpha_k;
    const double a_i2 = alpha_i * alpha_i;
    const double chordal = std::max(0.0, 1.0 - std::norm(v_i.dot(v_k)));
    KlTerms t;
    t.direction = a_k2 * a_i2 * chordal / (sigma2 * (sigma2 + a_k2));
    t.energy = energy_divergence(a_i2, a_k2, sigma2);
    return t;
}

double d_intra(double alpha, double t_v, double sigma2) {
    check_sigma2(sigma2);
    if (!(alpha >= 0.0)) throw InvalidArgument("amplitude must be nonnegative");
    if (!(t_v >= 0.0)) throw InvalidArgument("t_v must be nonnegative");
    if (std::isinf(t_v)) return std::numeric_limits<double>::infinity();
    return intra_gain(alpha, sigma2) * t_v;
}

double d_inter(double alpha_n1, double alpha_n2, double sigma2) {
    check_sigma2(sigma2);
    if (!(alpha_n1 >= 0.0) || !(alpha_n2 >= 0.0)) throw InvalidArgument("amplitudes must be nonnegative");
    return energy_divergence(alpha_n1 * alpha_n1, alpha_n2 * alpha_n2, sigma2);
}

double min_squared_chordal(const std::vector<CVector>& vectors) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t k = i + 1; k < vectors.size(); ++k) {
            best = std::min(best, std::max(0.0, 1.0 - std::norm(vectors[i].dot(vectors[k]))));
        }
    }
    return best;
}

MinKl min_kl_bruteforce(const MultiLevelConstellation& c, double sigma2) {
    check_sigma2(sigma2);
    const std::size_t n = c.size();
    if (n < 2) throw DomainError("minimum KL distance needs at least two points");
    std::vector<SignalPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(c.point(i));

    MinKl best{std::numeric_limits<double>::infinity(), 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (i == k) continue;
            const double d = kl_full(pts[i], pts[k], sigma2);
            if (d < best.value) best = {d, i, k};
        }
    }
    return best;
}

} // namespace klconst

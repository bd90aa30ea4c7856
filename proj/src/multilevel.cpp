#include "klconst/multilevel.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "klconst/errors.hpp"
#include "klconst/kl.hpp"

namespace klconst {

namespace {

constexpr double kUnitRatioCutoff = 1e-13;
constexpr double kUpperBoundTol = 1e-12;

void check_common(double sigma2, int l_alpha) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("sigma2 must be positive");
    if (l_alpha < 0 || l_alpha > 30) throw InvalidArgument("l_alpha out of range");
}

double power_residual(const LevelSet& levels) {
    double e = 0.0;
    for (double a : levels.amplitudes()) e += a * a;
    return std::abs(e / static_cast<double>(levels.size()) - 1.0);
}

} // namespace

double geometric_sum(double r, int n) {
    const double delta = r - 1.0;
    if (std::abs(delta) < kUnitRatioCutoff) return static_cast<double>(n);
    return std::expm1(n * std::log1p(delta)) / delta;
}

double lowest_level_energy(double r, double sigma2, int l_alpha) {
    if (std::abs(r - 1.0) < kUnitRatioCutoff) return 1.0;
    const int n = 1 << l_alpha;
    return n * (1.0 + sigma2) / geometric_sum(r, n) - sigma2;
}

double ratio_upper_bound(double sigma2, int l_alpha) {
    check_common(sigma2, l_alpha);
    if (l_alpha < 1) throw InvalidArgument("ratio_upper_bound needs l_alpha >= 1");
    const int n = 1 << l_alpha;
    const double bound = n * (1.0 + sigma2) / sigma2;
    const auto admissible = [&](double r) { return geometric_sum(r, n) <= bound; };

    double lo = 1.0;
    double hi = 2.0;
    while (admissible(hi)) {
        lo = hi;
        hi = 1.0 + 2.0 * (hi - 1.0);
        if (!std::isfinite(hi)) throw NumericError("ratio upper bound diverged");
    }
    while (hi - lo >= kUpperBoundTol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (admissible(mid) ? lo : hi) = mid;
    }
    return lo;
}

BisectionResult solve_bisection(double sigma2, int l_alpha, double t_v, double eps) {
    check_common(sigma2, l_alpha);
    if (l_alpha < 1) throw InvalidArgument("solve_bisection needs l_alpha >= 1");
    if (!(t_v > 0.0) || !std::isfinite(t_v)) throw InvalidArgument("solve_bisection needs 0 < t_v < inf");
    if (!(eps > 0.0)) throw NumericError("bisection tolerance must be positive");

    const auto alpha0_sq = [&](double r) {
        const double a2 = lowest_level_energy(r, sigma2, l_alpha);
        if (a2 < -1e-9) throw NumericError("negative lowest-level energy inside the bracket");
        return std::max(0.0, a2);
    };
    // Positive while the intra distance of the lowest level still exceeds the
    // consecutive-level distance.
    const auto gap = [&](double r) {
        const double a2 = alpha0_sq(r);
        return intra_gain(std::sqrt(a2), sigma2) * t_v - ratio_divergence(r);
    };

    BisectionResult res;
    res.r_upper = ratio_upper_bound(sigma2, l_alpha);
    double r_lo = 1.0;
    double r_hi = res.r_upper;
    if (!(gap(r_lo) > 0.0) || !(gap(r_hi) <= 0.0)) throw NumericError("bisection bracket has no sign change");

    double r = 0.5 * (r_lo + r_hi);
    while (r_hi - r_lo >= eps) {
        r = 0.5 * (r_lo + r_hi);
        ++res.iterations;
        if (r <= r_lo || r >= r_hi) break;
        (gap(r) <= 0.0 ? r_hi : r_lo) = r;
    }

    res.r0 = r;
    res.alpha0 = std::sqrt(alpha0_sq(r));
    res.residual_equality = std::abs(d_intra(res.alpha0, t_v, sigma2) - ratio_divergence(r));
    res.residual_power = power_residual(LevelSet::from_chain(res.alpha0, res.r0, sigma2, l_alpha));
    return res;
}

LevelSet build_level_set(const BisectionResult& res, double sigma2, int l_alpha) {
    check_common(sigma2, l_alpha);
    if (l_alpha == 0) return LevelSet({1.0}, std::nullopt, sigma2);
    if (!(res.r0 > 1.0)) throw NumericError("level ratio must exceed 1");
    return LevelSet::from_chain(res.alpha0, res.r0, sigma2, l_alpha);
}

LevelSet energy_only_levels(double sigma2, int l_alpha) {
    check_common(sigma2, l_alpha);
    if (l_alpha < 1) throw InvalidArgument("energy_only_levels needs l_alpha >= 1");
    return LevelSet::from_chain(0.0, ratio_upper_bound(sigma2, l_alpha), sigma2, l_alpha);
}

FixedDesign design_fixed(double sigma2, int l_alpha, const UnitarySet& directions, double eps) {
    check_common(sigma2, l_alpha);
    const double t_v = directions.t_v();
    AllocationRow row;
    row.l_alpha = l_alpha;

    if (l_alpha == 0) {
        if (directions.size() < 2) throw DomainError("a one-point constellation has no KL distance");
        row.r0 = std::numeric_limits<double>::quiet_NaN();
        row.alpha0 = 1.0;
        row.min_kl = d_intra(1.0, t_v, sigma2);
        return {MultiLevelConstellation(LevelSet({1.0}, std::nullopt, sigma2), directions), row};
    }

    if (directions.size() == 1 || t_v == 0.0) {
        // No usable intra distance: spread the levels as far as the power
        // constraint allows. With duplicated directions the objective is 0.
        LevelSet levels = energy_only_levels(sigma2, l_alpha);
        row.r0 = *levels.ratio();
        row.alpha0 = 0.0;
        row.min_kl = directions.size() == 1 ? ratio_divergence(row.r0) : 0.0;
        return {MultiLevelConstellation(std::move(levels), directions), row};
    }

    const BisectionResult res = solve_bisection(sigma2, l_alpha, t_v, eps);
    row.r0 = res.r0;
    row.alpha0 = res.alpha0;
    row.min_kl = std::min(d_intra(res.alpha0, t_v, sigma2), ratio_divergence(res.r0));
    return {MultiLevelConstellation(build_level_set(res, sigma2, l_alpha), directions), row};
}

DesignOutcome allocate_bits(int l_s, double sigma2, const UnitaryLibrary& library, double eps) {
    if (l_s < 1) throw InvalidArgument("l_s must be >= 1");
    for (int l_v = 0; l_v <= l_s; ++l_v) {
        const auto it = library.find(l_v);
        if (it == library.end()) {
            throw ConfigError("unitary library has no entry for l_v=" + std::to_string(l_v));
        }
        if (it->second.size() != (std::size_t{1} << l_v)) {
            throw ConfigError("unitary library entry l_v=" + std::to_string(l_v) + " holds " +
                              std::to_string(it->second.size()) + " vectors");
        }
    }

    std::optional<FixedDesign> best;
    std::vector<AllocationRow> table;
    for (int l_alpha = 0; l_alpha <= l_s; ++l_alpha) {
        FixedDesign d = design_fixed(sigma2, l_alpha, library.at(l_s - l_alpha), eps);
        table.push_back(d.row);
        if (!best || d.row.min_kl > best->row.min_kl) best = std::move(d);
    }
    return {best->row.l_alpha, std::move(best->constellation), best->row.min_kl, std::move(table)};
}

} // namespace klconst

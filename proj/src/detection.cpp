#include "klconst/detection.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "klconst/errors.hpp"

namespace klconst {

namespace {

void check_inputs(const GramMatrix& G, const MultiLevelConstellation& c, double sigma2, int M) {
    if (G.K() != c.K()) {
        throw InvalidArgument("received block has " + std::to_string(G.K()) + " columns, constellation K=" +
                              std::to_string(c.K()));
    }
    if (!(sigma2 > 0.0)) throw InvalidArgument("sigma2 must be positive");
    if (M < 1) throw InvalidArgument("M must be >= 1");
}

} // namespace

GramMatrix::GramMatrix(const CMatrix& Y) {
    if (Y.rows() == 0 || Y.cols() == 0) throw InvalidArgument("received block is empty");
    G_.noalias() = Y.adjoint() * Y;
}

double GramMatrix::energy_along(const CVector& v) const {
    // v^T G v^* = (v^*)^H G (v^*)
    const CVector vc = v.conjugate();
    return std::max(0.0, vc.dot(G_ * vc).real());
}

GramMatrix gram(const CMatrix& Y) { return GramMatrix(Y); }

double ml_metric(double alpha, double projected_energy, double sigma2, int M) {
    const double a2 = alpha * alpha;
    return a2 * projected_energy / (sigma2 * (sigma2 + a2)) - M * std::log(sigma2 + a2);
}

std::size_t detect_joint(const GramMatrix& G, const MultiLevelConstellation& c, double sigma2, int M) {
    check_inputs(G, c, sigma2, M);
    const auto& dirs = c.directions();
    const auto& levels = c.levels();
    std::vector<double> energy(dirs.size());
    for (std::size_t j = 0; j < dirs.size(); ++j) energy[j] = G.energy_along(dirs[j]);

    std::size_t best = 0;
    double best_metric = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < c.size(); ++idx) {
        const double m = ml_metric(levels[c.level_of(idx)], energy[c.direction_of(idx)], sigma2, M);
        // Within one level the metric is increasing in the projected energy;
        // a rounding tie between different energies is not a real tie.
        const bool same_level_tie = m == best_metric && levels[c.level_of(idx)] > 0.0 &&
                                    c.level_of(idx) == c.level_of(best) &&
                                    energy[c.direction_of(idx)] > energy[c.direction_of(best)];
        if (m > best_metric || same_level_tie) {
            best_metric = m;
            best = idx;
        }
    }
    return best;
}

std::size_t detect_two_stage(const GramMatrix& G, const MultiLevelConstellation& c, double sigma2, int M) {
    check_inputs(G, c, sigma2, M);
    const auto& dirs = c.directions();
    const auto& levels = c.levels();

    std::size_t best_dir = 0;
    double best_energy = -1.0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const double e = G.energy_along(dirs[j]);
        if (e > best_energy) {
            best_energy = e;
            best_dir = j;
        }
    }

    std::size_t best_level = 0;
    double best_metric = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < levels.size(); ++n) {
        const double m = ml_metric(levels[n], best_energy, sigma2, M);
        if (m > best_metric) {
            best_metric = m;
            best_level = n;
        }
    }
    // A zero-amplitude point looks the same along every direction; report the
    // first one, as the exhaustive search does.
    if (levels[best_level] == 0.0) best_dir = 0;
    return c.index(best_level, best_dir);
}

std::size_t detect_joint(const CMatrix& Y, const MultiLevelConstellation& c, double sigma2, int M) {
    return detect_joint(GramMatrix(Y), c, sigma2, M);
}

std::size_t detect_two_stage(const CMatrix& Y, const MultiLevelConstellation& c, double sigma2, int M) {
    return detect_two_stage(GramMatrix(Y), c, sigma2, M);
}

} // namespace klconst

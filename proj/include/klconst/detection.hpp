#pragma once

#include <cstddef>

#include "klconst/types.hpp"

namespace klconst {

// Y^H Y for a received block Y (M x K).
class GramMatrix {
public:
    explicit GramMatrix(const CMatrix& Y);

    const CMatrix& entries() const { return G_; }
    int K() const { return static_cast<int>(G_.rows()); }

    // v^T G v^*, i.e. tr(Y^H Y v^* v^T) = ||Y v^*||^2; real and nonnegative.
    double energy_along(const CVector& v) const;

private:
    CMatrix G_;
};

GramMatrix gram(const CMatrix& Y);

// Log-likelihood of amplitude alpha given the projected energy
// tr(Y^H Y v^* v^T), up to terms common to every candidate:
//   alpha^2 E / (sigma2 (sigma2 + alpha^2)) - M ln(sigma2 + alpha^2).
double ml_metric(double alpha, double projected_energy, double sigma2, int M);

// Exhaustive ML over all 2^{l_s} points; ties go to the smallest index.
std::size_t detect_joint(const CMatrix& Y, const MultiLevelConstellation& c, double sigma2, int M);
std::size_t detect_joint(const GramMatrix& G, const MultiLevelConstellation& c, double sigma2, int M);

// Direction first (largest projected energy), then amplitude for that
// direction. Same decision as detect_joint at O(2^{l_alpha}) + O(2^{l_v})
// metric evaluations.
std::size_t detect_two_stage(const CMatrix& Y, const MultiLevelConstellation& c, double sigma2, int M);
std::size_t detect_two_stage(const GramMatrix& G, const MultiLevelConstellation& c, double sigma2, int M);

} // namespace klconst

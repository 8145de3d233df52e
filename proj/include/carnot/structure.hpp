#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "carnot/errors.hpp"

namespace carnot {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Step-two Carnot structure: l skew d x d matrices spanning W in so(d).
struct CarnotStructure {
    int d = 0;
    int l = 0;
    std::vector<Mat> matrices;
};

constexpr double kSkewTol = 1e-12;
constexpr double kIndependenceTol = 1e-10;
constexpr double kTieTol = 1e-9;

// Checks dimensions, skewness and independence. Skew defects below kSkewTol
// are removed by A <- (A - A^T)/2.
CarnotStructure validate_structure(const CarnotStructure& raw);

// Sum_k omega_k A_k.
Mat omega_matrix(const CarnotStructure& W, const Vec& omega);

// Canonical form of a skew matrix: M X_i = -alpha_i Y_i, M Y_i = alpha_i X_i.
struct SkewSpectrum {
    std::vector<double> alphas;     // descending, all positive
    int kernel_dim = 0;
    std::vector<Vec> X, Y;          // one orthonormal pair per alpha
    Mat kernel_frame;               // d x kernel_dim, orthonormal columns
    bool has_ties = false;          // some |alpha_i - alpha_{i+1}| < kTieTol

    int d() const { return static_cast<int>(2 * alphas.size()) + kernel_dim; }
    // Diag(alpha_i J_2, 0) in the frame basis, mapped back to R^d.
    Mat reassemble() const;
};

// Throws NotSkew when max|M + M^T| > tol.
SkewSpectrum skew_spectrum(const Mat& M, double tol = 1e-10);

// Eigenvalues only; cheaper, used in the theta scans.
std::vector<double> skew_alphas(const Mat& M);

struct GenericityReport {
    double min_gap = 0.0;
    double min_alpha = 0.0;
    std::vector<Vec> integer_collisions;
    std::vector<Vec> probes;
    bool pass = true;
};

GenericityReport genericity_scan(const CarnotStructure& W, const Vec& p, int samples,
                                 double tol = 1e-9);

// (<X_i, A_k Y_i>)_k for plane i of the canonical form S of omega A: the
// gradient of alpha_i in omega, and the direction of that plane's half-line.
Vec plane_gradient(const CarnotStructure& W, const SkewSpectrum& S, int i);

// Unit covector on the circle of W (l == 2).
inline Vec circle_point(double theta) {
    Vec w(2);
    w << std::cos(theta), std::sin(theta);
    return w;
}

// 2x2 rotation block [[0,1],[-1,0]] embedded at rows/cols (i, i+1).
Mat j2_block(int d, int i, double scale = 1.0);

}  // namespace carnot

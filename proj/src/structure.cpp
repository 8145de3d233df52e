#include "carnot/structure.hpp"

#include <algorithm>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace carnot {

const char* error_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::NotSkew: return "NotSkew";
        case ErrorKind::DependentSpan: return "DependentSpan";
        case ErrorKind::BadDimensions: return "BadDimensions";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
        case ErrorKind::ConsistencyFailure: return "ConsistencyFailure";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::ZeroTarget: return "ZeroTarget";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::NotAMultiplier: return "NotAMultiplier";
        case ErrorKind::RankMismatch: return "RankMismatch";
        case ErrorKind::NonGenericTarget: return "NonGenericTarget";
        case ErrorKind::NotNested: return "NotNested";
        case ErrorKind::GuardViolated: return "GuardViolated";
        case ErrorKind::NotCommuting: return "NotCommuting";
        case ErrorKind::Precondition: return "Precondition";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

namespace {

double skew_defect(const Mat& A) { return (A + A.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

CarnotStructure validate_structure(const CarnotStructure& raw) {
    const int d = raw.d, l = raw.l;
    if (d < 1 || l < 1 || static_cast<int>(raw.matrices.size()) != l)
        throw Error(ErrorKind::BadDimensions, "need d >= 1, l >= 1 and l matrices");
    if (2 * l > d * (d - 1))
        throw Error(ErrorKind::BadDimensions, "l exceeds d(d-1)/2");
    CarnotStructure W{d, l, {}};
    for (int k = 0; k < l; ++k) {
        const Mat& A = raw.matrices[k];
        if (A.rows() != d || A.cols() != d)
            throw Error(ErrorKind::BadDimensions, "matrix " + std::to_string(k + 1) + " is not d x d");
        if (!A.allFinite())
            throw Error(ErrorKind::BadDimensions, "matrix " + std::to_string(k + 1) + " has non-finite entries");
        double defect = skew_defect(A);
        if (defect > kSkewTol)
            throw Error(ErrorKind::NotSkew, "matrix " + std::to_string(k + 1) + " has skew defect " +
                                                std::to_string(defect));
        W.matrices.push_back(0.5 * (A - A.transpose()));
    }
    Mat stack(l, d * d);
    for (int k = 0; k < l; ++k)
        stack.row(k) = Eigen::Map<const Eigen::RowVectorXd>(W.matrices[k].data(), d * d);
    Eigen::JacobiSVD<Mat> svd(stack);
    double smin = svd.singularValues()(l - 1);
    if (smin <= kIndependenceTol)
        throw Error(ErrorKind::DependentSpan, "smallest singular value " + std::to_string(smin));
    return W;
}

Mat omega_matrix(const CarnotStructure& W, const Vec& omega) {
    if (omega.size() != W.l) throw Error(ErrorKind::DimensionMismatch, "covector has wrong length");
    Mat M = Mat::Zero(W.d, W.d);
    for (int k = 0; k < W.l; ++k) M += omega(k) * W.matrices[k];
    return M;
}

Mat j2_block(int d, int i, double scale) {
    Mat M = Mat::Zero(d, d);
    M(i, i + 1) = scale;
    M(i + 1, i) = -scale;
    return M;
}

Mat SkewSpectrum::reassemble() const {
    const int n = d();
    Mat M = Mat::Zero(n, n);
    // M = sum alpha (X Y^T - Y X^T), from M Y = alpha X and M X = -alpha Y
    for (size_t i = 0; i < alphas.size(); ++i)
        M += alphas[i] * (X[i] * Y[i].transpose() - Y[i] * X[i].transpose());
    return M;
}

std::vector<double> skew_alphas(const Mat& M) {
    const int d = static_cast<int>(M.rows());
    const int m = d / 2;
    Eigen::MatrixXcd H = std::complex<double>(0.0, 1.0) * (0.5 * (M - M.transpose())).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    std::vector<double> a(m);
    for (int i = 0; i < m; ++i) a[i] = std::max(0.0, es.eigenvalues()(d - 1 - i));
    return a;
}

SkewSpectrum skew_spectrum(const Mat& Min, double tol) {
    if (Min.rows() != Min.cols()) throw Error(ErrorKind::BadDimensions, "matrix not square");
    const int d = static_cast<int>(Min.rows());
    SkewSpectrum S;
    if (d == 0) return S;
    if (skew_defect(Min) > tol) throw Error(ErrorKind::NotSkew, "input is not skew-symmetric");
    Mat M = 0.5 * (Min - Min.transpose());
    const double norm = M.norm();
    const double zero_thr = 1e-11 * norm;

    if (norm > 0.0) {
        Eigen::MatrixXcd H = std::complex<double>(0.0, 1.0) * M.cast<std::complex<double>>();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        for (int c = d - 1; c >= 0; --c) {
            double a = es.eigenvalues()(c);
            if (a <= zero_thr) break;
            Eigen::VectorXcd z = es.eigenvectors().col(c);
            Vec x = z.real() * std::numbers::sqrt2;
            Vec y = z.imag() * std::numbers::sqrt2;
            // iM z = a z gives M x = a y and M y = -a x
            Vec X = y, Y = x;
            // fix the in-plane rotation: first significant coordinate has Y = 0, X > 0
            for (int j = 0; j < d; ++j) {
                double r = std::hypot(X(j), Y(j));
                if (r > 1e-8) {
                    double c0 = X(j) / r, s0 = Y(j) / r;
                    Vec Xn = c0 * X + s0 * Y;
                    Vec Yn = -s0 * X + c0 * Y;
                    X = Xn;
                    Y = Yn;
                    break;
                }
            }
            S.alphas.push_back(a);
            S.X.push_back(X);
            S.Y.push_back(Y);
        }
    }
    const int m = static_cast<int>(S.alphas.size());
    S.kernel_dim = d - 2 * m;
    for (int i = 0; i + 1 < m; ++i)
        if (S.alphas[i] - S.alphas[i + 1] < kTieTol) S.has_ties = true;

    // kernel: Gram-Schmidt on projected standard basis vectors, in order
    Mat P = Mat::Identity(d, d);
    for (int i = 0; i < m; ++i) P -= S.X[i] * S.X[i].transpose() + S.Y[i] * S.Y[i].transpose();
    S.kernel_frame = Mat::Zero(d, S.kernel_dim);
    int found = 0;
    for (int j = 0; j < d && found < S.kernel_dim; ++j) {
        Vec v = P.col(j);
        for (int c = 0; c < found; ++c) v -= S.kernel_frame.col(c).dot(v) * S.kernel_frame.col(c);
        for (int c = 0; c < found; ++c) v -= S.kernel_frame.col(c).dot(v) * S.kernel_frame.col(c);
        double nv = v.norm();
        if (nv > 1e-6) S.kernel_frame.col(found++) = v / nv;
    }
    return S;
}

namespace {

double min_gap_of(const std::vector<double>& a) {
    double g = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < a.size(); ++i) g = std::min(g, a[i] - a[i + 1]);
    return g;
}

std::vector<Vec> sphere_probes(int l, int samples) {
    std::vector<Vec> out;
    if (l == 1) {
        Vec a(1), b(1);
        a << 1.0;
        b << -1.0;
        out = {a, b};
    } else if (l == 2) {
        for (int j = 0; j < samples; ++j) out.push_back(circle_point(2.0 * std::numbers::pi * j / samples));
    } else {
        std::mt19937_64 rng(0);
        std::normal_distribution<double> N(0.0, 1.0);
        for (int j = 0; j < samples; ++j) {
            Vec w(l);
            for (int k = 0; k < l; ++k) w(k) = N(rng);
            out.push_back(w / w.norm());
        }
    }
    return out;
}

}  // namespace

GenericityReport genericity_scan(const CarnotStructure& W, const Vec& p, int samples, double tol) {
    if (samples < 16) throw Error(ErrorKind::Precondition, "genericity_scan needs samples >= 16");
    if (p.size() != W.l) throw Error(ErrorKind::DimensionMismatch, "target has wrong length");
    GenericityReport R;
    R.probes = sphere_probes(W.l, samples);

    if (W.l == 2) {
        // gap local minima between grid nodes are refined by golden section
        const int n = static_cast<int>(R.probes.size());
        std::vector<double> gap(n);
        for (int j = 0; j < n; ++j) gap[j] = min_gap_of(skew_alphas(omega_matrix(W, R.probes[j])));
        const double h = 2.0 * std::numbers::pi / n;
        for (int j = 0; j < n; ++j) {
            double gl = gap[(j + n - 1) % n], gr = gap[(j + 1) % n];
            if (!(gap[j] <= gl && gap[j] <= gr) || !std::isfinite(gap[j])) continue;
            double a = (j - 1) * h, b = (j + 1) * h;
            auto f = [&](double t) { return min_gap_of(skew_alphas(omega_matrix(W, circle_point(t)))); };
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            double c = b - g * (b - a), e = a + g * (b - a);
            double fc = f(c), fe = f(e);
            for (int it = 0; it < 80; ++it) {
                if (fc < fe) {
                    b = e; e = c; fe = fc;
                    c = b - g * (b - a); fc = f(c);
                } else {
                    a = c; c = e; fc = fe;
                    e = a + g * (b - a); fe = f(e);
                }
            }
            R.probes.push_back(circle_point(0.5 * (a + b)));
        }
    }

    R.min_gap = std::numeric_limits<double>::infinity();
    R.min_alpha = std::numeric_limits<double>::infinity();
    for (const Vec& w : R.probes) {
        auto a = skew_alphas(omega_matrix(W, w));
        for (double x : a) R.min_alpha = std::min(R.min_alpha, x);
        for (size_t i = 0; i + 1 < a.size(); ++i) {
            double g = a[i] - a[i + 1];
            R.min_gap = std::min(R.min_gap, g);
            if (g < tol && a[i] > tol) {
                // every integer multiple of this ray meets both curves at once
                Vec c = w / a[i];
                if (c.dot(p) < 0) c = -c;
                bool seen = false;
                for (const Vec& o : R.integer_collisions) seen = seen || (o - c).norm() <= 1e-6 * c.norm();
                if (!seen) R.integer_collisions.push_back(c);
            }
        }
    }
    R.pass = R.min_gap > tol && R.min_alpha > tol && R.integer_collisions.empty();
    return R;
}

Vec plane_gradient(const CarnotStructure& W, const SkewSpectrum& S, int i) {
    Vec g(W.l);
    for (int k = 0; k < W.l; ++k) g(k) = S.X[i].dot(W.matrices[k] * S.Y[i]);
    return g;
}

}  // namespace carnot

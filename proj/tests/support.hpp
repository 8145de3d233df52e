#pragma once

#include <random>

#include "carnot/endpoint.hpp"
#include "carnot/structure.hpp"

namespace testsupport {

using carnot::CarnotStructure;
using carnot::Mat;
using carnot::Vec;

inline CarnotStructure heisenberg() {
    Mat A(2, 2);
    A << 0, 1, -1, 0;
    return carnot::validate_structure({2, 1, {A}});
}

// A1 = Diag(1 J, 2 J), A2 = Diag(2 J, 1 J)
inline CarnotStructure commuting_example() {
    Mat A1 = carnot::j2_block(4, 0, 1.0) + carnot::j2_block(4, 2, 2.0);
    Mat A2 = carnot::j2_block(4, 0, 2.0) + carnot::j2_block(4, 2, 1.0);
    return carnot::validate_structure({4, 2, {A1, A2}});
}

inline Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline Mat random_skew(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> N(0.0, 1.0);
    Mat A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = N(rng);
    return A - A.transpose();
}

inline Mat random_orthogonal(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> N(0.0, 1.0);
    Mat G(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = N(rng);
    Eigen::HouseholderQR<Mat> qr(G);
    return qr.householderQ() * Mat::Identity(d, d);
}

inline CarnotStructure random_structure(std::mt19937_64& rng, int d, int l) {
    std::vector<Mat> ms;
    for (int k = 0; k < l; ++k) ms.push_back(random_skew(rng, d));
    return carnot::validate_structure({d, l, ms});
}

// Commuting pair Q Diag(a_j J) Q^T, Q Diag(b_j J) Q^T with random (a_j, b_j).
inline CarnotStructure random_commuting(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    Mat Q = random_orthogonal(rng, d);
    Mat A1 = Mat::Zero(d, d), A2 = Mat::Zero(d, d);
    for (int i = 0; i + 1 < d; i += 2) {
        A1 += carnot::j2_block(d, i, U(rng));
        A2 += carnot::j2_block(d, i, U(rng));
    }
    return carnot::validate_structure({d, 2, {Q * A1 * Q.transpose(), Q * A2 * Q.transpose()}});
}

inline carnot::Control random_control(std::mt19937_64& rng, int d, int L, bool with_mean = false) {
    std::normal_distribution<double> N(0.0, 1.0);
    carnot::Control u = carnot::Control::zero(d, L);
    for (int k = 0; k < L; ++k)
        for (int i = 0; i < d; ++i) {
            u.U[k](i) = N(rng);
            u.V[k](i) = N(rng);
        }
    if (with_mean)
        for (int i = 0; i < d; ++i) u.mean(i) = N(rng);
    return u;
}

inline double rel_err(const Vec& a, const Vec& b) {
    double s = std::max(1.0, std::max(a.norm(), b.norm()));
    return (a - b).norm() / s;
}

inline double rel_err(const carnot::EndPoint& a, const carnot::EndPoint& b) {
    Vec x(a.horizontal.size() + a.vertical.size()), y(x.size());
    x << a.horizontal, a.vertical;
    y << b.horizontal, b.vertical;
    return rel_err(x, y);
}

}  // namespace testsupport

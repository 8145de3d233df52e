#pragma once

#include <map>
#include <utility>
#include <vector>

#include "carnot/structure.hpp"

namespace carnot {

// Piecewise constant inertia index on the covector circle.
//
// Full circle (finite case): values[k] holds on (breakpoints[k], breakpoints[k+1])
// cyclically; with no breakpoints there is one constant value.
// Open arc (analytic case): the arc is (lo, hi), values has one more entry than
// breakpoints, and the index is +infinity beyond both ends. lo == hi encodes the
// corank-1 case, where the admissible covectors form a single point.
struct IndexProfile {
    std::vector<double> breakpoints;
    std::vector<int> values;
    bool full_circle = false;
    double lo = 0.0, hi = 0.0;
    int form_dim = 0;        // N for forms on R^N, 0 for analytic profiles
    bool degenerate = false; // finite: an eigenvalue stays at 0 across a grid cell; analytic: s is a critical energy
    bool point() const { return !full_circle && lo == hi; }
    int max_value() const;
};

// Disjoint closed arcs [a, b], a in [0, 2 pi), a <= b < a + 2 pi; or the whole circle.
struct ArcSet {
    std::vector<std::pair<double, double>> arcs;
    bool full = false;
    bool empty() const { return !full && arcs.empty(); }
    int components() const { return full ? 1 : static_cast<int>(arcs.size()); }
};

struct BettiTable {
    std::map<int, int> reduced;  // degree -> reduced Z2 Betti number
    int total = 0;               // 1 + sum, or 0 for the empty set
    bool empty_set = false;
    bool guard_violated = false;
    int top_degree() const;      // -1 if nothing reduced
};

// i-(cos t q1 + sin t q2) on the full circle; changes located by bisection.
IndexProfile index_profile_finite(const Mat& q1, const Mat& q2, int grid = 720);

// Analytic index of the energy-constrained path space: on <omega, p> < 0,
// i- = 2 sum_i floor(s alpha_i(omega) / |<omega, p>|).
struct AnalyticOptions {
    int grid = 2048;
};
IndexProfile index_profile_analytic(const CarnotStructure& W, const Vec& p, double s,
                                    const AnalyticOptions& opt = {});

ArcSet sublevel_arcs(const IndexProfile& profile, int j);

struct RelativeBetti {
    int b0 = 0, b1 = 0;
};
// Z2 ranks of H_0, H_1 of the pair (A, B). Throws NotNested unless B lies in A.
RelativeBetti relative_betti(const ArcSet& A, const ArcSet& B);

BettiTable betti_from_profile(const IndexProfile& profile);

// 2 mu + 2 - b0(P_0) with mu the number of strict interior local maxima.
int total_betti_via_maxima(const IndexProfile& profile);

// (q1 + 0, 0 + 1) on R^{N+1}: its common zero set on S^N is {q1 = 0} on S^{N-1}.
std::pair<Mat, Mat> single_quadric_pencil(const Mat& q1);

// Forms G_k - p_k I / (2s) on T^1..T^L whose pencil index matches the analytic one.
std::pair<Mat, Mat> truncated_pencil(const CarnotStructure& W, const Vec& p, double s, int L);

}  // namespace carnot

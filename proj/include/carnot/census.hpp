#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carnot/endpoint.hpp"
#include "carnot/structure.hpp"

namespace carnot {

constexpr double kIntTol = 1e-9;
constexpr double kMergeTol = 1e-8;

struct Resonance {
    int plane = 0;  // label in the descending alpha order at omega
    int n = 0;
    bool operator==(const Resonance&) const = default;
};

struct CriticalManifold {
    Vec omega;
    std::vector<Resonance> resonances;
    int nu = 0;
    double energy = 0.0;  // omega . p
    int index = 0;
    ExponentialControl sample_control;
    bool boundary = false;  // single-resonance ray meets a double resonance here
};

struct CensusReport {
    std::vector<CriticalManifold> manifolds;  // ascending energy, then omega
    double s_max = 0.0;
    double cone_constant = 0.0;               // max |omega| / omega(p)
    std::map<int, int> counts_by_nu;
    int grid = 0;
    bool grid_too_coarse = false;             // a 2x grid rerun changed the result
};

enum class Exec { Serial, Parallel };

struct CensusOptions {
    int grid = 1024;
    Exec exec = Exec::Parallel;
    bool check_refinement = true;
    double int_tol = kIntTol;  // |alpha - n| <= int_tol max(1, n) counts as resonant
};

CensusReport enumerate_l1(const CarnotStructure& W, double p, double s);
CensusReport enumerate_l2(const CarnotStructure& W, const Vec& p, double s, const CensusOptions& opt = {});
// Dispatches on W.l.
CensusReport enumerate(const CarnotStructure& W, const Vec& p, double s, const CensusOptions& opt = {});

// Lowest critical energy for target p (the n = 1 circle when l = 1).
double base_energy(const CarnotStructure& W, const Vec& p, const CensusOptions& opt = {});

// 2 sum_i #{k >= 1 : alpha_i(omega)/k > 1 + kIntTol}
int manifold_index(const CarnotStructure& W, const Vec& omega);

// Integer polynomial, coeffs[k] multiplies t^k.
struct Polynomial {
    std::vector<long long> coeffs;
    long long at_one() const;
    std::string str() const;
};
Polynomial morse_bott_polynomial(const CensusReport& report);

struct TorusCheck {
    int rank = 0;
    int nullity = 0;
    double residual = 0.0;       // |q(sample) - p|
    double plane_energy_err = 0.0;
};
// Throws RankMismatch unless rank = min(l, nu) and nullity = nu, and
// ConsistencyFailure when the sample misses p.
TorusCheck torus_rank_check(const CarnotStructure& W, const Vec& p, const CriticalManifold& m);

struct GrowthRow {
    double s = 0.0;
    int count = 0;
    double cone_constant = 0.0;
    int wave_bound = 0;  // floor(c_p s)
    int max_wave = 0;    // largest resonant integer found
};
struct GrowthTable {
    std::vector<GrowthRow> rows;
    std::optional<double> exponent;  // slope of log count vs log s
};
// One census at max(s_list), filtered per s.
GrowthTable growth_diagnostics(const CarnotStructure& W, const Vec& p, const std::vector<double>& s_list,
                               const CensusOptions& opt = {});

}  // namespace carnot

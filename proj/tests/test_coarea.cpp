#include <numbers>
#include <sstream>

#include "carnot/census.hpp"
#include "carnot/coarea.hpp"
#include "carnot/quadrature.hpp"
#include "carnot/quadric.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace carnot;
using namespace testsupport;

namespace {
const double kPi = std::numbers::pi;

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Parse;
}
}  // namespace

TEST_CASE("tau: worked commuting instance") {
    auto W = commuting_example();
    Vec p = vec({0, 1});
    // single-counted integrand is 2 csc^2 between pi - atan 2 and pi - atan(1/2)
    const double x = kPi - std::atan(2.0), y = kPi - std::atan(0.5);
    const double oracle = integrate_gl([](double t) { return 2.0 / (std::sin(t) * std::sin(t)); }, x, y, 400, 8);
    CHECK(oracle == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(tau_commuting(W, p) == doctest::Approx(2 * oracle).epsilon(1e-12));
    CHECK(std::abs(tau_numeric(W, p) - 6.0) <= 1e-6);

    auto D = commuting_data(W, p);
    REQUIRE(D.v.size() == 2);
    std::vector<double> ms = {std::abs(D.m[0]), std::abs(D.m[1])};
    std::sort(ms.begin(), ms.end());
    CHECK(ms[0] == doctest::Approx(1.0));
    CHECK(ms[1] == doctest::Approx(2.0));
}

TEST_CASE("tau: numeric and closed form agree on random commuting pairs") {
    std::mt19937_64 rng(211);
    std::uniform_real_distribution<double> U(0.0, 2 * kPi);
    int done = 0;
    double worst = 0;
    while (done < 50) {
        const int d = 4 + 2 * (done % 3);
        auto W = random_commuting(rng, d);
        Vec p = 0.5 * (1 + done % 4) * circle_point(U(rng));
        double tn;
        try {
            tn = tau_numeric(W, p);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonGenericTarget);
            continue;
        }
        const double tc = tau_commuting(W, p);
        CHECK(tc >= 0);
        worst = std::max(worst, std::abs(tn - tc) / std::max(tc, 1e-12));
        CHECK(std::abs(tn - tc) <= 1e-4 * std::max(tc, 1e-12));
        ++done;
    }
    MESSAGE("worst relative gap " << worst);
}

TEST_CASE("tau: target parallel to an eigenvalue vector") {
    auto W = commuting_example();
    for (Vec p : {vec({1, 2}), vec({2, 1.0 + 1e-3}), vec({-3, 1})}) {
        double tc, tn;
        try {
            tc = tau_commuting(W, p);
            tn = tau_numeric(W, p);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonGenericTarget);
            continue;
        }
        CHECK(std::abs(tn - tc) <= 1e-4 * std::max(tc, 1e-12));
    }
}

TEST_CASE("tau: scaling the target divides tau") {
    std::mt19937_64 rng(223);
    for (int k = 0; k < 5; ++k) {
        auto W = random_commuting(rng, 6);
        Vec p = circle_point(0.4 + k);
        for (double c : {0.5, 2.0, 7.0}) {
            CHECK(tau_commuting(W, c * p) == doctest::Approx(tau_commuting(W, p) / c).epsilon(1e-10));
            CHECK(tau_numeric(W, c * p) == doctest::Approx(tau_numeric(W, p) / c).epsilon(1e-6));
        }
    }
    // generic, non-commuting
    auto W = random_structure(rng, 6, 2);
    Vec p = vec({0.3, -1.1});
    CHECK(tau_numeric(W, 2 * p) == doctest::Approx(tau_numeric(W, p) / 2).epsilon(1e-6));
}

TEST_CASE("lambda curves: doubling, periodicity, closed form, derivatives") {
    auto W = commuting_example();
    Vec p = vec({0, 1});
    LambdaCurves C(W, p);
    CHECK(C.singular_angles()[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(C.singular_angles()[1] == doctest::Approx(kPi));
    std::mt19937_64 rng(227);
    std::uniform_real_distribution<double> U(0.05, kPi - 0.05);
    for (int k = 0; k < 100; ++k) {
        const double t = U(rng);
        auto v = C.values(t);
        REQUIRE(v.size() == 4);
        CHECK(v[0] == v[1]);
        CHECK(v[2] == v[3]);
        auto w = C.values(t + kPi);
        for (int j = 0; j < 4; ++j) CHECK(w[j] == doctest::Approx(v[j]).epsilon(1e-10));
        const double c = std::cos(t), s = std::sin(t);
        std::vector<double> want = {std::abs(c + 2 * s) / s, std::abs(2 * c + s) / s};
        std::sort(want.rbegin(), want.rend());
        CHECK(v[0] == doctest::Approx(want[0]).epsilon(1e-10));
        CHECK(v[2] == doctest::Approx(want[1]).epsilon(1e-10));
        CHECK(C.integrand(t) >= 0);
    }
    // Hellmann-Feynman against central differences on a generic structure
    auto G = random_structure(rng, 8, 2);
    LambdaCurves D(G, vec({1.0, 0.4}));
    for (int k = 0; k < 20; ++k) {
        const double t = D.half_lo() + 0.1 + (kPi - 0.2) * (k + 0.5) / 20;
        const double h = 1e-6;
        auto d = D.derivatives(t), vp = D.values(t + h), vm = D.values(t - h);
        for (size_t j = 0; j < d.size(); ++j) {
            const double fd = (vp[j] - vm[j]) / (2 * h);
            CHECK(d[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("lambda curves: CSV dump") {
    auto W = commuting_example();
    LambdaCurves C(W, vec({0, 1}));
    std::ostringstream os;
    C.write_csv(os, 16);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "theta,lambda_1,lambda_2,lambda_3,lambda_4,integrand");
    int rows = 0;
    while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
        ++rows;
    }
    CHECK(rows == 16);
    std::ostringstream again;
    C.write_csv(again, 16);
    CHECK(again.str() == os.str());
}

TEST_CASE("tau: errors") {
    std::mt19937_64 rng(229);
    auto G = random_structure(rng, 4, 2);
    CHECK(kind_of([&] { tau_commuting(G, vec({1, 0})); }) == ErrorKind::NotCommuting);
    CHECK(kind_of([&] { tau_numeric(heisenberg(), vec({1})); }) == ErrorKind::Precondition);
    CHECK(kind_of([&] { tau_numeric(G, vec({0, 0})); }) == ErrorKind::ZeroTarget);
    CHECK(kind_of([&] { tau_numeric(G, vec({1, 0}), 100); }) == ErrorKind::Precondition);
    // alpha_2 = |2 w1 + w2| vanishes on the line orthogonal to (2, 1)
    CHECK(kind_of([&] { tau_numeric(commuting_example(), vec({2, 1})); }) == ErrorKind::NonGenericTarget);
}

TEST_CASE("base energy") {
    CHECK(base_energy(heisenberg(), vec({-2.5})) == doctest::Approx(2.5));
    auto W = commuting_example();
    Vec p = vec({0, 1});
    const double e1 = base_energy(W, p);
    CHECK(e1 == doctest::Approx(1.0).epsilon(1e-9));
    auto R = enumerate_l2(W, p, 3.0);
    REQUIRE_FALSE(R.manifolds.empty());
    CHECK(R.manifolds.front().energy == doctest::Approx(e1).epsilon(1e-12));
}

TEST_CASE("slope check: preconditions") {
    auto W = commuting_example();
    Vec p = vec({0, 1});
    CHECK(kind_of([&] { slope_check(heisenberg(), vec({1}), {1, 2, 4, 8, 16}); }) == ErrorKind::Precondition);
    CHECK(kind_of([&] { slope_check(W, p, {1.1, 2.2, 4.4, 8.8}); }) == ErrorKind::Precondition);
    CHECK(kind_of([&] { slope_check(W, p, {1.1, 2.2, 4.4, 8.8, 20.3}); }) == ErrorKind::Precondition);
    CHECK(kind_of([&] { slope_check(W, p, {0.11, 0.22, 0.44, 0.88, 1.76}); }) == ErrorKind::Precondition);
    // 25 = (2n + m)/3 for many (n, m): a critical level
    CHECK(kind_of([&] { slope_check(W, p, {1.5625, 3.125, 6.25, 12.5, 25, 50, 100, 200}); }) ==
          ErrorKind::Precondition);
}

TEST_CASE("slope check: Betti slope follows the single-counted integral") {
    auto W = commuting_example();
    Vec p = vec({0, 1});
    std::vector<double> s;
    for (int k = 0; k < 8; ++k) s.push_back(200.3 * std::pow(2.0, k - 7));
    auto R = slope_check(W, p, s);
    CHECK(R.tau == doctest::Approx(6.0).epsilon(1e-6));
    for (size_t k = 1; k < s.size(); ++k) CHECK(R.betti[k] >= R.betti[k - 1]);
    // each local maximum of the index needs one up and one down jump of the
    // same plane pair, which the doubled integrand counts twice
    CHECK(R.slope == doctest::Approx(R.tau / 2).epsilon(0.02));
}

TEST_CASE("analytic profile flags critical levels") {
    auto W = commuting_example();
    Vec p = vec({0, 1});
    CHECK(index_profile_analytic(W, p, 25.0).degenerate);
    CHECK_FALSE(index_profile_analytic(W, p, 25.1).degenerate);
    CHECK(index_profile_analytic(heisenberg(), vec({1.0}), 3.0).degenerate);
    CHECK_FALSE(index_profile_analytic(heisenberg(), vec({1.0}), 3.1).degenerate);
}

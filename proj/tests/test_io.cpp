#include <omp.h>

#include <cstdlib>

#include "carnot/io.hpp"
#include "carnot/parallel.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace carnot;
using namespace testsupport;

namespace {
std::string parse_error(const std::string& text) {
    try {
        parse_structure(text, "mem");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        return e.what();
    }
    FAIL("accepted");
    return "";
}
}  // namespace

TEST_CASE("io: structure round trip") {
    std::mt19937_64 rng(307);
    auto W = random_structure(rng, 5, 3);
    auto back = parse_structure(structure_to_json(W));
    REQUIRE(back.d == 5);
    REQUIRE(back.l == 3);
    for (int k = 0; k < 3; ++k) CHECK((back.matrices[k] - W.matrices[k]).norm() == 0.0);
    CHECK(structure_to_json(back) == structure_to_json(W));
}

TEST_CASE("io: flat row-major matrices") {
    auto W = parse_structure(R"({"schema": "carnot-structure/1", "d": 2, "l": 1, "matrices": [[0, 1, -1, 0]]})");
    CHECK(W.matrices[0](0, 1) == 1.0);
    CHECK(W.matrices[0](1, 0) == -1.0);
}

TEST_CASE("io: forms and controls round trip") {
    std::mt19937_64 rng(311);
    Mat q1 = Mat::Random(4, 4), q2 = Mat::Random(4, 4);
    q1 = q1 + q1.transpose();
    q2 = q2 + q2.transpose();
    auto [a, b] = parse_forms(forms_to_json(q1, q2));
    CHECK((a - q1).norm() == 0.0);
    CHECK((b - q2).norm() == 0.0);

    auto u = random_control(rng, 3, 4, true);
    auto v = parse_control(control_to_json(u));
    CHECK(v.L == 4);
    CHECK((v.mean - u.mean).norm() == 0.0);
    for (int k = 0; k < 4; ++k) {
        CHECK((v.U[k] - u.U[k]).norm() == 0.0);
        CHECK((v.V[k] - u.V[k]).norm() == 0.0);
    }
}

TEST_CASE("io: errors carry the line") {
    std::string bad = "{\n  \"schema\": \"carnot-structure/1\",\n  \"d\": 2,\n  \"l\": 1\n  \"matrices\": []\n}\n";
    CHECK(parse_error(bad).find("mem:5:") != std::string::npos);

    std::string missing = "{\n  \"schema\": \"carnot-structure/1\",\n  \"d\": 2,\n  \"l\": 1\n}\n";
    CHECK(parse_error(missing).find("missing field 'matrices'") != std::string::npos);

    std::string rows = "{\n\"schema\": \"carnot-structure/1\",\n\"d\": 2,\n\"l\": 1,\n\"matrices\": [[[0, 1]]]\n}";
    CHECK(parse_error(rows).find("mem:5:") != std::string::npos);

    std::string schema = R"({"schema": "carnot-structure/9", "d": 2, "l": 1, "matrices": [[[0, 1], [-1, 0]]]})";
    CHECK(parse_error(schema).find("schema") != std::string::npos);

    std::string count = R"({"schema": "carnot-structure/1", "d": 2, "l": 2, "matrices": [[[0, 1], [-1, 0]]]})";
    CHECK(parse_error(count).find("l = 2") != std::string::npos);

    CHECK(parse_error("[1, 2]").find("top level") != std::string::npos);
}

TEST_CASE("io: real lists and formatting") {
    Vec v = parse_real_list("1,-2.5, 3e-2", "--p");
    REQUIRE(v.size() == 3);
    CHECK(v(2) == 0.03);
    CHECK_THROWS_AS(parse_real_list("1,x", "--p"), Error);
    CHECK_THROWS_AS(parse_real_list("1,2y", "--p"), Error);
    CHECK(fmt_real(3.14159265358979) == "3.14159265359");
    CHECK(fmt_real(-0.0) == "0");
    CHECK(fmt_real(1e-20) == "1e-20");
    CHECK(join_reals(vec({1, 0.5})) == "1;0.5");
}

TEST_CASE("error kinds map to exit classes") {
    CHECK(is_numerical(ErrorKind::NoConvergence));
    CHECK(is_numerical(ErrorKind::ConsistencyFailure));
    CHECK_FALSE(is_numerical(ErrorKind::NotSkew));
    CHECK_FALSE(is_numerical(ErrorKind::Parse));
}

TEST_CASE("thread cap from the environment") {
    const int before = max_threads();
    setenv("CARNOT_THREADS", "1", 1);
    CHECK(apply_thread_env() == 1);
    setenv("CARNOT_THREADS", "junk", 1);
    CHECK(apply_thread_env() == 1);
    unsetenv("CARNOT_THREADS");
    omp_set_num_threads(before);
    CHECK(max_threads() == before);
}

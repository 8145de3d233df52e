// Serial reference vs OpenMP kernels. Thread count follows CARNOT_THREADS / OMP_NUM_THREADS.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <functional>
#include <random>

#include "carnot/census.hpp"
#include "carnot/coarea.hpp"
#include "carnot/endpoint.hpp"
#include "carnot/parallel.hpp"
#include "carnot/quadric.hpp"

using namespace carnot;

namespace {

CarnotStructure commuting() {
    Mat A1 = j2_block(4, 0, 1.0) + j2_block(4, 2, 2.0);
    Mat A2 = j2_block(4, 0, 2.0) + j2_block(4, 2, 1.0);
    return validate_structure({4, 2, {A1, A2}});
}

CarnotStructure generic(int d) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<Mat> ms;
    for (int k = 0; k < 2; ++k) {
        Mat A(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) A(i, j) = N(rng);
        ms.push_back(A - A.transpose());
    }
    return validate_structure({d, 2, ms});
}

Vec target() {
    Vec p(2);
    p << 0.6, 0.8;
    return p;
}

void census(benchmark::State& st, Exec exec) {
    const auto W = generic(6);
    CensusOptions opt;
    opt.exec = exec;
    opt.check_refinement = false;
    const double s = 8 * base_energy(W, target(), opt);
    size_t n = 0;
    for (auto _ : st) n = enumerate_l2(W, target(), s, opt).manifolds.size();
    st.counters["manifolds"] = static_cast<double>(n);
    st.counters["threads"] = exec == Exec::Parallel ? max_threads() : 1;
}

void BM_census_serial(benchmark::State& st) { census(st, Exec::Serial); }
void BM_census_parallel(benchmark::State& st) { census(st, Exec::Parallel); }

// the remaining kernels have no Exec switch; the thread count is the knob
void with_threads(benchmark::State& st, const std::function<void()>& body) {
    const int before = max_threads();
    const int t = st.range(0) > 0 ? static_cast<int>(st.range(0)) : omp_get_num_procs();  // 0: all cores
    omp_set_num_threads(t);
    for (auto _ : st) body();
    omp_set_num_threads(before);
    st.counters["threads"] = t;
}

void BM_index_profile_finite(benchmark::State& st) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0.0, 1.0);
    Mat q1(24, 24), q2(24, 24);
    for (int i = 0; i < 24; ++i)
        for (int j = 0; j < 24; ++j) q1(i, j) = N(rng), q2(i, j) = N(rng);
    q1 = q1 + q1.transpose();
    q2 = q2 + q2.transpose();
    with_threads(st, [&] { benchmark::DoNotOptimize(index_profile_finite(q1, q2, 1024)); });
}

void BM_index_profile_analytic(benchmark::State& st) {
    const auto W = commuting();
    with_threads(st, [&] { benchmark::DoNotOptimize(index_profile_analytic(W, target(), 60.1)); });
}

void BM_tau_numeric(benchmark::State& st) {
    const auto W = generic(8);
    with_threads(st, [&] { benchmark::DoNotOptimize(tau_numeric(W, target(), 1024)); });
}

}  // namespace

BENCHMARK(BM_census_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_census_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_index_profile_finite)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_index_profile_analytic)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tau_numeric)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    apply_thread_env();
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}

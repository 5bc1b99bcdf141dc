#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "ivpb/collision_ops.hpp"
#include "ivpb/field_solver.hpp"
#include "ivpb/time_stepper.hpp"

using namespace ivpb;

namespace {

RunConfig bench_config(int nv, int nx) {
    RunConfig c;
    c.nx = {nx};
    c.nv = nv;
    c.init.a = {0.01, 1, 0};
    c.init.micro = {0.002, 1, 0};
    return c;
}

std::shared_ptr<const CollisionTables> tables(int nv) {
    static std::shared_ptr<const CollisionTables> cache[64];
    if (!cache[nv])
        cache[nv] = std::make_shared<const CollisionTables>(build_K_matrix(VelocityGrid(6.0, nv), lattice_sphere(26)));
    return cache[nv];
}

void BM_BuildTables(benchmark::State& st) {
    const VelocityGrid vg(6.0, static_cast<int>(st.range(0)));
    const SphereQuadrature q = lattice_sphere(26);
    for (auto _ : st) benchmark::DoNotOptimize(build_K_matrix(vg, q).k.data());
}
BENCHMARK(BM_BuildTables)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Gamma(benchmark::State& st) {
    const int nv = static_cast<int>(st.range(0));
    const Model m(bench_config(nv, 32), tables(nv));
    const Eigen::MatrixXd f = build_initial_data(m, m.config().init).field.values;
    for (auto _ : st) benchmark::DoNotOptimize(gamma(f, f, m.pert_kernel()).data());
    st.SetItemsProcessed(st.iterations() * f.cols());
}
BENCHMARK(BM_Gamma)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ApplyL(benchmark::State& st) {
    const int nv = static_cast<int>(st.range(0));
    const auto t = tables(nv);
    const Eigen::MatrixXd f = Eigen::MatrixXd::Random(t->nu.size(), 32);
    for (auto _ : st) benchmark::DoNotOptimize(apply_L(f, *t).data());
    st.SetItemsProcessed(st.iterations() * f.cols());
}
BENCHMARK(BM_ApplyL)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Poisson(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const SpatialGrid sg({n});
    const Fourier fft(sg);
    ScalarFieldX rho(n);
    for (int i = 0; i < n; ++i) rho[i] = 1.0 + 0.3 * std::cos(2 * std::numbers::pi * i / n);
    for (auto _ : st) benchmark::DoNotOptimize(solve_poisson_poincare(fft, rho).phi.data());
}
BENCHMARK(BM_Poisson)->Arg(32)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_Poisson2D(benchmark::State& st) {
    const SpatialGrid sg({64, 64});
    const Fourier fft(sg);
    ScalarFieldX rho(sg.size());
    for (std::size_t i = 0; i < sg.size(); ++i)
        rho[i] = 1.0 + 0.2 * std::cos(2 * std::numbers::pi * sg.coord(i, 0)) * std::sin(2 * std::numbers::pi * sg.coord(i, 1));
    for (auto _ : st) benchmark::DoNotOptimize(solve_poisson_poincare(fft, rho).phi.data());
}
BENCHMARK(BM_Poisson2D)->Unit(benchmark::kMicrosecond);

void BM_Step(benchmark::State& st) {
    const int nv = static_cast<int>(st.range(0));
    RunConfig c = bench_config(nv, 32);
    c.mode = st.range(1) ? Mode::Physical : Mode::Perturbation;
    const Model m(c, tables(nv));
    const SimState s = build_initial_data(m, c.init);
    for (auto _ : st) benchmark::DoNotOptimize(step(m, s, c.resolved_dt()).field.values.data());
}
BENCHMARK(BM_Step)->Args({8, 0})->Args({8, 1})->Args({12, 0})->Args({12, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

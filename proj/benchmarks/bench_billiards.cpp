#include <benchmark/benchmark.h>

#include "billiards/conformal.hpp"
#include "billiards/correspondence.hpp"
#include "billiards/presets.hpp"
#include "billiards/runner.hpp"
#include "billiards/scenario.hpp"

using namespace billiards;

namespace {

void BM_StepPlane(benchmark::State& st) {
    const SpaceSpec sp = SpaceSpec::plane(0.5, +1);
    const LagrangeParams params{0.2, 0.15, -0.1};
    const PlaneState s{GnomonicPoint{{0.05, 0.1}}, GnomonicVector{{1.0, 0.3}}, 0.0};
    for (auto _ : st) benchmark::DoNotOptimize(step(s, params, sp, 1e-2));
}
BENCHMARK(BM_StepPlane);

void BM_StepSphere(benchmark::State& st) {
    const SpaceSpec sp = SpaceSpec::sphere(0.5);
    const LagrangeParams params{0.2, 0.15, -0.1};
    const CurvedState s = partner_state(PlaneState{GnomonicPoint{{0.05, 0.1}}, GnomonicVector{{1.0, 0.3}}, 0.0}, sp);
    for (auto _ : st) benchmark::DoNotOptimize(step(s, params, sp, 1e-2));
}
BENCHMARK(BM_StepSphere);

void BM_SimulatePreset(benchmark::State& st, const char* name) {
    const Scenario s = *find_preset(name);
    for (auto _ : st) {
        if (s.space.curved())
            benchmark::DoNotOptimize(simulate(curved_init(s), s.params, s.space, s.wall, s.limits, s.integrator_options()));
        else
            benchmark::DoNotOptimize(simulate(plane_init(s), s.params, s.space, s.wall, s.limits, s.integrator_options()));
    }
}
BENCHMARK_CAPTURE(BM_SimulatePreset, lagrange_full_plane, "lagrange-full-plane")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimulatePreset, lagrange_full_sphere, "lagrange-full-sphere")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimulatePreset, lagrange_full_hyperbolic, "lagrange-full-hyperbolic")->Unit(benchmark::kMillisecond);

void BM_RunScenarioWithTwin(benchmark::State& st) {
    const Scenario s = *find_preset("lagrange-full-sphere");
    for (auto _ : st) benchmark::DoNotOptimize(run_scenario(s));
}
BENCHMARK(BM_RunScenarioWithTwin)->Unit(benchmark::kMillisecond);

void BM_ConfocalImageCheck(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(confocal_image_check(0.3, 0.6, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_ConfocalImageCheck)->Arg(200)->Arg(2000);

void BM_OrbitCorrespondence(benchmark::State& st) {
    const ConformalSystem hooke{ConformalKind::SphericalHooke, 0.3};
    for (auto _ : st)
        benchmark::DoNotOptimize(
            verify_orbit_correspondence(Pairing::SphericalHookeKepler, hooke, cplx(0.4, 0.1), cplx(0.2, 0.9)));
}
BENCHMARK(BM_OrbitCorrespondence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

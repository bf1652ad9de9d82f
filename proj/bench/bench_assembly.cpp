// Serial dense reference vs OpenMP banded assembly on the slotted-ring mesh.
#include "beam/mixedfem.hpp"

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <numbers>
#include <string>

using namespace beam;

namespace {

struct Fixture {
    std::unique_ptr<Discretization> d;
    std::unique_ptr<SystemLayout> layout;
    GlobalState s;

    explicit Fixture(int n_el) {
        const double pi = std::numbers::pi, slot = pi / 180;
        const NurbsCurve c = make_arc(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), 1.3, slot / 2, 2 * pi - slot, 3, n_el, 4);
        SectionOptions so;
        so.cs = {0.3, 0.4, 1.0};
        so.eas = {2, 2, 0, 4};
        d = std::make_unique<Discretization>(
            make_initial_geometry(c, 3, FrameMethod::SmallestRotation, Vec3::UnitZ(), DirectorMode::Discrete), so,
            MaterialLaw::make(MaterialKind::NeoHookean, 1.12e7, 0.4));
        BoundaryConditions bc;
        bc.dirichlet = {DirichletCondition{}};
        layout = std::make_unique<SystemLayout>(*d, resolve_dirichlet(*d, bc).dofs);
        s = d->initial_state();
        for (int i = 0; i < s.y.size(); ++i) s.y[i] += 1e-3 * std::sin(0.7 * i);
        for (int i = 0; i < s.r.size(); ++i) s.r[i] = std::cos(0.3 * i);
    }
};

void BM_serial_reference(benchmark::State& st) {
    Fixture f(static_cast<int>(st.range(0)));
    const StepInput in{Scheme::EMC, 0.1, &f.s, &f.s};
    Eigen::VectorXd R;
    for (auto _ : st) benchmark::DoNotOptimize(assemble_dense_reference(*f.d, in, R));
}

void BM_parallel_banded(benchmark::State& st) {
    Fixture f(static_cast<int>(st.range(0)));
    const StepInput in{Scheme::EMC, 0.1, &f.s, &f.s};
    const std::string threads = std::to_string(st.range(1));
    setenv("BEAMSOLVE_THREADS", threads.c_str(), 1);
    st.counters["threads"] = static_cast<double>(configured_threads());
    for (auto _ : st) benchmark::DoNotOptimize(assemble(*f.d, *f.layout, in));
    unsetenv("BEAMSOLVE_THREADS");
}

}  // namespace

BENCHMARK(BM_serial_reference)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel_banded)->Args({40, 1})->Args({40, 4})->Args({80, 1})->Args({80, 4})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

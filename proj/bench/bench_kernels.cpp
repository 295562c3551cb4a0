// Parallel kernel sums against the serial references that rebuild every
// weight from the closed forms.

#include <benchmark/benchmark.h>

#include <cmath>

#include "fraclab/kernels.hpp"

namespace {

using namespace fraclab;

ScalarField sample_field(const GridPtr& g) {
    ScalarField u(g, 0.0, 2.0);
    for (std::size_t k = 0; k < g->size(); ++k) {
        const double x = g->coord(k, 0), y = g->dim == 2 ? g->coord(k, 1) : 0.0;
        u[k] = std::tanh(4 * (x + 0.3 * y));
    }
    u.far = {-1.0, 1.0};
    return u;
}

GridPtr grid_for(int dim, int n) {
    return dim == 1 ? build_grid(interval(-1, 1), 2.0 / n, 4) : build_grid(disk(0, 0, 1), 2.0 / n, 4);
}

void BM_Energy(benchmark::State& st, int dim, bool serial) {
    const auto g = grid_for(dim, static_cast<int>(st.range(0)));
    const KernelOperator op(g, 0.25);
    const auto u = sample_field(g);
    for (auto _ : st) benchmark::DoNotOptimize(serial ? op.energy_serial(u) : op.energy(u));
    st.counters["nodes"] = static_cast<double>(g->size());
}

void BM_Gradient(benchmark::State& st, int dim, bool serial) {
    const auto g = grid_for(dim, static_cast<int>(st.range(0)));
    const KernelOperator op(g, 0.25);
    const auto u = sample_field(g);
    std::vector<double> grad;
    std::array<double, 2> gfar{};
    for (auto _ : st) {
        if (serial)
            op.gradient_serial(u, grad, gfar);
        else
            op.gradient(u, grad, gfar);
        benchmark::DoNotOptimize(grad.data());
    }
    st.counters["nodes"] = static_cast<double>(g->size());
}

}  // namespace

BENCHMARK_CAPTURE(BM_Energy, 1d_parallel, 1, false)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Energy, 1d_serial, 1, true)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gradient, 1d_parallel, 1, false)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gradient, 1d_serial, 1, true)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Energy, 2d_parallel, 2, false)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Energy, 2d_serial, 2, true)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

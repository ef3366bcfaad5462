#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "egm/cauchy.hpp"
#include "egm/interp.hpp"
#include "egm/lorentz.hpp"
#include "egm/operators.hpp"

using namespace egm;

namespace {

std::vector<Biquaternion> random_values(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Biquaternion> out(n);
    for (auto& b : out)
        b = {Complex(u(rng), u(rng)),
             {Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng))}};
    return out;
}

BiquatField trig_field(const Grid4& g) {
    return BiquatField::sample(g, [](double tau, const Vec3& p) {
        const double c = std::cos(1.3 * tau - 0.9 * p.x + 0.5 * p.y);
        const double s = std::sin(0.7 * p.z + tau);
        return Biquaternion{Complex(c, s), {Complex(s, c), Complex(c), Complex(0.5 * s)}};
    });
}

} // namespace

static void BM_BiquatProduct(benchmark::State& state) {
    const auto vals = random_values(4096, 17);
    std::size_t i = 0;
    for (auto _ : state) {
        const Biquaternion r = mul(vals[i % 4096], vals[(i + 1) % 4096]);
        benchmark::DoNotOptimize(r);
        ++i;
    }
}
BENCHMARK(BM_BiquatProduct);

static void BM_MutualGradient(benchmark::State& state) {
    const int n = int(state.range(0));
    const Grid4 g(8, n, n, n, 0.05, 0.1);
    const BiquatField f = trig_field(g);
    for (auto _ : state) {
        const BiquatField d = d_plus(f);
        benchmark::DoNotOptimize(d.raw().data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(g.node_count()));
}
BENCHMARK(BM_MutualGradient)->Arg(16)->Arg(32);

static void BM_BoxDirect(benchmark::State& state) {
    const int n = int(state.range(0));
    const Grid4 g(8, n, n, n, 0.05, 0.1);
    const BiquatField f = trig_field(g);
    for (auto _ : state) {
        const BiquatField d = box_direct(f);
        benchmark::DoNotOptimize(d.raw().data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(g.node_count()));
}
BENCHMARK(BM_BoxDirect)->Arg(16)->Arg(32);

static void BM_ConeQuadrature(benchmark::State& state) {
    const SphereQuadrature q(int(state.range(0)));
    auto source = [](double sigma, const Vec3& y) {
        return Biquaternion::scalar(Complex(std::exp(-dot(y, y)) * std::cos(sigma)));
    };
    for (auto _ : state) {
        const Biquaternion v = convolve_wave(source, 1.0, {0.1, 0.2, -0.3}, q, 16);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_ConeQuadrature)->Arg(8)->Arg(16);

static void BM_Interpolate(benchmark::State& state) {
    const Grid4 g(12, 24, 24, 24, 0.1, 0.1);
    const BiquatField f = trig_field(g);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.3, 1.9);
    const int order = int(state.range(0));
    for (auto _ : state) {
        Biquaternion out;
        interpolate(f, u(rng), {u(rng), u(rng), u(rng)}, order, out);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_Interpolate)->Arg(1)->Arg(2);

static void BM_EventTransform(benchmark::State& state) {
    const LorentzElement L = make_transform(TransformParams::boost({1, 0, 0}, 0.6));
    const auto vals = random_values(4096, 29);
    std::size_t i = 0;
    for (auto _ : state) {
        const Biquaternion r = transform_field_value(L, vals[i % 4096]);
        benchmark::DoNotOptimize(r);
        ++i;
    }
}
BENCHMARK(BM_EventTransform);

BENCHMARK_MAIN();

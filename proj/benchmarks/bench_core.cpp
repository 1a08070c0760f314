#include <benchmark/benchmark.h>

#include <random>

#include "qem/parser.hpp"
#include "qem/poly.hpp"

namespace {

using namespace qem;

RingPtr bench_ring() {
    static RingPtr r = Ring::make(FieldDescriptor::rationals(), {"t", "u", "x", "y"});
    return r;
}

Poly random_poly(std::mt19937& rng, const RingPtr& r, int terms, int max_exp) {
    std::uniform_int_distribution<int> cdist(-9, 9);
    std::uniform_int_distribution<std::uint32_t> edist(0, max_exp);
    Poly f(r);
    for (int i = 0; i < terms; ++i) {
        Exponents e(r->arity());
        for (auto& x : e) x = edist(rng);
        int c = cdist(rng);
        if (c == 0) c = 1;
        f.add_term(e, FieldValue::from_integer(r->field(), c));
    }
    return f;
}

void BM_PolyMul(benchmark::State& state) {
    std::mt19937 rng(42);
    auto r = bench_ring();
    const Poly f = random_poly(rng, r, static_cast<int>(state.range(0)), 4);
    const Poly g = random_poly(rng, r, static_cast<int>(state.range(0)), 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(f * g);
    }
}
BENCHMARK(BM_PolyMul)->Arg(8)->Arg(32)->Arg(64);

void BM_Substitute(benchmark::State& state) {
    std::mt19937 rng(43);
    auto r = bench_ring();
    const Poly f = random_poly(rng, r, 16, 3);
    std::map<std::string, Poly> im;
    for (const auto& v : r->vars()) im.emplace(v, random_poly(rng, r, 4, 2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(substitute(f, im));
    }
}
BENCHMARK(BM_Substitute);

void BM_ParsePrintRoundTrip(benchmark::State& state) {
    std::mt19937 rng(44);
    auto r = bench_ring();
    const std::string text = random_poly(rng, r, 32, 4).str();
    for (auto _ : state) {
        benchmark::DoNotOptimize(parse_poly(text, r));
    }
}
BENCHMARK(BM_ParsePrintRoundTrip);

} // namespace

BENCHMARK_MAIN();

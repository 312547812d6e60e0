#include <benchmark/benchmark.h>

#include "cline/extension.hpp"
#include "cline/order_analysis.hpp"
#include "cline/sequences.hpp"
#include "cline/witnesses.hpp"

using namespace cline;

static void BM_OrdinalCompare(benchmark::State& state)
{
    Ordinal a = parse_ordinal("w^3.2+w^2.5+w.7+3");
    Ordinal b = parse_ordinal("w^3.2+w^2.5+w.7+4");
    for (auto _ : state)
        benchmark::DoNotOptimize(a < b);
}
BENCHMARK(BM_OrdinalCompare);

static void BM_EnumerateCompare(benchmark::State& state)
{
    Term t = term_b_n(static_cast<std::uint64_t>(state.range(0)));
    std::vector<LinePoint> pts = enumerate(t, 64);
    for (auto _ : state) {
        int lt = 0;
        for (const auto& a : pts)
            for (const auto& b : pts)
                lt += less(t, a, b);
        benchmark::DoNotOptimize(lt);
    }
}
BENCHMARK(BM_EnumerateCompare)->Arg(1)->Arg(3)->Arg(5);

static void BM_InternalOrderBn(benchmark::State& state)
{
    Term t = term_b_n(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(io(t, Region::full()));
}
BENCHMARK(BM_InternalOrderBn)->DenseRange(1, 4);

static void BM_InternalOrderBigode(benchmark::State& state)
{
    Term l = term_bigode_l();
    for (auto _ : state)
        benchmark::DoNotOptimize(io(l, Region::full()));
}
BENCHMARK(BM_InternalOrderBigode);

static void BM_GlueBlocks(benchmark::State& state)
{
    Term k = Term::ordinal_segment(parse_ordinal("w^2"));
    std::vector<GlueBlock> blocks;
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(state.range(0)); ++j) {
        Ordinal base = Ordinal::power(1, j + 1);
        Interval iv{ordinal_point(k, base + Ordinal::finite(1)), ordinal_point(k, base + Ordinal::finite(4))};
        Measure nu(k);
        nu.add_atom(iv.lo, Rational(1, j + 2));
        blocks.push_back({iv, nu});
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(glue(blocks, k));
}
BENCHMARK(BM_GlueBlocks)->Arg(4)->Arg(16)->Arg(64);

// Full pipeline over the first `range` terms, fresh caches each iteration.
static void BM_PipelineDoubleOmega(benchmark::State& state)
{
    Term l = Term::ordinal_segment(Ordinal::omega());
    MapPtr phi = std::make_shared<CollapseMap>(term_double(l), l);
    MeasureSequence seq = delta_diff_sequence(l, point_template(l, "{n}"));
    for (auto _ : state) {
        ExtensionSequence out = extend_sequence_main(phi, Rational(1, 10), seq, ExtensionConfig{});
        for (std::uint64_t n = 1; n <= static_cast<std::uint64_t>(state.range(0)); ++n)
            benchmark::DoNotOptimize(out.measure(n));
    }
}
BENCHMARK(BM_PipelineDoubleOmega)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_PipelineBigode(benchmark::State& state)
{
    BigodeSpaces b = bigode_spaces();
    MeasureSequence seq = bigode_sequence(b.l);
    for (auto _ : state) {
        ExtensionSequence out = extend_sequence_main(b.phi, Rational(1, 10), seq, ExtensionConfig{});
        for (std::uint64_t n = 1; n <= static_cast<std::uint64_t>(state.range(0)); ++n)
            benchmark::DoNotOptimize(out.measure(n));
    }
}
BENCHMARK(BM_PipelineBigode)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

// Copyright 2026 The LDP Interact Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "benchmark/benchmark.h"
#include "ldp_interact/builtin_protocols.h"
#include "ldp_interact/hypotest.h"
#include "ldp_interact/lp.h"
#include "ldp_interact/mpj.h"
#include "ldp_interact/reduction.h"
#include "ldp_interact/verify.h"

namespace ldp_interact {
namespace {

void BM_RejSamp(benchmark::State& state) {
  const double eps = 1.0;
  auto hist = HistogramProtocol(3, eps, 1);
  const UserView view = {{0, 1}, {1, 0}, {2, 1}};
  const FiniteDist prior = FiniteDist::Uniform(3);
  const Randomizer& target = hist->protocol.registry().front();
  SeededRng rng(1);
  for (auto _ : state) {
    auto r = RejSamp(view, hist->protocol.registry(), prior, eps, target, rng);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RejSamp);

void BM_ReductionRun(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto inst = HistogramProtocol(3, 1.0, n);
  auto red = CompiledReduction::Create(inst->protocol, 1.0);
  SeededRng rng(2);
  std::int64_t samples = 0;
  for (auto _ : state) {
    auto run = red->Run(inst->prior, n, rng);
    samples += run->samples_used;
  }
  state.counters["samples/run"] =
      benchmark::Counter(static_cast<double>(samples), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_ReductionRun)->Arg(10)->Arg(20)->Arg(40);

void BM_FollowExpt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto inst = HistogramProtocol(3, 1.0, n);
  SeededRng rng(3);
  for (auto _ : state) {
    auto t = FollowExpt(inst->protocol, inst->prior, n, rng);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_FollowExpt)->Arg(20);

void BM_EnumerateCorpus(benchmark::State& state) {
  auto corpus = VerificationCorpus(1.0);
  const Semantics sem = state.range(0) == 0 ? Semantics::kFollow : Semantics::kBayes;
  for (auto _ : state) {
    for (const ProtocolInstance& inst : *corpus) {
      auto d = EnumerateTranscripts(inst.protocol, inst.prior, inst.n, sem);
      benchmark::DoNotOptimize(d);
    }
  }
}
BENCHMARK(BM_EnumerateCorpus)->Arg(0)->Arg(1);

void BM_AuditReduction(benchmark::State& state) {
  auto inst = CorpusProtocol("three_users", 1.0);
  auto red = CompiledReduction::Create(inst->protocol, 1.0);
  for (auto _ : state) {
    auto r = AuditReduction(*red, inst->prior, inst->n);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_AuditReduction);

void BM_MpjSolveFull(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const std::int64_t s = static_cast<std::int64_t>(std::pow(d, 4));
  const std::int64_t m = DefaultMpjGroupSize(d, 1.0);
  SeededRng rng(4);
  auto inst = RandomMpjInstance(d, s, rng);
  for (auto _ : state) {
    auto r = SolveMpjFull(*inst, 1.0, m, rng);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_MpjSolveFull)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RandomMpjInstance(benchmark::State& state) {
  SeededRng rng(5);
  for (auto _ : state) {
    auto inst = RandomMpjInstance(4, 256, rng);
    benchmark::DoNotOptimize(inst);
  }
}
BENCHMARK(BM_RandomMpjInstance)->Unit(benchmark::kMillisecond);

void BM_SolveEventGame(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  SeededRng rng(6);
  std::vector<FiniteDist> h0, h1;
  for (int v = 0; v < 3; ++v) {
    for (auto* hull : {&h0, &h1}) {
      std::vector<double> p(k);
      double s = 0.0;
      for (double& x : p) s += (x = rng.UniformOpenZero());
      for (double& x : p) x /= s;
      hull->push_back(*FiniteDist::FromProbs(p));
    }
  }
  std::vector<Symbol> ground(k);
  for (int i = 0; i < k; ++i) ground[i] = i;
  auto inst = CompoundInstance::Create(ground, h0, h1);
  for (auto _ : state) {
    auto s = SolveEventGame(*inst);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SolveEventGame)->Arg(4)->Arg(8)->Arg(16);

void BM_SimpleTest(benchmark::State& state) {
  auto inst = SimpleTestInstance::Create(FiniteDist::Bernoulli(0.4), FiniteDist::Bernoulli(0.6));
  SeededRng rng(7);
  for (auto _ : state) {
    auto r = SimpleTest(*inst, 1.0, state.range(0), 0, rng);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimpleTest)->Arg(100)->Arg(10000);

void BM_MaximizeLp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SeededRng rng(8);
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  std::vector<double> b(n), c(n);
  for (int i = 0; i < n; ++i) {
    for (double& v : a[i]) v = rng.Uniform();
    b[i] = 1.0 + rng.Uniform();
    c[i] = rng.Uniform();
  }
  for (auto _ : state) {
    auto s = MaximizeLp(a, b, c);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_MaximizeLp)->Arg(16)->Arg(64);

}  // namespace
}  // namespace ldp_interact

BENCHMARK_MAIN();

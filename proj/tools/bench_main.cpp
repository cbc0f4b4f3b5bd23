/* Copyright 2026 The ZeroProver Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Compares the serial reference paths against the OpenMP ones on the two
// parallel kernels: batched proof attempts and batched gradient
// accumulation. Outputs must match exactly; timings are informational.

#include <chrono>
#include <cstdio>
#include <thread>
#include <vector>

#include "zp/loop.hpp"

using namespace zp;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int bench_prove(const TheoremDatabase& db, const PremiseCache& cache,
                int threads) {
  ExplorationConfig ecfg;
  ecfg.strategy = Strategy::BoW2;

  std::vector<AttemptConfig> attempts;
  for (int gi : db.indices_of(Split::Train)) {
    AttemptConfig at;
    at.goal_index = gi;
    at.round = 0;
    at.epsilon = 0.5;
    at.rank_mode = RankMode::Combiner;
    at.explore = Strategy::BoW2;
    at.seed = mix_seed(7, "bench", static_cast<uint64_t>(gi));
    attempts.push_back(at);
  }

  const auto t_serial = std::chrono::steady_clock::now();
  const std::vector<ProofLog> serial =
      prove_goals(db, cache, ecfg, attempts, nullptr, 1);
  const double s_serial = seconds_since(t_serial);

  const auto t_par = std::chrono::steady_clock::now();
  const std::vector<ProofLog> parallel =
      prove_goals(db, cache, ecfg, attempts, nullptr, threads);
  const double s_par = seconds_since(t_par);

  int mismatches = 0;
  for (size_t i = 0; i < serial.size(); ++i) {
    if (proof_log_to_json(serial[i]) != proof_log_to_json(parallel[i])) {
      mismatches++;
    }
  }
  std::printf("proof attempts   n=%zu  serial %.3fs  omp(%d) %.3fs  "
              "speedup %.2fx  mismatches %d\n",
              serial.size(), s_serial, threads, s_par,
              s_par > 0 ? s_serial / s_par : 0.0, mismatches);
  return mismatches;
}

int bench_gradient(const TheoremDatabase& db, const TokenStats& stats,
                   const ModelParams& params, int threads) {
  ExampleStore store;
  for (int gi : db.indices_of(Split::Train)) {
    TrainingExample ex;
    ex.goal = db.entry(gi).stmt;
    ex.goal_index = gi;
    ex.tactic = gi % kNumTactics;
    for (int p = 0; p < gi && p < 6; ++p) {
      (p % 2 == 0 ? ex.positives : ex.negatives).push_back(p);
    }
    store.historical.push_back(ex);
  }
  Rng rng(3);
  const auto [batch, n_fresh] = sample_batch(store, db, stats, 16, 48, rng);
  (void)n_fresh;

  const int reps = 50;
  std::vector<double> g_serial, g_par;
  double loss_serial = 0.0, loss_par = 0.0;

  const auto t_serial = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) {
    loss_serial = compute_loss_and_grad(params, batch, g_serial, 1);
  }
  const double s_serial = seconds_since(t_serial);

  const auto t_par = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) {
    loss_par = compute_loss_and_grad(params, batch, g_par, threads);
  }
  const double s_par = seconds_since(t_par);

  int mismatches = (loss_serial == loss_par) ? 0 : 1;
  if (g_serial != g_par) mismatches++;
  std::printf("gradient batches n=%zu x%d  serial %.3fs  omp(%d) %.3fs  "
              "speedup %.2fx  mismatches %d\n",
              batch.size(), reps, s_serial, threads, s_par,
              s_par > 0 ? s_serial / s_par : 0.0, mismatches);
  return mismatches;
}

}  // namespace

int main() {
  const unsigned hw = std::thread::hardware_concurrency();
  const int threads = hw == 0 ? 2 : static_cast<int>(hw);

  CorpusConfig c;
  c.n_theorems = 200;
  c.rng_seed = 1;
  TheoremDatabase db = generate_corpus(c, nullptr);
  const TokenStats stats = compute_token_stats(db);

  ModelDims dims;
  dims.vocab = static_cast<int>(stats.vocab.size());
  Rng rng(11);
  const ModelParams params = init_params(dims, rng);
  const PremiseCache cache = PremiseCache::build(db, stats, params);

  int bad = 0;
  bad += bench_prove(db, cache, threads);
  bad += bench_gradient(db, stats, params, threads);
  if (bad > 0) {
    std::printf("FAIL: %d mismatching outputs\n", bad);
    return 1;
  }
  std::printf("serial and parallel outputs identical\n");
  return 0;
}

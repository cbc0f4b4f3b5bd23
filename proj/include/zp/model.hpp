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

#ifndef ZP_MODEL_HPP
#define ZP_MODEL_HPP

#include <string>
#include <tuple>
#include <vector>

#include "zp/corpus.hpp"
#include "zp/rng.hpp"
#include "zp/term.hpp"

namespace zp {

struct ModelDims {
  int vocab = 0;  // vocabulary size; one extra UNK row is appended
  int D = 32;     // token embedding width
  int E = 32;     // tower output width
  int H = 64;     // combiner hidden width
  int n_tactics = 4;

  bool operator==(const ModelDims&) const = default;
};

// Offsets of the flat parameter vector. Layout order doubles as the draw
// order during initialization and the serialization order.
struct ParamLayout {
  size_t emb_goal, emb_prem;
  size_t gt_w, gt_b, pt_w, pt_b;
  size_t c1_w, c1_b, c2_w, c2_b;
  size_t hd_w, hd_b;
  size_t total;
};
ParamLayout make_layout(const ModelDims& d);

// Two-tower ranking model: mean-pooled token embeddings, one affine+tanh
// tower per side, an affine+tanh+affine combiner over the concatenated tower
// outputs, and an affine tactic head on the goal representation.
struct ModelParams {
  ModelDims dims;
  ParamLayout lay;
  std::vector<double> w;

  static ModelParams zeros(const ModelDims& d);
  // (name, offset, length) per parameter block, in layout order.
  std::vector<std::tuple<std::string, size_t, size_t>> blocks() const;
};

ModelParams init_params(const ModelDims& d, Rng& rng);
// Same, but the premise tower (embeddings and affine) is a copy of the goal
// tower so that initially embed_goal == embed_premise pointwise.
ModelParams init_shared_towers(const ModelDims& d, Rng& rng);

// Token ids for an equation under a fixed vocabulary; unknown tokens map to
// the reserved UNK row (= dims.vocab).
std::vector<int> token_ids(const Equation& eq, const SymbolTable& syms,
                           const TokenStats& stats);

std::vector<double> embed_goal(const ModelParams& p, const std::vector<int>& ids);
std::vector<double> embed_premise(const ModelParams& p,
                                  const std::vector<int>& ids);

// Combiner split so that per-premise parts can be cached across goals:
// logit = c2(tanh(goal_part + premise_part)) with the bias folded into the
// goal part.
std::vector<double> combiner_goal_part(const ModelParams& p,
                                       const std::vector<double>& zg);
std::vector<double> combiner_premise_part(const ModelParams& p,
                                          const std::vector<double>& zp);
double combiner_logit(const ModelParams& p, const std::vector<double>& gpart,
                      const std::vector<double>& ppart);

double score_premise(const ModelParams& p, const std::vector<int>& goal_ids,
                     const std::vector<int>& prem_ids);
std::vector<double> score_tactics(const ModelParams& p,
                                  const std::vector<int>& goal_ids);

// A training example with all statements already tokenized. tactic == -1
// means the example carries no tactic label (premise loss only).
struct ResolvedExample {
  std::vector<int> goal_ids;
  int tactic = -1;
  std::vector<std::vector<int>> pos;
  std::vector<std::vector<int>> neg;
};

// Mean tactic cross-entropy over labeled examples plus mean binary
// cross-entropy over all (goal, premise) pairs. grad is resized and filled.
// Per-example gradients are accumulated into private buffers and reduced in
// example order, so the result is identical for any n_threads.
double compute_loss_and_grad(const ModelParams& p,
                             const std::vector<ResolvedExample>& batch,
                             std::vector<double>& grad, int n_threads = 1);

struct OptimizerState {
  long long step = 0;
  std::vector<double> m, v;
  double base_lr = 1e-4;
  double decay = 0.98;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// base_lr * 0.98^floor(step / 100000)
double effective_lr(long long step);

// One bias-corrected adaptive-moment update at effective_lr(state.step);
// increments state.step.
void adam_step(std::vector<double>& w, const std::vector<double>& grad,
               OptimizerState& state);

// Full training step; throws NonFiniteLoss when the loss is not finite.
double train_step(ModelParams& p, OptimizerState& opt,
                  const std::vector<ResolvedExample>& batch, int n_threads = 1);

constexpr double kEmaRate = 0.9999;

struct RankingCheckpoint {
  ModelParams raw;
  ModelParams averaged;
  int round_produced = 0;
};

// raw <- new_raw; averaged <- kEmaRate * averaged + (1 - kEmaRate) * new_raw.
void ema_update(RankingCheckpoint& ckpt, const ModelParams& new_raw);

uint64_t vocab_fingerprint(const std::vector<std::string>& vocab);

void save_checkpoint(const std::string& path, const RankingCheckpoint& ckpt,
                     uint64_t vocab_hash);
RankingCheckpoint load_checkpoint(const std::string& path,
                                  uint64_t expected_vocab_hash);
void save_optimizer(const std::string& path, const OptimizerState& opt);
OptimizerState load_optimizer(const std::string& path);

}  // namespace zp

#endif  // ZP_MODEL_HPP

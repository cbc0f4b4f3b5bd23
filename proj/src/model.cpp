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

#include "zp/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "zp/common.hpp"

#ifdef ZP_HAVE_OPENMP
#include <omp.h>
#endif

namespace zp {

namespace {

constexpr uint64_t kCkptMagic = 0x5a50434b50543031ull;  // "ZPCKPT01"
constexpr uint64_t kOptMagic = 0x5a504f5054494d31ull;   // "ZPOPTIM1"

void check_dims(const ModelDims& d) {
  if (d.vocab < 0 || d.D <= 0 || d.E <= 0 || d.H <= 0 || d.n_tactics <= 0) {
    throw ConfigError("invalid model dimensions");
  }
}

}  // namespace

ParamLayout make_layout(const ModelDims& d) {
  check_dims(d);
  const size_t rows = static_cast<size_t>(d.vocab) + 1;
  ParamLayout l{};
  l.emb_goal = 0;
  l.emb_prem = l.emb_goal + rows * d.D;
  l.gt_w = l.emb_prem + rows * d.D;
  l.gt_b = l.gt_w + static_cast<size_t>(d.E) * d.D;
  l.pt_w = l.gt_b + d.E;
  l.pt_b = l.pt_w + static_cast<size_t>(d.E) * d.D;
  l.c1_w = l.pt_b + d.E;
  l.c1_b = l.c1_w + static_cast<size_t>(d.H) * (2 * d.E);
  l.c2_w = l.c1_b + d.H;
  l.c2_b = l.c2_w + d.H;
  l.hd_w = l.c2_b + 1;
  l.hd_b = l.hd_w + static_cast<size_t>(d.n_tactics) * d.E;
  l.total = l.hd_b + d.n_tactics;
  return l;
}

ModelParams ModelParams::zeros(const ModelDims& d) {
  ModelParams p;
  p.dims = d;
  p.lay = make_layout(d);
  p.w.assign(p.lay.total, 0.0);
  return p;
}

std::vector<std::tuple<std::string, size_t, size_t>> ModelParams::blocks()
    const {
  const size_t rows = static_cast<size_t>(dims.vocab) + 1;
  return {
      {"emb_goal", lay.emb_goal, rows * dims.D},
      {"emb_prem", lay.emb_prem, rows * dims.D},
      {"goal_tower_w", lay.gt_w, static_cast<size_t>(dims.E) * dims.D},
      {"goal_tower_b", lay.gt_b, static_cast<size_t>(dims.E)},
      {"prem_tower_w", lay.pt_w, static_cast<size_t>(dims.E) * dims.D},
      {"prem_tower_b", lay.pt_b, static_cast<size_t>(dims.E)},
      {"comb1_w", lay.c1_w, static_cast<size_t>(dims.H) * (2 * dims.E)},
      {"comb1_b", lay.c1_b, static_cast<size_t>(dims.H)},
      {"comb2_w", lay.c2_w, static_cast<size_t>(dims.H)},
      {"comb2_b", lay.c2_b, 1},
      {"head_w", lay.hd_w, static_cast<size_t>(dims.n_tactics) * dims.E},
      {"head_b", lay.hd_b, static_cast<size_t>(dims.n_tactics)},
  };
}

namespace {

void fill_uniform(std::vector<double>& w, size_t off, size_t len, double lo,
                  double hi, Rng& rng) {
  for (size_t i = 0; i < len; ++i) {
    w[off + i] = lo + (hi - lo) * rng.next_double();
  }
}

// Affine weights get a fan-based uniform range, biases start at zero.
void init_affine(std::vector<double>& w, size_t w_off, int n_out, int n_in,
                 size_t b_off, Rng& rng) {
  const double limit = std::sqrt(6.0 / (n_in + n_out));
  fill_uniform(w, w_off, static_cast<size_t>(n_out) * n_in, -limit, limit, rng);
  for (int i = 0; i < n_out; ++i) w[b_off + i] = 0.0;
}

}  // namespace

ModelParams init_params(const ModelDims& d, Rng& rng) {
  ModelParams p = ModelParams::zeros(d);
  const size_t rows = static_cast<size_t>(d.vocab) + 1;
  fill_uniform(p.w, p.lay.emb_goal, rows * d.D, -0.05, 0.05, rng);
  fill_uniform(p.w, p.lay.emb_prem, rows * d.D, -0.05, 0.05, rng);
  init_affine(p.w, p.lay.gt_w, d.E, d.D, p.lay.gt_b, rng);
  init_affine(p.w, p.lay.pt_w, d.E, d.D, p.lay.pt_b, rng);
  init_affine(p.w, p.lay.c1_w, d.H, 2 * d.E, p.lay.c1_b, rng);
  init_affine(p.w, p.lay.c2_w, 1, d.H, p.lay.c2_b, rng);
  init_affine(p.w, p.lay.hd_w, d.n_tactics, d.E, p.lay.hd_b, rng);
  return p;
}

ModelParams init_shared_towers(const ModelDims& d, Rng& rng) {
  ModelParams p = init_params(d, rng);
  const size_t rows = static_cast<size_t>(d.vocab) + 1;
  std::copy_n(p.w.begin() + p.lay.emb_goal, rows * d.D,
              p.w.begin() + p.lay.emb_prem);
  std::copy_n(p.w.begin() + p.lay.gt_w, static_cast<size_t>(d.E) * d.D,
              p.w.begin() + p.lay.pt_w);
  std::copy_n(p.w.begin() + p.lay.gt_b, d.E, p.w.begin() + p.lay.pt_b);
  return p;
}

std::vector<int> token_ids(const Equation& eq, const SymbolTable& syms,
                           const TokenStats& stats) {
  std::vector<int> ids;
  for (const std::string& tok : tokenize(eq, syms)) {
    int id = stats.token_id(tok);
    ids.push_back(id < 0 ? static_cast<int>(stats.vocab.size()) : id);
  }
  return ids;
}

namespace {

void mean_pool(const ModelParams& p, size_t emb_off,
               const std::vector<int>& ids, double* out) {
  const int D = p.dims.D;
  for (int j = 0; j < D; ++j) out[j] = 0.0;
  if (ids.empty()) return;
  for (int id : ids) {
    if (id < 0 || id > p.dims.vocab) throw ShapeMismatch("token id out of range");
    const double* row = p.w.data() + emb_off + static_cast<size_t>(id) * D;
    for (int j = 0; j < D; ++j) out[j] += row[j];
  }
  const double inv = 1.0 / static_cast<double>(ids.size());
  for (int j = 0; j < D; ++j) out[j] *= inv;
}

void affine_tanh(const double* W, const double* b, int n_out, int n_in,
                 const double* x, double* out) {
  for (int i = 0; i < n_out; ++i) {
    double acc = b[i];
    const double* row = W + static_cast<size_t>(i) * n_in;
    for (int j = 0; j < n_in; ++j) acc += row[j] * x[j];
    out[i] = std::tanh(acc);
  }
}

std::vector<double> tower(const ModelParams& p, size_t emb_off, size_t w_off,
                          size_t b_off, const std::vector<int>& ids) {
  std::vector<double> pooled(p.dims.D);
  mean_pool(p, emb_off, ids, pooled.data());
  std::vector<double> z(p.dims.E);
  affine_tanh(p.w.data() + w_off, p.w.data() + b_off, p.dims.E, p.dims.D,
              pooled.data(), z.data());
  return z;
}

}  // namespace

std::vector<double> embed_goal(const ModelParams& p,
                               const std::vector<int>& ids) {
  return tower(p, p.lay.emb_goal, p.lay.gt_w, p.lay.gt_b, ids);
}

std::vector<double> embed_premise(const ModelParams& p,
                                  const std::vector<int>& ids) {
  return tower(p, p.lay.emb_prem, p.lay.pt_w, p.lay.pt_b, ids);
}

std::vector<double> combiner_goal_part(const ModelParams& p,
                                       const std::vector<double>& zg) {
  if (static_cast<int>(zg.size()) != p.dims.E) {
    throw ShapeMismatch("combiner_goal_part: bad input size");
  }
  const int E = p.dims.E, H = p.dims.H;
  std::vector<double> out(H);
  for (int h = 0; h < H; ++h) {
    const double* row = p.w.data() + p.lay.c1_w + static_cast<size_t>(h) * 2 * E;
    double acc = p.w[p.lay.c1_b + h];
    for (int j = 0; j < E; ++j) acc += row[j] * zg[j];
    out[h] = acc;
  }
  return out;
}

std::vector<double> combiner_premise_part(const ModelParams& p,
                                          const std::vector<double>& zp) {
  if (static_cast<int>(zp.size()) != p.dims.E) {
    throw ShapeMismatch("combiner_premise_part: bad input size");
  }
  const int E = p.dims.E, H = p.dims.H;
  std::vector<double> out(H);
  for (int h = 0; h < H; ++h) {
    const double* row =
        p.w.data() + p.lay.c1_w + static_cast<size_t>(h) * 2 * E + E;
    double acc = 0.0;
    for (int j = 0; j < E; ++j) acc += row[j] * zp[j];
    out[h] = acc;
  }
  return out;
}

double combiner_logit(const ModelParams& p, const std::vector<double>& gpart,
                      const std::vector<double>& ppart) {
  const int H = p.dims.H;
  if (static_cast<int>(gpart.size()) != H ||
      static_cast<int>(ppart.size()) != H) {
    throw ShapeMismatch("combiner_logit: bad input size");
  }
  double acc = p.w[p.lay.c2_b];
  for (int h = 0; h < H; ++h) {
    acc += p.w[p.lay.c2_w + h] * std::tanh(gpart[h] + ppart[h]);
  }
  return acc;
}

double score_premise(const ModelParams& p, const std::vector<int>& goal_ids,
                     const std::vector<int>& prem_ids) {
  return combiner_logit(p, combiner_goal_part(p, embed_goal(p, goal_ids)),
                        combiner_premise_part(p, embed_premise(p, prem_ids)));
}

std::vector<double> score_tactics(const ModelParams& p,
                                  const std::vector<int>& goal_ids) {
  std::vector<double> zg = embed_goal(p, goal_ids);
  const int T = p.dims.n_tactics, E = p.dims.E;
  std::vector<double> logits(T);
  for (int t = 0; t < T; ++t) {
    double acc = p.w[p.lay.hd_b + t];
    const double* row = p.w.data() + p.lay.hd_w + static_cast<size_t>(t) * E;
    for (int j = 0; j < E; ++j) acc += row[j] * zg[j];
    logits[t] = acc;
  }
  return logits;
}

namespace {

// Forward plus backward for a single example, accumulating into grad.
// ce_scale / bce_scale carry the 1/n normalizers.
double example_loss_and_grad(const ModelParams& p, const ResolvedExample& ex,
                             double ce_scale, double bce_scale,
                             std::vector<double>& grad) {
  const int D = p.dims.D, E = p.dims.E, H = p.dims.H, T = p.dims.n_tactics;
  const ParamLayout& L = p.lay;
  double loss = 0.0;

  std::vector<double> mg(D);
  mean_pool(p, L.emb_goal, ex.goal_ids, mg.data());
  std::vector<double> zg(E);
  affine_tanh(p.w.data() + L.gt_w, p.w.data() + L.gt_b, E, D, mg.data(),
              zg.data());

  std::vector<double> d_zg(E, 0.0);

  if (ex.tactic >= 0) {
    if (ex.tactic >= T) throw ShapeMismatch("tactic label out of range");
    std::vector<double> logits(T);
    for (int t = 0; t < T; ++t) {
      double acc = p.w[L.hd_b + t];
      const double* row = p.w.data() + L.hd_w + static_cast<size_t>(t) * E;
      for (int j = 0; j < E; ++j) acc += row[j] * zg[j];
      logits[t] = acc;
    }
    double mx = logits[0];
    for (int t = 1; t < T; ++t) mx = std::max(mx, logits[t]);
    double zsum = 0.0;
    for (int t = 0; t < T; ++t) zsum += std::exp(logits[t] - mx);
    loss += ce_scale * (std::log(zsum) - (logits[ex.tactic] - mx));
    for (int t = 0; t < T; ++t) {
      const double soft = std::exp(logits[t] - mx) / zsum;
      const double dl = ce_scale * (soft - (t == ex.tactic ? 1.0 : 0.0));
      grad[L.hd_b + t] += dl;
      double* wrow = grad.data() + L.hd_w + static_cast<size_t>(t) * E;
      const double* row = p.w.data() + L.hd_w + static_cast<size_t>(t) * E;
      for (int j = 0; j < E; ++j) {
        wrow[j] += dl * zg[j];
        d_zg[j] += dl * row[j];
      }
    }
  }

  std::vector<double> gpart(H);
  const bool has_pairs = !ex.pos.empty() || !ex.neg.empty();
  if (has_pairs) {
    for (int h = 0; h < H; ++h) {
      const double* row = p.w.data() + L.c1_w + static_cast<size_t>(h) * 2 * E;
      double acc = p.w[L.c1_b + h];
      for (int j = 0; j < E; ++j) acc += row[j] * zg[j];
      gpart[h] = acc;
    }
  }

  std::vector<double> mp(D), zp(E), c(H), d_cpre(H), d_zp(E), d_zp_pre(E),
      d_mp(D);
  auto run_pair = [&](const std::vector<int>& prem_ids, double label) {
    mean_pool(p, L.emb_prem, prem_ids, mp.data());
    affine_tanh(p.w.data() + L.pt_w, p.w.data() + L.pt_b, E, D, mp.data(),
                zp.data());
    double s = p.w[L.c2_b];
    for (int h = 0; h < H; ++h) {
      const double* row =
          p.w.data() + L.c1_w + static_cast<size_t>(h) * 2 * E + E;
      double acc = gpart[h];
      for (int j = 0; j < E; ++j) acc += row[j] * zp[j];
      c[h] = std::tanh(acc);
      s += p.w[L.c2_w + h] * c[h];
    }
    // softplus(s) - label * s, computed stably.
    const double softplus =
        s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
    loss += bce_scale * (softplus - label * s);
    const double sig = 1.0 / (1.0 + std::exp(-s));
    const double ds = bce_scale * (sig - label);

    grad[L.c2_b] += ds;
    for (int h = 0; h < H; ++h) {
      grad[L.c2_w + h] += ds * c[h];
      d_cpre[h] = ds * p.w[L.c2_w + h] * (1.0 - c[h] * c[h]);
    }
    std::fill(d_zp.begin(), d_zp.end(), 0.0);
    for (int h = 0; h < H; ++h) {
      const double dh = d_cpre[h];
      grad[L.c1_b + h] += dh;
      double* gw = grad.data() + L.c1_w + static_cast<size_t>(h) * 2 * E;
      const double* row = p.w.data() + L.c1_w + static_cast<size_t>(h) * 2 * E;
      for (int j = 0; j < E; ++j) {
        gw[j] += dh * zg[j];
        gw[E + j] += dh * zp[j];
        d_zg[j] += dh * row[j];
        d_zp[j] += dh * row[E + j];
      }
    }
    for (int i = 0; i < E; ++i) d_zp_pre[i] = d_zp[i] * (1.0 - zp[i] * zp[i]);
    std::fill(d_mp.begin(), d_mp.end(), 0.0);
    for (int i = 0; i < E; ++i) {
      const double di = d_zp_pre[i];
      grad[L.pt_b + i] += di;
      double* gw = grad.data() + L.pt_w + static_cast<size_t>(i) * D;
      const double* row = p.w.data() + L.pt_w + static_cast<size_t>(i) * D;
      for (int j = 0; j < D; ++j) {
        gw[j] += di * mp[j];
        d_mp[j] += di * row[j];
      }
    }
    if (!prem_ids.empty()) {
      const double inv = 1.0 / static_cast<double>(prem_ids.size());
      for (int id : prem_ids) {
        double* gro = grad.data() + L.emb_prem + static_cast<size_t>(id) * D;
        for (int j = 0; j < D; ++j) gro[j] += d_mp[j] * inv;
      }
    }
  };
  for (const auto& ids : ex.pos) run_pair(ids, 1.0);
  for (const auto& ids : ex.neg) run_pair(ids, 0.0);

  std::vector<double> d_zg_pre(E), d_mg(D, 0.0);
  for (int i = 0; i < E; ++i) d_zg_pre[i] = d_zg[i] * (1.0 - zg[i] * zg[i]);
  for (int i = 0; i < E; ++i) {
    const double di = d_zg_pre[i];
    grad[L.gt_b + i] += di;
    double* gw = grad.data() + L.gt_w + static_cast<size_t>(i) * D;
    const double* row = p.w.data() + L.gt_w + static_cast<size_t>(i) * D;
    for (int j = 0; j < D; ++j) {
      gw[j] += di * mg[j];
      d_mg[j] += di * row[j];
    }
  }
  if (!ex.goal_ids.empty()) {
    const double inv = 1.0 / static_cast<double>(ex.goal_ids.size());
    for (int id : ex.goal_ids) {
      double* gro = grad.data() + L.emb_goal + static_cast<size_t>(id) * D;
      for (int j = 0; j < D; ++j) gro[j] += d_mg[j] * inv;
    }
  }
  return loss;
}

}  // namespace

double compute_loss_and_grad(const ModelParams& p,
                             const std::vector<ResolvedExample>& batch,
                             std::vector<double>& grad, int n_threads) {
  grad.assign(p.lay.total, 0.0);
  size_t n_ce = 0, n_pairs = 0;
  for (const ResolvedExample& ex : batch) {
    if (ex.tactic >= 0) ++n_ce;
    n_pairs += ex.pos.size() + ex.neg.size();
  }
  const double ce_scale = n_ce > 0 ? 1.0 / static_cast<double>(n_ce) : 0.0;
  const double bce_scale =
      n_pairs > 0 ? 1.0 / static_cast<double>(n_pairs) : 0.0;

  const int n = static_cast<int>(batch.size());
  std::vector<std::vector<double>> per_grad(n);
  std::vector<double> per_loss(n, 0.0);
#ifdef ZP_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, n_threads))
#endif
  for (int i = 0; i < n; ++i) {
    per_grad[i].assign(p.lay.total, 0.0);
    per_loss[i] =
        example_loss_and_grad(p, batch[i], ce_scale, bce_scale, per_grad[i]);
  }
#ifndef ZP_HAVE_OPENMP
  (void)n_threads;
#endif
  // Fixed-order reduction keeps the result independent of thread count.
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    loss += per_loss[i];
    const std::vector<double>& g = per_grad[i];
    for (size_t k = 0; k < grad.size(); ++k) grad[k] += g[k];
  }
  return loss;
}

double effective_lr(long long step) {
  return 1e-4 * std::pow(0.98, static_cast<double>(step / 100000));
}

void adam_step(std::vector<double>& w, const std::vector<double>& grad,
               OptimizerState& state) {
  if (grad.size() != w.size()) throw ShapeMismatch("adam_step: size mismatch");
  if (state.m.empty()) {
    state.m.assign(w.size(), 0.0);
    state.v.assign(w.size(), 0.0);
  }
  if (state.m.size() != w.size() || state.v.size() != w.size()) {
    throw ShapeMismatch("adam_step: optimizer state size mismatch");
  }
  const double lr =
      state.base_lr *
      std::pow(state.decay, static_cast<double>(state.step / 100000));
  const long long t = state.step + 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(t));
  for (size_t i = 0; i < w.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] =
        state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    w[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
  state.step = t;
}

double train_step(ModelParams& p, OptimizerState& opt,
                  const std::vector<ResolvedExample>& batch, int n_threads) {
  std::vector<double> grad;
  const double loss = compute_loss_and_grad(p, batch, grad, n_threads);
  if (!std::isfinite(loss)) throw NonFiniteLoss("training loss is not finite");
  adam_step(p.w, grad, opt);
  return loss;
}

void ema_update(RankingCheckpoint& ckpt, const ModelParams& new_raw) {
  if (!(ckpt.averaged.dims == new_raw.dims) ||
      ckpt.averaged.w.size() != new_raw.w.size()) {
    throw ShapeMismatch("ema_update: parameter shape mismatch");
  }
  for (size_t i = 0; i < new_raw.w.size(); ++i) {
    ckpt.averaged.w[i] =
        kEmaRate * ckpt.averaged.w[i] + (1.0 - kEmaRate) * new_raw.w[i];
  }
  ckpt.raw = new_raw;
}

uint64_t vocab_fingerprint(const std::vector<std::string>& vocab) {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ull;
  };
  for (const std::string& tok : vocab) {
    for (char c : tok) mix(static_cast<unsigned char>(c));
    mix('\n');
  }
  return h;
}

namespace {

void put_u64(std::ostream& out, uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw IoError("unexpected end of file");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_i64(std::ostream& out, long long v) {
  put_u64(out, static_cast<uint64_t>(v));
}

long long get_i64(std::istream& in) {
  return static_cast<long long>(get_u64(in));
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<uint64_t>(v));
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_doubles(std::ostream& out, const std::vector<double>& v) {
  put_u64(out, v.size());
  for (double x : v) put_f64(out, x);
}

std::vector<double> get_doubles(std::istream& in) {
  const uint64_t n = get_u64(in);
  if (n > (1ull << 32)) throw IoError("implausible array length");
  std::vector<double> v(n);
  for (uint64_t i = 0; i < n; ++i) v[i] = get_f64(in);
  return v;
}

void put_dims(std::ostream& out, const ModelDims& d) {
  put_i64(out, d.vocab);
  put_i64(out, d.D);
  put_i64(out, d.E);
  put_i64(out, d.H);
  put_i64(out, d.n_tactics);
}

ModelDims get_dims(std::istream& in) {
  ModelDims d;
  d.vocab = static_cast<int>(get_i64(in));
  d.D = static_cast<int>(get_i64(in));
  d.E = static_cast<int>(get_i64(in));
  d.H = static_cast<int>(get_i64(in));
  d.n_tactics = static_cast<int>(get_i64(in));
  return d;
}

}  // namespace

void save_checkpoint(const std::string& path, const RankingCheckpoint& ckpt,
                     uint64_t vocab_hash) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  put_u64(out, kCkptMagic);
  put_dims(out, ckpt.raw.dims);
  put_i64(out, ckpt.round_produced);
  put_u64(out, vocab_hash);
  put_doubles(out, ckpt.raw.w);
  put_doubles(out, ckpt.averaged.w);
  if (!out) throw IoError("write failed: " + path);
}

RankingCheckpoint load_checkpoint(const std::string& path,
                                  uint64_t expected_vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  if (get_u64(in) != kCkptMagic) throw IoError("bad checkpoint magic: " + path);
  const ModelDims d = get_dims(in);
  const int round = static_cast<int>(get_i64(in));
  const uint64_t hash = get_u64(in);
  if (hash != expected_vocab_hash) {
    throw IoError("checkpoint vocabulary mismatch: " + path);
  }
  RankingCheckpoint ckpt;
  ckpt.raw = ModelParams::zeros(d);
  ckpt.averaged = ModelParams::zeros(d);
  ckpt.round_produced = round;
  ckpt.raw.w = get_doubles(in);
  ckpt.averaged.w = get_doubles(in);
  if (ckpt.raw.w.size() != ckpt.raw.lay.total ||
      ckpt.averaged.w.size() != ckpt.averaged.lay.total) {
    throw IoError("checkpoint parameter count mismatch: " + path);
  }
  return ckpt;
}

void save_optimizer(const std::string& path, const OptimizerState& opt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  put_u64(out, kOptMagic);
  put_i64(out, opt.step);
  put_f64(out, opt.base_lr);
  put_f64(out, opt.decay);
  put_f64(out, opt.beta1);
  put_f64(out, opt.beta2);
  put_f64(out, opt.eps);
  put_doubles(out, opt.m);
  put_doubles(out, opt.v);
  if (!out) throw IoError("write failed: " + path);
}

OptimizerState load_optimizer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  if (get_u64(in) != kOptMagic) throw IoError("bad optimizer magic: " + path);
  OptimizerState opt;
  opt.step = get_i64(in);
  opt.base_lr = get_f64(in);
  opt.decay = get_f64(in);
  opt.beta1 = get_f64(in);
  opt.beta2 = get_f64(in);
  opt.eps = get_f64(in);
  opt.m = get_doubles(in);
  opt.v = get_doubles(in);
  if (opt.m.size() != opt.v.size()) {
    throw IoError("optimizer moment size mismatch: " + path);
  }
  return opt;
}

}  // namespace zp

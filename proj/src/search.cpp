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

#include "zp/search.hpp"

#include <algorithm>
#include <chrono>
#include <deque>

#include "json.hpp"
#include "zp/common.hpp"

namespace zp {

using ojson = nlohmann::ordered_json;

const char* node_status_name(NodeStatus s) {
  switch (s) {
    case NodeStatus::Open: return "open";
    case NodeStatus::Proved: return "proved";
    case NodeStatus::Abandoned: return "abandoned";
  }
  return "?";
}

SearchLimits SearchLimits::sample(Rng& rng, int step_budget, int node_budget,
                                  double guard_s) {
  SearchLimits lim;
  lim.max_top_tactics = rng.next_int(6, 16);
  lim.max_successful_apps = rng.next_int(3, 6);
  lim.total_params = rng.next_int(1, 32);
  lim.tactic_step_budget = step_budget;
  lim.proof_node_budget = node_budget;
  lim.wall_clock_guard_s = guard_s;
  return lim;
}

PremiseCache PremiseCache::build(const TheoremDatabase& db,
                                 const TokenStats& stats,
                                 const ModelParams& averaged) {
  PremiseCache c;
  c.params = averaged;
  c.stats = stats;
  const int n = db.size();
  c.ids.resize(n);
  c.repr.resize(n);
  c.part.resize(n);
  c.counts.resize(n);
  c.usable.resize(n);
  for (int i = 0; i < n; ++i) {
    const DbEntry& e = db.entry(i);
    c.ids[i] = token_ids(e.stmt, db.symbols(), stats);
    c.repr[i] = embed_premise(averaged, c.ids[i]);
    c.part[i] = combiner_premise_part(averaged, c.repr[i]);
    c.counts[i] = bow_vector(e.stmt, db.symbols(), stats);
    c.usable[i] = e.rewritable ? 1 : 0;
  }
  return c;
}

namespace {

std::vector<Equation> param_equations(const std::vector<ScoredPremise>& params,
                                      const TheoremDatabase& db) {
  std::vector<Equation> eqs;
  eqs.reserve(params.size());
  for (const ScoredPremise& sp : params) eqs.push_back(db.entry(sp.index).stmt);
  return eqs;
}

std::vector<Equation> index_equations(const std::vector<int>& idx,
                                      const TheoremDatabase& db) {
  std::vector<Equation> eqs;
  eqs.reserve(idx.size());
  for (int i : idx) eqs.push_back(db.entry(i).stmt);
  return eqs;
}

// Subgoals of an outcome with duplicates removed, first occurrence kept.
std::vector<Equation> distinct_subgoals(const TacticOutcome& out) {
  std::vector<Equation> uniq;
  for (const Equation& sg : out.subgoals) {
    bool dup = false;
    for (const Equation& seen : uniq) dup = dup || equation_eq(seen, sg);
    if (!dup) uniq.push_back(sg);
  }
  return uniq;
}

struct Searcher {
  const AttemptConfig& at;
  const TheoremDatabase& db;
  const PremiseCache& cache;
  const ExplorationConfig& cfg;
  const SearchLimits& limits;
  Rng& rng;
  ProofLog log;
  std::vector<std::vector<int>> kids_of;
  std::vector<int> pool;  // usable premises below the root goal index
  bool explore_enabled;

  Searcher(const AttemptConfig& at_, const TheoremDatabase& db_,
           const PremiseCache& cache_, const ExplorationConfig& cfg_,
           const SearchLimits& limits_, Rng& rng_)
      : at(at_), db(db_), cache(cache_), cfg(cfg_), limits(limits_), rng(rng_) {
    log.goal_index = at.goal_index;
    log.round = at.round;
    log.seed = at.seed;
    log.limits = limits;
    explore_enabled = at.explore == Strategy::PET ||
                      at.explore == Strategy::BoW1 ||
                      at.explore == Strategy::BoW2;
    for (int i = 0; i < at.goal_index; ++i) {
      if (cache.usable[i]) pool.push_back(i);
    }
  }

  int make_node(const Equation& goal, int parent, int depth) {
    if (static_cast<int>(log.nodes.size()) >= limits.proof_node_budget) {
      return -1;
    }
    NodeRecord n;
    const int id = static_cast<int>(log.nodes.size());
    n.id = id;
    n.parent = parent;
    n.depth = depth;
    n.goal = goal;
    log.nodes.push_back(std::move(n));
    kids_of.emplace_back();
    if (parent >= 0) kids_of[parent].push_back(id);
    return id;
  }

  // Policy ranking of the whole pool, descending with index tie-break.
  std::vector<ScoredPremise> rank_policy(const std::vector<int>& goal_ids) {
    std::vector<ScoredPremise> ranked(pool.size());
    if (at.rank_mode == RankMode::Combiner) {
      std::vector<double> zg = embed_goal(cache.params, goal_ids);
      std::vector<double> gpart = combiner_goal_part(cache.params, zg);
      for (size_t i = 0; i < pool.size(); ++i) {
        ranked[i] = {pool[i],
                     combiner_logit(cache.params, gpart, cache.part[pool[i]]),
                     PremiseSource::Policy};
      }
    } else {
      std::vector<double> zg = embed_goal(cache.params, goal_ids);
      for (size_t i = 0; i < pool.size(); ++i) {
        ranked[i] = {pool[i], cosine(zg, cache.repr[pool[i]]),
                     PremiseSource::Policy};
      }
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ScoredPremise& a, const ScoredPremise& b) {
                       if (a.score != b.score) return a.score > b.score;
                       return a.index < b.index;
                     });
    return ranked;
  }

  std::vector<ScoredPremise> rank_explore(const Equation& goal,
                                          const std::vector<int>& goal_ids) {
    if (!explore_enabled || pool.empty() || log.k2 <= 0) return {};
    if (at.explore == Strategy::PET) {
      std::vector<double> goal_repr = embed_premise(cache.params, goal_ids);
      std::vector<std::vector<double>> reprs;
      reprs.reserve(pool.size());
      for (int i : pool) reprs.push_back(cache.repr[i]);
      return pet_select_from_reprs(goal_repr, reprs, pool, log.k2,
                                   cfg.pet_prefilter, cfg.pet_noise_sigma,
                                   rng);
    }
    BowVector gcounts = bow_vector(goal, db.symbols(), cache.stats);
    std::vector<BowVector> counts;
    counts.reserve(pool.size());
    for (int i : pool) counts.push_back(cache.counts[i]);
    if (at.explore == Strategy::BoW1) {
      return bow1_scores_from_counts(cache.stats, gcounts, counts, pool, rng);
    }
    return bow2_scores_from_counts(cache.stats, gcounts, counts, pool, rng);
  }

  // A successful application proves its node when it closed the goal or all
  // of its children are proved.
  bool app_satisfied(const AppRecord& app) const {
    if (!app.success) return false;
    if (app.kind == TacticOutcome::Kind::Closed) return true;
    if (!app.children_complete) return false;
    for (int c : app.children) {
      if (log.nodes[c].status != NodeStatus::Proved) return false;
    }
    return true;
  }

  void mark_proved(int nid) {
    log.nodes[nid].status = NodeStatus::Proved;
    int p = log.nodes[nid].parent;
    while (p >= 0 && log.nodes[p].status != NodeStatus::Proved) {
      bool proved = false;
      for (const AppRecord& app : log.nodes[p].apps) {
        if (app_satisfied(app)) {
          proved = true;
          break;
        }
      }
      if (!proved) break;
      log.nodes[p].status = NodeStatus::Proved;
      p = log.nodes[p].parent;
    }
  }

  void run() {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    if (explore_enabled) log.k2 = rng.next_int(cfg.k2_min, cfg.k2_max);

    if (make_node(db.entry(at.goal_index).stmt, -1, 0) < 0) return;
    std::deque<int> queue = {0};
    const int max_tactics = std::min(limits.max_top_tactics, kNumTactics);

    while (!queue.empty() && log.nodes[0].status != NodeStatus::Proved) {
      const double elapsed =
          std::chrono::duration<double>(clock::now() - start).count();
      if (elapsed > limits.wall_clock_guard_s) break;
      const int nid = queue.front();
      queue.pop_front();

      const Equation goal = log.nodes[nid].goal;
      const std::vector<int> goal_ids =
          token_ids(goal, db.symbols(), cache.stats);
      const std::vector<double> logits = score_tactics(cache.params, goal_ids);
      const std::vector<TacticId> order =
          select_tactics(logits, at.epsilon, max_tactics, rng);

      std::vector<ScoredPremise> policy_ranked;
      bool policy_done = false;
      int successes = 0;
      for (TacticId tactic : order) {
        if (successes >= limits.max_successful_apps) break;
        AppRecord app;
        app.tactic = tactic;
        app.epsilon = at.epsilon;
        if (tactic == TacticId::Rewrite && !pool.empty()) {
          if (!policy_done) {
            policy_ranked = rank_policy(goal_ids);
            policy_done = true;
          }
          app.params_before = select_parameters(
              policy_ranked, rank_explore(goal, goal_ids), cfg.k1, log.k2,
              std::min(cfg.param_cap, limits.total_params));
        }
        const TacticOutcome out =
            apply_tactic(goal, tactic, param_equations(app.params_before, db),
                         limits.tactic_step_budget);
        app.kind = out.kind;
        app.success = out.success();
        if (!app.success) {
          app.reason = out.reason;
          log.nodes[nid].apps.push_back(std::move(app));
          continue;
        }
        successes += 1;
        if (tactic == TacticId::Rewrite) {
          std::vector<int> after = prune_parameters(
              goal, tactic, app.params_before, out, db,
              limits.tactic_step_budget);
          app.params_after = std::move(after);
        }
        // children stays a prefix of the distinct subgoal list so that node
        // goals can be re-derived from a log without storing them.
        for (const Equation& sg : distinct_subgoals(out)) {
          int child = -1;
          for (int existing : kids_of[nid]) {
            if (equation_eq(log.nodes[existing].goal, sg)) {
              child = existing;
              break;
            }
          }
          if (child < 0) {
            child = make_node(sg, nid, log.nodes[nid].depth + 1);
            if (child < 0) {
              app.children_complete = false;
              break;
            }
            queue.push_back(child);
          }
          app.children.push_back(child);
        }
        const bool satisfied = app_satisfied(app);
        log.nodes[nid].apps.push_back(std::move(app));
        if (satisfied) {
          mark_proved(nid);
          break;
        }
      }
      if (log.nodes[nid].status == NodeStatus::Open) {
        bool any_success = false;
        for (const AppRecord& app : log.nodes[nid].apps) {
          any_success = any_success || app.success;
        }
        if (!any_success) log.nodes[nid].status = NodeStatus::Abandoned;
      }
    }
    log.proved = log.nodes[0].status == NodeStatus::Proved;
  }
};

}  // namespace

ProofLog prove(const AttemptConfig& at, const TheoremDatabase& db,
               const PremiseCache& cache, const ExplorationConfig& cfg,
               const SearchLimits& limits, Rng& rng) {
  Searcher s(at, db, cache, cfg, limits, rng);
  s.run();
  return std::move(s.log);
}

std::vector<int> prune_parameters(const Equation& goal, TacticId tactic,
                                  const std::vector<ScoredPremise>& params,
                                  const TacticOutcome& original,
                                  const TheoremDatabase& db, int step_budget) {
  if (!original.success()) {
    throw ReplayDivergence("prune_parameters called on a failed outcome");
  }
  std::vector<int> kept;
  for (const ScoredPremise& sp : params) kept.push_back(sp.index);
  {
    const TacticOutcome redo =
        apply_tactic(goal, tactic, index_equations(kept, db), step_budget);
    if (!outcome_equal(redo, original)) {
      throw ReplayDivergence("original parameter list no longer reproduces");
    }
  }
  for (int pos = static_cast<int>(kept.size()) - 1; pos >= 0; --pos) {
    std::vector<int> tentative = kept;
    tentative.erase(tentative.begin() + pos);
    const TacticOutcome redo =
        apply_tactic(goal, tactic, index_equations(tentative, db), step_budget);
    if (outcome_equal(redo, original)) kept = std::move(tentative);
  }
  return kept;
}

namespace {

bool replay_node(const ProofLog& log, const TheoremDatabase& db, int nid,
                 const Equation& goal, std::string* why) {
  const NodeRecord& node = log.nodes[nid];
  if (node.status != NodeStatus::Proved) {
    if (why) *why = "node " + std::to_string(nid) + " not marked proved";
    return false;
  }
  for (const AppRecord& app : node.apps) {
    if (!app.success) continue;
    bool children_proved = app.children_complete;
    for (int c : app.children) {
      children_proved =
          children_proved && log.nodes[c].status == NodeStatus::Proved;
    }
    if (!children_proved) continue;

    const TacticOutcome redo =
        apply_tactic(goal, app.tactic, index_equations(app.params_after, db),
                     log.limits.tactic_step_budget);
    if (redo.kind != app.kind) {
      if (why) {
        *why = "node " + std::to_string(nid) + " " +
               tactic_name(app.tactic) + ": outcome kind diverged";
      }
      return false;
    }
    if (redo.kind == TacticOutcome::Kind::Closed) return true;
    const std::vector<Equation> subgoals = distinct_subgoals(redo);
    if (subgoals.size() != app.children.size()) {
      if (why) {
        *why = "node " + std::to_string(nid) + ": subgoal count diverged";
      }
      return false;
    }
    bool all = true;
    for (size_t i = 0; i < subgoals.size() && all; ++i) {
      all = replay_node(log, db, app.children[i], subgoals[i], why);
    }
    if (all) return true;
    return false;
  }
  if (why) {
    *why = "node " + std::to_string(nid) + " has no replayable application";
  }
  return false;
}

}  // namespace

std::vector<Equation> derive_node_goals(const ProofLog& log,
                                        const TheoremDatabase& db) {
  std::vector<Equation> goals(log.nodes.size());
  std::vector<char> known(log.nodes.size(), 0);
  if (log.nodes.empty()) return goals;
  if (log.goal_index < 0 || log.goal_index >= db.size()) {
    throw ReplayDivergence("goal index out of range");
  }
  goals[0] = db.entry(log.goal_index).stmt;
  known[0] = 1;
  for (size_t nid = 0; nid < log.nodes.size(); ++nid) {
    if (!known[nid]) {
      throw ReplayDivergence("node " + std::to_string(nid) +
                             " unreachable from the root");
    }
    for (const AppRecord& app : log.nodes[nid].apps) {
      if (!app.success || app.children.empty()) continue;
      const TacticOutcome redo =
          apply_tactic(goals[nid], app.tactic,
                       index_equations(app.params_after, db),
                       log.limits.tactic_step_budget);
      if (redo.kind != app.kind) {
        throw ReplayDivergence("node " + std::to_string(nid) +
                               ": outcome kind diverged during derivation");
      }
      const std::vector<Equation> subgoals = distinct_subgoals(redo);
      if (subgoals.size() < app.children.size()) {
        throw ReplayDivergence("node " + std::to_string(nid) +
                               ": fewer subgoals than recorded children");
      }
      for (size_t i = 0; i < app.children.size(); ++i) {
        const int c = app.children[i];
        if (known[c]) {
          if (!equation_eq(goals[c], subgoals[i])) {
            throw ReplayDivergence("node " + std::to_string(c) +
                                   ": conflicting derived goals");
          }
        } else {
          goals[c] = subgoals[i];
          known[c] = 1;
        }
      }
    }
  }
  return goals;
}

bool replay(const ProofLog& log, const TheoremDatabase& db, std::string* why) {
  if (!log.proved) {
    if (why) *why = "log does not claim a proved root";
    return false;
  }
  if (log.nodes.empty()) {
    if (why) *why = "proved log has no nodes";
    return false;
  }
  if (log.goal_index < 0 || log.goal_index >= db.size()) {
    if (why) *why = "goal index out of range";
    return false;
  }
  return replay_node(log, db, 0, db.entry(log.goal_index).stmt, why);
}

std::string proof_log_to_json(const ProofLog& log) {
  ojson j;
  j["version"] = log.version;
  j["goal_index"] = log.goal_index;
  j["round"] = log.round;
  j["seed"] = log.seed;
  j["result"] = log.proved ? "proved" : "failed";
  j["k2"] = log.k2;
  j["limits"] = {{"top_tactics", log.limits.max_top_tactics},
                 {"successful_apps", log.limits.max_successful_apps},
                 {"total_params", log.limits.total_params},
                 {"step_budget", log.limits.tactic_step_budget},
                 {"node_budget", log.limits.proof_node_budget}};
  j["nodes_created"] = log.nodes.size();
  ojson nodes = ojson::array();
  for (const NodeRecord& n : log.nodes) {
    ojson jn;
    jn["id"] = n.id;
    jn["parent"] = n.parent;
    jn["depth"] = n.depth;
    jn["status"] = node_status_name(n.status);
    ojson apps = ojson::array();
    for (const AppRecord& a : n.apps) {
      ojson ja;
      ja["tactic"] = tactic_name(a.tactic);
      ojson before = ojson::array();
      for (const ScoredPremise& sp : a.params_before) {
        before.push_back(ojson::array(
            {sp.index, sp.source == PremiseSource::Policy ? 0 : 1}));
      }
      ja["params_before"] = std::move(before);
      if (a.success) {
        ja["params_after"] = a.params_after;
      } else {
        ja["params_after"] = nullptr;
      }
      switch (a.kind) {
        case TacticOutcome::Kind::Closed: ja["outcome"] = "closed"; break;
        case TacticOutcome::Kind::Subgoals: ja["outcome"] = "subgoals"; break;
        case TacticOutcome::Kind::Failed: ja["outcome"] = "failed"; break;
      }
      if (!a.success) ja["reason"] = fail_reason_name(a.reason);
      ja["children"] = a.children;
      if (!a.children_complete) ja["children_complete"] = false;
      ja["epsilon"] = a.epsilon;
      apps.push_back(std::move(ja));
    }
    jn["apps"] = std::move(apps);
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  return j.dump();
}

ProofLog proof_log_from_json(const std::string& line) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const std::exception& e) {
    throw IoError(std::string("bad proof log json: ") + e.what());
  }
  ProofLog log;
  try {
    log.version = j.at("version").get<int>();
    log.goal_index = j.at("goal_index").get<int>();
    log.round = j.at("round").get<int>();
    log.seed = j.at("seed").get<uint64_t>();
    log.proved = j.at("result").get<std::string>() == "proved";
    log.k2 = j.at("k2").get<int>();
    const ojson& jl = j.at("limits");
    log.limits.max_top_tactics = jl.at("top_tactics").get<int>();
    log.limits.max_successful_apps = jl.at("successful_apps").get<int>();
    log.limits.total_params = jl.at("total_params").get<int>();
    log.limits.tactic_step_budget = jl.at("step_budget").get<int>();
    log.limits.proof_node_budget = jl.at("node_budget").get<int>();
    for (const ojson& jn : j.at("nodes")) {
      NodeRecord n;
      n.id = jn.at("id").get<int>();
      n.parent = jn.at("parent").get<int>();
      n.depth = jn.at("depth").get<int>();
      const std::string st = jn.at("status").get<std::string>();
      n.status = st == "proved"    ? NodeStatus::Proved
                 : st == "abandoned" ? NodeStatus::Abandoned
                                     : NodeStatus::Open;
      for (const ojson& ja : jn.at("apps")) {
        AppRecord a;
        const auto t = tactic_from_name(ja.at("tactic").get<std::string>());
        if (!t) throw IoError("unknown tactic name in proof log");
        a.tactic = *t;
        for (const ojson& jp : ja.at("params_before")) {
          ScoredPremise sp;
          sp.index = jp.at(0).get<int>();
          sp.source = jp.at(1).get<int>() == 0 ? PremiseSource::Policy
                                               : PremiseSource::Explore;
          a.params_before.push_back(sp);
        }
        const std::string out = ja.at("outcome").get<std::string>();
        a.kind = out == "closed"     ? TacticOutcome::Kind::Closed
                 : out == "subgoals" ? TacticOutcome::Kind::Subgoals
                                     : TacticOutcome::Kind::Failed;
        a.success = a.kind != TacticOutcome::Kind::Failed;
        if (a.success) {
          a.params_after = ja.at("params_after").get<std::vector<int>>();
        } else {
          const std::string r = ja.at("reason").get<std::string>();
          a.reason = r == "timeout"     ? FailReason::Timeout
                     : r == "unchanged" ? FailReason::Unchanged
                                        : FailReason::Error;
        }
        a.children = ja.at("children").get<std::vector<int>>();
        if (ja.contains("children_complete")) {
          a.children_complete = ja.at("children_complete").get<bool>();
        }
        a.epsilon = ja.at("epsilon").get<double>();
        n.apps.push_back(std::move(a));
      }
      log.nodes.push_back(std::move(n));
    }
  } catch (const ojson::exception& e) {
    throw IoError(std::string("proof log schema violation: ") + e.what());
  }
  return log;
}

}  // namespace zp

#include "tripweaver/search.hpp"

#include <algorithm>
#include <set>

#include "tripweaver/errors.hpp"

namespace tripweaver {

namespace {

struct Evaluated {
  ScheduleResult schedule;
  double score = 0.0;
};

Evaluated evaluate(const PoiNetwork& network, const UserProfile& user, const Query& query,
                   std::span<const std::string> order, const ScheduleParams& schedule_params,
                   const ScoringParams& scoring_params) {
  Evaluated e;
  e.schedule = simulate(network, query, order, schedule_params);
  if (e.schedule.feasible) {
    e.score = route_score(e.schedule.itinerary, user, network, scoring_params);
    e.schedule.itinerary.score = e.score;
  }
  return e;
}

// Candidate pool in ascending id order, capped at candidate_limit by highest
// attractiveness (ties toward lower id).
std::vector<std::string> candidate_pool(const PoiNetwork& network, const UserProfile& user,
                                        const SearchParams& search_params,
                                        const ScoringParams& scoring_params) {
  std::vector<std::string> ids;
  ids.reserve(network.venues().size());
  for (const Venue& v : network.venues()) {
    ids.push_back(v.id);
  }
  if (ids.size() > static_cast<std::size_t>(search_params.candidate_limit)) {
    std::vector<std::pair<double, std::string>> ranked;
    ranked.reserve(ids.size());
    for (const std::string& id : ids) {
      ranked.emplace_back(attractiveness(user, network.venue(id), network, scoring_params), id);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) {
        return a.first > b.first;
      }
      return a.second < b.second;
    });
    ranked.resize(static_cast<std::size_t>(search_params.candidate_limit));
    ids.clear();
    for (auto& [score, id] : ranked) {
      ids.push_back(std::move(id));
    }
    std::sort(ids.begin(), ids.end());
  }
  return ids;
}

}  // namespace

PlanResult plan(const PoiNetwork& network, const UserProfile& user, const Query& query,
                const ScheduleParams& schedule_params, const SearchParams& search_params,
                const ScoringParams& scoring_params) {
  validate_query(query);
  if (search_params.candidate_limit <= 0) {
    throw DomainError("candidate_limit must be > 0");
  }
  if (search_params.local_search_rounds < 0) {
    throw DomainError("local_search_rounds must be >= 0");
  }

  const std::vector<std::string> candidates =
      candidate_pool(network, user, search_params, scoring_params);

  const Evaluated empty = evaluate(network, user, query, {}, schedule_params, scoring_params);
  if (!empty.schedule.feasible) {
    return PlanResult{false, Itinerary{}};  // start -> end alone misses the budget
  }

  struct Route {
    std::vector<std::string> order;
    Evaluated eval;
  };
  const Route empty_route{{}, empty};

  // Best feasible route evaluated anywhere in the search; greedy stuffing and
  // worsening neighborhood steps can pass the peak, so the peak itself is what
  // plan returns.
  Route incumbent = empty_route;

  auto unused_of = [&](const Route& route) {
    std::set<std::string> used(route.order.begin(), route.order.end());
    std::vector<std::string> unused;
    for (const std::string& id : candidates) {
      if (!used.count(id)) {
        unused.push_back(id);
      }
    }
    return unused;
  };

  auto eval_order = [&](std::vector<std::string> order) {
    Evaluated e = evaluate(network, user, query, order, schedule_params, scoring_params);
    Route route{std::move(order), std::move(e)};
    if (route.eval.schedule.feasible && route.eval.score > incumbent.eval.score) {
      incumbent = route;
    }
    return route;
  };

  // Greedy insertion sweep: repeatedly apply the feasible insertion with the
  // best key until nothing fits. The key is marginal score per marginal
  // elapsed minute; `score_gain` switches to raw marginal score, a second
  // deterministic construction that escapes a different set of local optima.
  auto refill = [&](Route route, bool score_gain) {
    while (true) {
      bool found = false;
      double best_key = 0.0;
      Route best;
      for (const std::string& id : unused_of(route)) {
        for (std::size_t pos = 0; pos <= route.order.size(); ++pos) {
          std::vector<std::string> trial = route.order;
          trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), id);
          Route r = eval_order(std::move(trial));
          if (!r.eval.schedule.feasible) {
            continue;
          }
          const double marginal_score = r.eval.score - route.eval.score;
          const double marginal_elapsed =
              std::max(1.0, r.eval.schedule.itinerary.final_arrival -
                                route.eval.schedule.itinerary.final_arrival);
          const double key = score_gain ? marginal_score : marginal_score / marginal_elapsed;
          // Enumeration runs in (id, position) order, so strict improvement
          // keeps the tie-broken first candidate.
          if (!found || key > best_key) {
            found = true;
            best_key = key;
            best = std::move(r);
          }
        }
      }
      if (!found) {
        return route;
      }
      route = std::move(best);
    }
  };

  // Deterministic relocate / swap / replace neighborhood.
  auto neighbors = [&](const Route& route, auto&& visit_trial) {
    const std::size_t k = route.order.size();
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) {
          continue;
        }
        std::vector<std::string> trial = route.order;
        std::string moved = trial[i];
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
        trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(j), std::move(moved));
        if (trial != route.order) {
          visit_trial(std::move(trial));
        }
      }
    }
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        std::vector<std::string> trial = route.order;
        std::swap(trial[i], trial[j]);
        visit_trial(std::move(trial));
      }
    }
    const std::vector<std::string> unused = unused_of(route);
    for (std::size_t i = 0; i < k; ++i) {
      for (const std::string& id : unused) {
        std::vector<std::string> trial = route.order;
        trial[i] = id;
        visit_trial(std::move(trial));
      }
    }
  };

  // One steepest-ascent pass; applies the best strictly improving feasible
  // move, if any.
  auto local_search_pass = [&](Route& route) {
    bool improved = false;
    Route best;
    double best_score = route.eval.score;
    neighbors(route, [&](std::vector<std::string>&& trial) {
      Route r = eval_order(std::move(trial));
      if (r.eval.schedule.feasible && r.eval.score > best_score) {
        improved = true;
        best_score = r.eval.score;
        best = std::move(r);
      }
    });
    if (improved) {
      route = std::move(best);
    }
    return improved;
  };

  // Compound pass: a simple move followed by a fresh insertion sweep (both
  // sweep criteria), accepted only when the pair strictly improves. Crosses
  // valleys where a worsening reorder frees enough room to fit one more venue.
  // Only affordable on small candidate pools.
  auto compound_pass = [&](Route& route) {
    bool improved = false;
    Route best;
    double best_score = route.eval.score;
    neighbors(route, [&](std::vector<std::string>&& trial) {
      Route r = eval_order(std::move(trial));
      if (!r.eval.schedule.feasible) {
        return;
      }
      for (bool score_gain : {false, true}) {
        Route filled = refill(r, score_gain);
        if (filled.eval.score > best_score) {
          improved = true;
          best_score = filled.eval.score;
          best = std::move(filled);
        }
      }
    });
    if (improved) {
      route = std::move(best);
    }
    return improved;
  };

  const bool small_pool = candidates.size() <= 24;

  // Sidestep on a score plateau: the first feasible equal-score move to an
  // order not seen in this polish. Zero-value padding venues create large
  // plateaus whose far edges hide strict improvements; the seen-set prevents
  // cycling and the round budget bounds the walk.
  auto plateau_step = [&](Route& route, std::set<std::vector<std::string>>& seen) {
    bool stepped = false;
    neighbors(route, [&](std::vector<std::string>&& trial) {
      if (stepped || seen.count(trial)) {
        return;
      }
      Route r = eval_order(std::move(trial));
      if (r.eval.schedule.feasible && std::abs(r.eval.score - route.eval.score) <= 1e-12) {
        seen.insert(r.order);
        route = std::move(r);
        stepped = true;
      }
    });
    return stepped;
  };

  // Improvement loop, bounded by local_search_rounds passes. A pass that moves
  // visits can reopen room under the budget, so the insertion sweep runs again
  // whenever simple moves stall.
  auto polish = [&](Route route) {
    std::set<std::vector<std::string>> seen;
    seen.insert(route.order);
    for (int round = 0; round < search_params.local_search_rounds && !route.order.empty();
         ++round) {
      if (local_search_pass(route)) {
        seen.insert(route.order);
        continue;
      }
      Route refilled = refill(route, false);
      {
        Route alt = refill(route, true);
        if (alt.eval.score > refilled.eval.score) {
          refilled = std::move(alt);
        }
      }
      // Score-improving growth is taken eagerly; pure stuffing (zero-gain
      // insertions) waits until the improvement moves are exhausted, so it
      // cannot lock a large venue out of the remaining slack.
      if (refilled.eval.score > route.eval.score + 1e-12) {
        route = std::move(refilled);
        seen.insert(route.order);
        continue;
      }
      if (small_pool && compound_pass(route)) {
        seen.insert(route.order);
        continue;
      }
      if (small_pool && plateau_step(route, seen)) {
        continue;
      }
      if (refilled.order.size() != route.order.size()) {
        route = std::move(refilled);
        seen.insert(route.order);
        continue;
      }
      break;
    }
    return route;
  };

  polish(refill(empty_route, false));
  polish(refill(empty_route, true));
  // The peak usually sits off the final trajectory; polish around it until it
  // stops moving.
  for (int i = 0; i < 8; ++i) {
    const double before = incumbent.eval.score;
    polish(incumbent);
    if (incumbent.eval.score <= before) {
      break;
    }
  }

  PlanResult result;
  result.feasible = true;
  result.itinerary = std::move(incumbent.eval.schedule.itinerary);
  result.itinerary.score = incumbent.eval.score;
  return result;
}

Itinerary brute_force(const PoiNetwork& network, const UserProfile& user, const Query& query,
                      std::span<const std::string> candidate_ids,
                      const ScheduleParams& schedule_params, const ScoringParams& scoring_params) {
  validate_query(query);
  if (candidate_ids.size() > 10) {
    throw DomainError("brute_force accepts at most 10 candidates");
  }
  std::vector<std::string> sorted(candidate_ids.begin(), candidate_ids.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("brute_force candidates must be distinct");
  }
  for (const std::string& id : sorted) {
    network.venue(id);
  }

  Itinerary best;
  double best_score = -1.0;
  std::vector<std::string> seq;
  std::vector<bool> taken(sorted.size(), false);

  // DFS in lexicographic sequence order; strict improvement keeps the
  // lexicographically smallest sequence among score ties.
  auto visit = [&](auto&& self) -> void {
    Evaluated e = evaluate(network, user, query, seq, schedule_params, scoring_params);
    if (e.schedule.feasible) {
      if (e.score > best_score) {
        best_score = e.score;
        best = e.schedule.itinerary;
      }
    } else if (e.schedule.failed_visit >= 0) {
      return;  // failure at a visit: every extension shares that prefix
    }
    for (std::size_t c = 0; c < sorted.size(); ++c) {
      if (taken[c]) {
        continue;
      }
      taken[c] = true;
      seq.push_back(sorted[c]);
      self(self);
      seq.pop_back();
      taken[c] = false;
    }
  };
  visit(visit);

  if (best_score < 0.0) {
    return Itinerary{};  // nothing feasible
  }
  return best;
}

}  // namespace tripweaver

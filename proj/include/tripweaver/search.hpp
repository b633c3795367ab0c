#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tripweaver/model.hpp"
#include "tripweaver/schedule.hpp"
#include "tripweaver/scoring.hpp"

namespace tripweaver {

struct SearchParams {
  int candidate_limit = 1000;
  int local_search_rounds = 50;
  // Reserved for randomized restarts; the default path uses no randomness.
  std::uint64_t rng_seed = 0;
};

struct PlanResult {
  bool feasible = false;  // false only when even the empty route misses the budget
  Itinerary itinerary;
};

// Greedy insertion maximizing marginal score per marginal elapsed minute,
// followed by relocate/swap/replace local search accepting strictly improving
// feasible moves. Deterministic: ties break on lower venue id, then earlier
// position.
PlanResult plan(const PoiNetwork& network, const UserProfile& user, const Query& query,
                const ScheduleParams& schedule_params = {}, const SearchParams& search_params = {},
                const ScoringParams& scoring_params = {});

// Exhaustive oracle over every subset and permutation of at most 10 candidate
// venues; returns the feasible itinerary of maximum score (ties resolved
// toward the lexicographically smallest venue-id sequence).
Itinerary brute_force(const PoiNetwork& network, const UserProfile& user, const Query& query,
                      std::span<const std::string> candidate_ids,
                      const ScheduleParams& schedule_params = {},
                      const ScoringParams& scoring_params = {});

}  // namespace tripweaver

#pragma once

#include <span>
#include <string>

#include "tripweaver/model.hpp"

namespace tripweaver {

struct ScheduleParams {
  double max_wait = 60.0;  // minutes a visitor will wait at a not-yet-open venue
};

enum class InfeasibleReason {
  None,
  Budget,        // final arrival past the query's end time
  WaitTooLong,   // required wait exceeds max_wait
  ClosesTooEarly  // visit would overflow the venue's close time
};

const char* to_string(InfeasibleReason reason);

struct ScheduleResult {
  bool feasible = false;
  Itinerary itinerary;  // valid only when feasible
  InfeasibleReason reason = InfeasibleReason::None;
  // Index of the visit where simulation failed, -1 when the failure is the
  // final leg back to the end location (or no failure). A failure at a visit
  // also dooms every order sharing that prefix.
  int failed_visit = -1;
};

// Forward time simulation of an ordered venue sequence against a query.
// Itinerary.score is left at 0; callers fill it via route_score.
ScheduleResult simulate(const PoiNetwork& network, const Query& query,
                        std::span<const std::string> order, const ScheduleParams& params = {});

}  // namespace tripweaver

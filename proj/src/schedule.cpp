#include "tripweaver/schedule.hpp"

#include <algorithm>
#include <set>

#include "tripweaver/errors.hpp"

namespace tripweaver {

namespace {

// The clock may legitimately sit at exactly 1440 before the closing leg of a
// day-spanning order; charge such departures at the last slot's rate. The
// budget check still decides feasibility.
double transit_at(const PoiNetwork& network, const Place& from, const Place& to, double clock) {
  const double lookup = std::min(clock, static_cast<double>(kMinutesPerDay) - 1e-9);
  return transit_duration(network, from, to, lookup);
}

}  // namespace

const char* to_string(InfeasibleReason reason) {
  switch (reason) {
    case InfeasibleReason::None:
      return "none";
    case InfeasibleReason::Budget:
      return "budget";
    case InfeasibleReason::WaitTooLong:
      return "wait_too_long";
    case InfeasibleReason::ClosesTooEarly:
      return "closes_too_early";
  }
  return "unknown";
}

ScheduleResult simulate(const PoiNetwork& network, const Query& query,
                        std::span<const std::string> order, const ScheduleParams& params) {
  validate_query(query);
  if (params.max_wait < 0.0) {
    throw DomainError("max_wait must be >= 0");
  }
  {
    std::set<std::string> seen;
    for (const std::string& id : order) {
      network.venue(id);  // throws LookupError on unknown ids
      if (!seen.insert(id).second) {
        throw DomainError("duplicate venue in order: " + id);
      }
    }
  }

  ScheduleResult result;
  double clock = query.start_time;
  Place prev = Place::at(query.start_location);

  for (std::size_t i = 0; i < order.size(); ++i) {
    const Venue& venue = network.venue(order[i]);
    const Place here = Place::venue(order[i]);

    clock += transit_at(network, prev, here, clock);
    const double arrival = clock;
    if (arrival > query.end_time) {
      result.reason = InfeasibleReason::Budget;
      result.failed_visit = static_cast<int>(i);
      return result;
    }

    ScheduledVisit visit;
    visit.venue_id = order[i];
    visit.arrival = arrival;
    visit.wait = std::max(0.0, static_cast<double>(venue.open_min) - arrival);
    if (visit.wait > params.max_wait) {
      result.reason = InfeasibleReason::WaitTooLong;
      result.failed_visit = static_cast<int>(i);
      return result;
    }
    visit.visit_start = arrival + visit.wait;
    visit.depart = visit.visit_start + venue.mean_stay;
    if (visit.depart > static_cast<double>(venue.close_min)) {
      result.reason = InfeasibleReason::ClosesTooEarly;
      result.failed_visit = static_cast<int>(i);
      return result;
    }
    clock = visit.depart;
    if (clock > query.end_time) {
      result.reason = InfeasibleReason::Budget;
      result.failed_visit = static_cast<int>(i);
      return result;
    }

    result.itinerary.visits.push_back(std::move(visit));
    prev = here;
  }

  clock += transit_at(network, prev, Place::at(query.end_location), clock);
  result.itinerary.final_arrival = clock;
  if (clock > query.end_time) {
    result.reason = InfeasibleReason::Budget;
    result.failed_visit = -1;
    result.itinerary.visits.clear();
    return result;
  }

  result.feasible = true;
  return result;
}

}  // namespace tripweaver

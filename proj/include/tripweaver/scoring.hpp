#pragma once

#include "tripweaver/model.hpp"

namespace tripweaver {

struct ScoringParams {
  double alpha = 0.5;  // blend between category preference and popularity
};

// Blend of peak-relative category preference and log-normalized popularity;
// always in [0, 1]. A category missing from the profile counts as weight 0.
double attractiveness(const UserProfile& user, const Venue& venue, const PoiNetwork& network,
                      const ScoringParams& params = {});

// Mean peak-relative histogram density over the hours touched by
// [visit_start, depart). 1.0 for venues without temporal evidence.
double suitability(const Venue& venue, double visit_start, double depart);

// Sum over visits of attractiveness x suitability.
double route_score(const Itinerary& itinerary, const UserProfile& user, const PoiNetwork& network,
                   const ScoringParams& params = {});

}  // namespace tripweaver

#include "tripweaver/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "tripweaver/errors.hpp"

namespace tripweaver {

double attractiveness(const UserProfile& user, const Venue& venue, const PoiNetwork& network,
                      const ScoringParams& params) {
  if (params.alpha < 0.0 || params.alpha > 1.0) {
    throw DomainError("alpha must be in [0, 1]");
  }

  double peak_weight = 0.0;
  for (const auto& [category, weight] : user.category_weights) {
    peak_weight = std::max(peak_weight, weight);
  }
  double preference = 0.0;
  if (peak_weight > 0.0) {
    auto it = user.category_weights.find(venue.category);
    if (it != user.category_weights.end()) {
      preference = it->second / peak_weight;
    }
  }

  const double pop_norm =
      std::log1p(venue.popularity) / std::log1p(network.max_popularity());

  return params.alpha * preference + (1.0 - params.alpha) * pop_norm;
}

double suitability(const Venue& venue, double visit_start, double depart) {
  if (!(visit_start < depart)) {
    throw DomainError("suitability: visit_start must precede depart");
  }
  // Tolerance absorbs float dust from schedule arithmetic, nothing more.
  if (visit_start < venue.open_min - 1e-9 || depart > venue.close_min + 1e-9) {
    throw DomainError("suitability: visit outside operating hours of " + venue.id);
  }

  double peak = 0.0;
  for (double h : venue.visit_histogram) {
    peak = std::max(peak, h);
  }
  if (peak <= 0.0) {
    return 1.0;  // no temporal evidence
  }

  const int first_hour = std::clamp(static_cast<int>(visit_start / 60.0), 0, kSlotsPerDay - 1);
  const int last_hour =
      std::clamp(static_cast<int>(std::ceil(depart / 60.0)) - 1, 0, kSlotsPerDay - 1);
  double sum = 0.0;
  for (int h = first_hour; h <= last_hour; ++h) {
    sum += venue.visit_histogram[h] / peak;
  }
  return sum / static_cast<double>(last_hour - first_hour + 1);
}

double route_score(const Itinerary& itinerary, const UserProfile& user, const PoiNetwork& network,
                   const ScoringParams& params) {
  double total = 0.0;
  for (const ScheduledVisit& visit : itinerary.visits) {
    const Venue& venue = network.venue(visit.venue_id);
    total += attractiveness(user, venue, network, params) *
             suitability(venue, visit.visit_start, visit.depart);
  }
  return total;
}

}  // namespace tripweaver

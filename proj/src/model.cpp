#include "tripweaver/model.hpp"

#include <algorithm>
#include <cmath>

#include "tripweaver/errors.hpp"

namespace tripweaver {

namespace {

// Lower bound for a fallback transit between distinct venues that happen to
// share coordinates; keeps the "positive duration between distinct venues"
// invariant intact.
constexpr double kMinDistinctTransitMinutes = 0.01;

std::string pair_key(const std::string& from, const std::string& to) {
  std::string key;
  key.reserve(from.size() + to.size() + 1);
  key += from;
  key += '\x1f';
  key += to;
  return key;
}

}  // namespace

int slot_of(double minute_of_day) {
  if (minute_of_day < 0.0 || minute_of_day >= static_cast<double>(kMinutesPerDay)) {
    throw DomainError("minute-of-day out of range [0, 1440): " + std::to_string(minute_of_day));
  }
  return static_cast<int>(minute_of_day / 60.0);
}

void validate_venue(const Venue& venue) {
  if (venue.id.empty()) {
    throw DomainError("venue id must be non-empty");
  }
  if (!valid_coordinates(venue.location)) {
    throw DomainError("venue " + venue.id + ": coordinates out of range");
  }
  if (venue.open_min < 0 || venue.close_min > kMinutesPerDay || venue.open_min >= venue.close_min) {
    throw DomainError("venue " + venue.id + ": invalid open interval");
  }
  if (!(venue.mean_stay > 0.0)) {
    throw DomainError("venue " + venue.id + ": mean_stay must be > 0");
  }
  if (venue.popularity < 0.0) {
    throw DomainError("venue " + venue.id + ": popularity must be >= 0");
  }
  double sum = 0.0;
  for (double h : venue.visit_histogram) {
    if (h < 0.0) {
      throw DomainError("venue " + venue.id + ": negative histogram entry");
    }
    sum += h;
  }
  if (sum > 0.0 && std::abs(sum - 1.0) > 1e-9) {
    throw DomainError("venue " + venue.id + ": nonzero histogram must be normalized");
  }
}

void validate_user_profile(const UserProfile& user) {
  double sum = 0.0;
  for (const auto& [category, weight] : user.category_weights) {
    if (weight < 0.0 || weight > 1.0) {
      throw DomainError("user " + user.user_id + ": weight for " + category + " outside [0,1]");
    }
    sum += weight;
  }
  if (!user.category_weights.empty() && std::abs(sum - 1.0) > 1e-9) {
    throw DomainError("user " + user.user_id + ": weights must sum to 1");
  }
}

void validate_query(const Query& query) {
  if (!valid_coordinates(query.start_location) || !valid_coordinates(query.end_location)) {
    throw DomainError("query: coordinates out of range");
  }
  if (query.start_time < 0.0 || query.end_time > kMinutesPerDay ||
      !(query.start_time < query.end_time)) {
    throw DomainError("query: need 0 <= start_time < end_time <= 1440");
  }
}

Place Place::venue(std::string id) {
  Place p;
  p.id_ = std::move(id);
  return p;
}

Place Place::at(LatLon location) {
  Place p;
  p.location_ = location;
  return p;
}

PoiNetwork::PoiNetwork(std::vector<Venue> venues, std::vector<TransitProfile> transit,
                       std::array<double, kSlotsPerDay> fallback_speed_kmh)
    : venues_(std::move(venues)), transit_(std::move(transit)), fallback_speed_(fallback_speed_kmh) {
  std::sort(venues_.begin(), venues_.end(),
            [](const Venue& a, const Venue& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < venues_.size(); ++i) {
    validate_venue(venues_[i]);
    if (!venue_index_.emplace(venues_[i].id, i).second) {
      throw DomainError("duplicate venue id: " + venues_[i].id);
    }
  }

  for (double speed : fallback_speed_) {
    if (!(speed > 0.0)) {
      throw DomainError("fallback speed must be > 0 km/h in every slot");
    }
  }

  std::sort(transit_.begin(), transit_.end(), [](const TransitProfile& a, const TransitProfile& b) {
    return std::tie(a.from_id, a.to_id) < std::tie(b.from_id, b.to_id);
  });
  for (std::size_t i = 0; i < transit_.size(); ++i) {
    const TransitProfile& p = transit_[i];
    if (p.from_id == p.to_id) {
      throw DomainError("transit profile with identical endpoints: " + p.from_id);
    }
    if (!venue_index_.count(p.from_id) || !venue_index_.count(p.to_id)) {
      throw DomainError("transit profile references unknown venue: " + p.from_id + "->" + p.to_id);
    }
    for (int s = 0; s < kSlotsPerDay; ++s) {
      if (!(p.slot_minutes[s] > 0.0)) {
        throw DomainError("transit profile " + p.from_id + "->" + p.to_id +
                          ": durations must be > 0");
      }
      if (p.slot_samples[s] < 0) {
        throw DomainError("transit profile " + p.from_id + "->" + p.to_id +
                          ": negative sample count");
      }
      if (p.slot_samples[s] == 0 && p.provenance[s] != SlotProvenance::Fallback) {
        throw DomainError("transit profile " + p.from_id + "->" + p.to_id +
                          ": observed slot without samples");
      }
    }
    if (!transit_index_.emplace(pair_key(p.from_id, p.to_id), i).second) {
      throw DomainError("duplicate transit profile: " + p.from_id + "->" + p.to_id);
    }
  }

  max_popularity_ = 0.0;
  for (const Venue& v : venues_) {
    max_popularity_ = std::max(max_popularity_, v.popularity);
  }
  if (max_popularity_ <= 0.0) {
    max_popularity_ = 1.0;
  }
}

const Venue* PoiNetwork::find_venue(const std::string& id) const {
  auto it = venue_index_.find(id);
  return it == venue_index_.end() ? nullptr : &venues_[it->second];
}

const Venue& PoiNetwork::venue(const std::string& id) const {
  const Venue* v = find_venue(id);
  if (v == nullptr) {
    throw LookupError("unknown venue id: " + id);
  }
  return *v;
}

const TransitProfile* PoiNetwork::find_profile(const std::string& from,
                                               const std::string& to) const {
  auto it = transit_index_.find(pair_key(from, to));
  return it == transit_index_.end() ? nullptr : &transit_[it->second];
}

PoiNetwork PoiNetwork::restricted_to(const std::vector<std::string>& ids) const {
  std::set<std::string> keep(ids.begin(), ids.end());
  std::vector<Venue> venues;
  venues.reserve(keep.size());
  for (const std::string& id : keep) {
    venues.push_back(venue(id));
  }
  std::vector<TransitProfile> transit;
  for (const TransitProfile& p : transit_) {
    if (keep.count(p.from_id) && keep.count(p.to_id)) {
      transit.push_back(p);
    }
  }
  return PoiNetwork(std::move(venues), std::move(transit), fallback_speed_);
}

LatLon resolve(const PoiNetwork& network, const Place& place) {
  if (place.venue_id()) {
    return network.venue(*place.venue_id()).location;
  }
  return place.raw_location();
}

double transit_duration(const PoiNetwork& network, const Place& from, const Place& to,
                        double depart_min) {
  const int slot = slot_of(depart_min);  // validates the departure time
  const LatLon a = resolve(network, from);
  const LatLon b = resolve(network, to);

  const bool venue_pair = from.venue_id().has_value() && to.venue_id().has_value();
  if (venue_pair && *from.venue_id() == *to.venue_id()) {
    return 0.0;
  }
  if (venue_pair) {
    const TransitProfile* profile = network.find_profile(*from.venue_id(), *to.venue_id());
    if (profile != nullptr && profile->provenance[slot] == SlotProvenance::Observed) {
      return profile->slot_minutes[slot];
    }
  }

  double minutes = haversine_km(a, b) / network.fallback_speed()[slot] * 60.0;
  if (venue_pair && minutes < kMinDistinctTransitMinutes) {
    minutes = kMinDistinctTransitMinutes;
  }
  return minutes;
}

}  // namespace tripweaver

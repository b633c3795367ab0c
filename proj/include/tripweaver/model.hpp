#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tripweaver/geo.hpp"

namespace tripweaver {

inline constexpr int kMinutesPerDay = 1440;
inline constexpr int kSlotsPerDay = 24;

// Hour slot containing a minute-of-day; requires t in [0, 1440).
int slot_of(double minute_of_day);

struct Venue {
  std::string id;
  std::string name;
  LatLon location;
  std::string category;
  double popularity = 0.0;  // mean check-ins per day
  int open_min = 0;         // single daily open interval [open_min, close_min)
  int close_min = kMinutesPerDay;
  std::array<double, kSlotsPerDay> visit_histogram{};  // all-zero, or normalized to sum 1
  double mean_stay = 60.0;  // minutes
};

// Throws DomainError when any Venue invariant is violated.
void validate_venue(const Venue& venue);

enum class SlotProvenance : std::uint8_t { Fallback = 0, Observed = 1 };

// Directed, time-sliced transit durations between two venues. Slots without
// observed samples carry the distance fallback value and a Fallback flag.
struct TransitProfile {
  std::string from_id;
  std::string to_id;
  std::array<double, kSlotsPerDay> slot_minutes{};
  std::array<int, kSlotsPerDay> slot_samples{};
  std::array<SlotProvenance, kSlotsPerDay> provenance{};
};

struct UserProfile {
  std::string user_id;
  std::map<std::string, double> category_weights;  // each in [0,1], sums to 1
  std::set<std::string> visited;
};

void validate_user_profile(const UserProfile& user);

struct Query {
  LatLon start_location;
  LatLon end_location;
  double start_time = 0.0;  // minutes-of-day
  double end_time = 0.0;

  double budget() const { return end_time - start_time; }
};

void validate_query(const Query& query);

struct ScheduledVisit {
  std::string venue_id;
  double arrival = 0.0;
  double wait = 0.0;
  double visit_start = 0.0;
  double depart = 0.0;
};

struct Itinerary {
  std::vector<ScheduledVisit> visits;
  double final_arrival = 0.0;
  double score = 0.0;
};

// Endpoint of a transit leg: a venue id resolved through the network, or raw
// coordinates (query start/end points).
class Place {
 public:
  static Place venue(std::string id);
  static Place at(LatLon location);

  const std::optional<std::string>& venue_id() const { return id_; }
  LatLon raw_location() const { return location_; }

 private:
  std::optional<std::string> id_;
  LatLon location_;
};

// Immutable after construction; safe to share across concurrent planning
// queries. Venues and profiles are kept sorted by id so serialization and
// iteration order are canonical.
class PoiNetwork {
 public:
  PoiNetwork(std::vector<Venue> venues, std::vector<TransitProfile> transit,
             std::array<double, kSlotsPerDay> fallback_speed_kmh);

  const std::vector<Venue>& venues() const { return venues_; }
  const std::vector<TransitProfile>& transit_profiles() const { return transit_; }
  const std::array<double, kSlotsPerDay>& fallback_speed() const { return fallback_speed_; }
  double max_popularity() const { return max_popularity_; }

  const Venue* find_venue(const std::string& id) const;
  const Venue& venue(const std::string& id) const;  // throws LookupError
  const TransitProfile* find_profile(const std::string& from, const std::string& to) const;

  // Sub-network containing only `ids` and the profiles among them.
  PoiNetwork restricted_to(const std::vector<std::string>& ids) const;

 private:
  std::vector<Venue> venues_;
  std::vector<TransitProfile> transit_;
  std::array<double, kSlotsPerDay> fallback_speed_{};
  double max_popularity_ = 1.0;
  std::unordered_map<std::string, std::size_t> venue_index_;
  std::unordered_map<std::string, std::size_t> transit_index_;
};

LatLon resolve(const PoiNetwork& network, const Place& place);

// Transit minutes leaving `from` toward `to` at `depart_min`. Uses the stored
// slot value when that slot was observed, otherwise great-circle distance over
// the slot's fallback speed. Identical venue ids cost 0. The whole transit is
// charged at the departure slot's rate even when it crosses a slot boundary.
double transit_duration(const PoiNetwork& network, const Place& from, const Place& to,
                        double depart_min);

}  // namespace tripweaver

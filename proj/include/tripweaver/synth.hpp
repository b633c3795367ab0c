#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tripweaver/model.hpp"

namespace tripweaver {

struct CityParams {
  LatLon bbox_min{37.70, -122.49};
  LatLon bbox_max{37.80, -122.39};
  double base_speed_kmh = 25.0;
  std::vector<int> rush_hours{7, 8};
  double rush_multiplier = 2.0;
  int hub_count = 3;  // venues taxi trips shuttle between
};

struct GroundTruthVenue {
  std::string id;
  int peak_hour = 12;            // true best visiting hour
  double mean_stay = 60.0;       // true stay minutes
  double popularity_weight = 1.0;  // check-in draw prior
};

struct CityGroundTruth {
  std::uint64_t seed = 0;
  CityParams params;
  std::vector<Venue> venues;            // metadata only: popularity/histogram unset
  std::vector<GroundTruthVenue> truth;  // aligned with venues
  std::vector<std::string> hub_ids;

  const Venue& venue(const std::string& id) const;
  const GroundTruthVenue& truth_for(const std::string& id) const;
  // Distance over base speed, doubled (rush_multiplier) on rush-hour slots.
  double true_transit(const std::string& from, const std::string& to, int slot) const;
};

// Deterministic synthetic city: venues uniform in the bounding box with seeded
// categories, hours, stays and histogram peaks. Venue 0 is an airport-like
// start-area venue, venue 1 a noon-peaked restaurant near it.
CityGroundTruth generate_city(std::uint64_t seed, int n_venues, const CityParams& params = {});

std::string venues_csv(const CityGroundTruth& city);
std::string ground_truth_json(const CityGroundTruth& city);

struct TraceParams {
  int n_vehicles = 100;
  int trips_per_vehicle = 20;
  double noise_m = 10.0;  // Gaussian position noise; also scales duration jitter
  // One cadence interval covers the 200 m stay radius even at rush speed, so
  // stay-point boundaries land on the true dwell endpoints.
  int cadence_s = 60;
};

// Vehicles shuttle between hub venues: dwell near the true stay time, drive
// for the true slot-dependent transit duration, emitting noisy GPS points at a
// fixed cadence. Pure function of (city, params, seed).
std::string generate_traces(const CityGroundTruth& city, const TraceParams& params,
                            std::uint64_t seed);

struct CheckinParams {
  int n_users = 500;
  int checkins_per_user = 40;
  int days = 30;
};

// Users with a seeded preferred category check in to venues drawn by
// popularity prior x preference, at hours near each venue's true peak and
// always inside operating hours.
std::string generate_checkins(const CityGroundTruth& city, const CheckinParams& params,
                              std::uint64_t seed);

}  // namespace tripweaver

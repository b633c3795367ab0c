#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tripweaver/model.hpp"

namespace tripweaver {

struct CheckinRecord {
  std::string user_id;
  std::string venue_id;
  std::int64_t timestamp = 0;  // epoch seconds UTC
};

struct GpsPoint {
  std::string vehicle_id;
  std::int64_t timestamp = 0;  // epoch seconds UTC
  LatLon location;
};

struct StayPoint {
  std::string vehicle_id;
  LatLon centroid;
  std::int64_t arrive = 0;  // epoch seconds
  std::int64_t depart = 0;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::size_t skipped = 0;  // malformed rows, counted but not fatal
};

// CSV parsers for the three input files. Malformed rows are skipped and
// counted; more than 50% malformed data rows raises FormatError.
ParseResult<CheckinRecord> parse_checkins(std::istream& in);
ParseResult<Venue> parse_venues(std::istream& in);
ParseResult<GpsPoint> parse_traces(std::istream& in);

// Fills popularity (check-ins per day) and the normalized hourly histogram on
// each venue. Records naming unknown venues are skipped; returns that count.
std::size_t build_venue_profiles(std::vector<Venue>& venues,
                                 const std::vector<CheckinRecord>& records, int observation_days,
                                 int utc_offset_min);

// Laplace-smoothed category weights from each user's visiting history. The
// category set comes from the venue metadata.
std::vector<UserProfile> build_user_profiles(const std::vector<CheckinRecord>& records,
                                             const std::vector<Venue>& venues, double smoothing);

// Classical stay-point extraction: maximal runs of points that all lie within
// dist_threshold_m of the run's first point and span at least
// time_threshold_min. Points must belong to one vehicle, sorted by timestamp.
std::vector<StayPoint> detect_stay_points(std::span<const GpsPoint> trace, double dist_threshold_m,
                                          double time_threshold_min);

struct TransitBuildParams {
  double stay_dist_m = 200.0;
  double stay_min = 20.0;
  double snap_radius_m = 100.0;
  double trim_low = 5.0;    // percentile
  double trim_high = 95.0;  // percentile
  int utc_offset_min = 0;
  double default_speed_kmh = 25.0;  // slots with no samples
};

struct TransitBuildResult {
  std::vector<TransitProfile> profiles;  // only pairs with >= 1 observed slot
  std::map<std::string, double> observed_stay_mean;  // venue id -> minutes
  std::array<double, kSlotsPerDay> slot_speed_kmh{};  // estimated fallback speeds
  std::size_t stay_points = 0;
  std::size_t samples = 0;          // before trimming
  std::size_t observed_cells = 0;   // (pair, slot) cells with surviving samples
};

// Mines transit samples from matched consecutive stay points per vehicle,
// trims per-cell outliers by percentile band, and estimates per-slot fallback
// speeds from the surviving samples. Deterministic under reordering of
// vehicles or trace files.
TransitBuildResult build_transit_matrix(const std::vector<GpsPoint>& points,
                                        const std::vector<Venue>& venues,
                                        const TransitBuildParams& params);

// Linear-interpolation percentile of a sorted sample; p in [0, 100].
double percentile_sorted(std::span<const double> sorted, double p);

struct NetworkBuildParams {
  int top_k = 1000;
  int observation_days = 30;
  double smoothing = 1.0;
  TransitBuildParams transit;
};

struct NetworkBuildSummary {
  std::size_t venues_in = 0;
  std::size_t venues_kept = 0;
  std::size_t checkins_used = 0;
  std::size_t checkins_unknown_venue = 0;
  std::size_t stay_points = 0;
  std::size_t transit_samples = 0;
  std::size_t observed_cells = 0;
  double fallback_fraction = 1.0;  // share of all (pair, slot) cells without observations
};

struct NetworkBuildOutput {
  PoiNetwork network;
  std::vector<UserProfile> users;
  NetworkBuildSummary summary;
};

// Full ingest pipeline: rank venues by total check-ins (descending, ties by
// id), keep the top-K, build venue/user profiles and the transit matrix, and
// assemble the immutable network.
NetworkBuildOutput build_poi_network(std::vector<Venue> venue_meta,
                                     const std::vector<CheckinRecord>& checkins,
                                     const std::vector<GpsPoint>& trace_points,
                                     const NetworkBuildParams& params);

}  // namespace tripweaver

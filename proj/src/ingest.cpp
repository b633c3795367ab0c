#include "tripweaver/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <string_view>
#include <unordered_map>

#include "tripweaver/errors.hpp"

namespace tripweaver {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int64(std::string_view s, std::int64_t& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(std::string_view s, int& out) {
  std::int64_t v = 0;
  if (!parse_int64(s, v) || v < std::numeric_limits<int>::min() ||
      v > std::numeric_limits<int>::max()) {
    return false;
  }
  out = static_cast<int>(v);
  return true;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  return line;
}

// Shared CSV loop: checks the header, feeds each data row to `row_fn`
// (returning false marks the row malformed), and enforces the 50% rule.
template <typename RowFn>
std::size_t for_each_row(std::istream& in, std::string_view expected_header, RowFn&& row_fn) {
  std::string line;
  if (!std::getline(in, line)) {
    if (in.bad()) {
      throw IoError("unreadable input stream");
    }
    return 0;  // empty file
  }
  if (strip_cr(line) != expected_header) {
    throw FormatError("expected header '" + std::string(expected_header) + "', got '" + line +
                      "'");
  }

  std::size_t rows = 0;
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    const std::string_view row = strip_cr(line);
    if (row.empty()) {
      continue;
    }
    ++rows;
    if (!row_fn(row)) {
      ++skipped;
    }
  }
  if (in.bad()) {
    throw IoError("unreadable input stream");
  }
  if (skipped * 2 > rows) {
    throw FormatError("more than 50% malformed rows (" + std::to_string(skipped) + " of " +
                      std::to_string(rows) + ")");
  }
  return skipped;
}

int local_hour(std::int64_t timestamp, int utc_offset_min) {
  const std::int64_t local = timestamp + static_cast<std::int64_t>(utc_offset_min) * 60;
  const std::int64_t seconds_of_day = ((local % 86400) + 86400) % 86400;
  return static_cast<int>(seconds_of_day / 3600);
}

double mean_of_sorted(const std::vector<double>& sorted) {
  double sum = 0.0;
  for (double v : sorted) {
    sum += v;
  }
  return sum / static_cast<double>(sorted.size());
}

}  // namespace

ParseResult<CheckinRecord> parse_checkins(std::istream& in) {
  ParseResult<CheckinRecord> result;
  result.skipped = for_each_row(in, "user_id,venue_id,timestamp", [&](std::string_view row) {
    const auto fields = split_fields(row);
    CheckinRecord rec;
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        !parse_int64(fields[2], rec.timestamp) || rec.timestamp <= 0) {
      return false;
    }
    rec.user_id = std::string(fields[0]);
    rec.venue_id = std::string(fields[1]);
    result.records.push_back(std::move(rec));
    return true;
  });
  return result;
}

ParseResult<Venue> parse_venues(std::istream& in) {
  ParseResult<Venue> result;
  result.skipped = for_each_row(
      in, "venue_id,name,lat,lon,category,open_min,close_min,mean_stay",
      [&](std::string_view row) {
        const auto fields = split_fields(row);
        if (fields.size() != 8 || fields[0].empty()) {
          return false;
        }
        Venue v;
        v.id = std::string(fields[0]);
        v.name = std::string(fields[1]);
        v.category = std::string(fields[4]);
        if (!parse_double(fields[2], v.location.lat) || !parse_double(fields[3], v.location.lon) ||
            !parse_int(fields[5], v.open_min) || !parse_int(fields[6], v.close_min) ||
            !parse_double(fields[7], v.mean_stay)) {
          return false;
        }
        if (!valid_coordinates(v.location) || v.open_min < 0 || v.close_min > kMinutesPerDay ||
            v.open_min >= v.close_min || !(v.mean_stay > 0.0)) {
          return false;
        }
        result.records.push_back(std::move(v));
        return true;
      });
  return result;
}

ParseResult<GpsPoint> parse_traces(std::istream& in) {
  ParseResult<GpsPoint> result;
  result.skipped = for_each_row(in, "vehicle_id,timestamp,lat,lon", [&](std::string_view row) {
    const auto fields = split_fields(row);
    GpsPoint p;
    if (fields.size() != 4 || fields[0].empty() || !parse_int64(fields[1], p.timestamp) ||
        p.timestamp <= 0 || !parse_double(fields[2], p.location.lat) ||
        !parse_double(fields[3], p.location.lon) || !valid_coordinates(p.location)) {
      return false;
    }
    p.vehicle_id = std::string(fields[0]);
    result.records.push_back(std::move(p));
    return true;
  });
  return result;
}

std::size_t build_venue_profiles(std::vector<Venue>& venues,
                                 const std::vector<CheckinRecord>& records, int observation_days,
                                 int utc_offset_min) {
  if (observation_days <= 0) {
    throw DomainError("observation_days must be > 0");
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < venues.size(); ++i) {
    index.emplace(venues[i].id, i);
  }

  std::vector<std::size_t> counts(venues.size(), 0);
  std::vector<std::array<double, kSlotsPerDay>> hours(venues.size());
  for (auto& h : hours) {
    h.fill(0.0);
  }

  std::size_t unknown = 0;
  for (const CheckinRecord& rec : records) {
    auto it = index.find(rec.venue_id);
    if (it == index.end()) {
      ++unknown;
      continue;
    }
    ++counts[it->second];
    hours[it->second][local_hour(rec.timestamp, utc_offset_min)] += 1.0;
  }

  for (std::size_t i = 0; i < venues.size(); ++i) {
    venues[i].popularity = static_cast<double>(counts[i]) / observation_days;
    if (counts[i] == 0) {
      venues[i].visit_histogram.fill(0.0);
      continue;
    }
    const double total = static_cast<double>(counts[i]);
    for (int h = 0; h < kSlotsPerDay; ++h) {
      venues[i].visit_histogram[h] = hours[i][h] / total;
    }
  }
  return unknown;
}

std::vector<UserProfile> build_user_profiles(const std::vector<CheckinRecord>& records,
                                             const std::vector<Venue>& venues, double smoothing) {
  if (!(smoothing > 0.0)) {
    throw DomainError("smoothing must be > 0");
  }
  std::set<std::string> categories;
  std::unordered_map<std::string, const Venue*> by_id;
  for (const Venue& v : venues) {
    categories.insert(v.category);
    by_id.emplace(v.id, &v);
  }

  // user -> (category -> visit count), ordered for deterministic output
  std::map<std::string, std::map<std::string, std::size_t>> visits;
  std::map<std::string, std::set<std::string>> visited;
  for (const CheckinRecord& rec : records) {
    auto it = by_id.find(rec.venue_id);
    if (it == by_id.end()) {
      continue;
    }
    ++visits[rec.user_id][it->second->category];
    visited[rec.user_id].insert(rec.venue_id);
  }

  std::vector<UserProfile> users;
  users.reserve(visits.size());
  for (const auto& [user_id, per_category] : visits) {
    UserProfile profile;
    profile.user_id = user_id;
    profile.visited = visited[user_id];
    std::size_t total = 0;
    for (const auto& [category, count] : per_category) {
      total += count;
    }
    const double denom =
        static_cast<double>(total) + smoothing * static_cast<double>(categories.size());
    for (const std::string& category : categories) {
      auto it = per_category.find(category);
      const double count = it == per_category.end() ? 0.0 : static_cast<double>(it->second);
      profile.category_weights[category] = (count + smoothing) / denom;
    }
    users.push_back(std::move(profile));
  }
  return users;
}

std::vector<StayPoint> detect_stay_points(std::span<const GpsPoint> trace, double dist_threshold_m,
                                          double time_threshold_min) {
  if (dist_threshold_m <= 0.0 || time_threshold_min <= 0.0) {
    throw DomainError("stay-point thresholds must be > 0");
  }
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].timestamp < trace[i - 1].timestamp) {
      throw DomainError("trace points must be sorted by timestamp");
    }
    if (trace[i].vehicle_id != trace[0].vehicle_id) {
      throw DomainError("trace must contain a single vehicle");
    }
  }

  std::vector<StayPoint> stays;
  const double threshold_km = dist_threshold_m / 1000.0;
  const double threshold_s = time_threshold_min * 60.0;
  std::size_t i = 0;
  while (i < trace.size()) {
    std::size_t j = i + 1;
    while (j < trace.size() &&
           haversine_km(trace[i].location, trace[j].location) <= threshold_km) {
      ++j;
    }
    const double span_s = static_cast<double>(trace[j - 1].timestamp - trace[i].timestamp);
    if (span_s >= threshold_s) {
      StayPoint sp;
      sp.vehicle_id = trace[i].vehicle_id;
      sp.arrive = trace[i].timestamp;
      sp.depart = trace[j - 1].timestamp;
      double lat = 0.0;
      double lon = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        lat += trace[k].location.lat;
        lon += trace[k].location.lon;
      }
      const auto n = static_cast<double>(j - i);
      sp.centroid = LatLon{lat / n, lon / n};
      stays.push_back(std::move(sp));
      i = j;
    } else {
      ++i;
    }
  }
  return stays;
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw DomainError("percentile of empty sample");
  }
  if (sorted.size() == 1) {
    return sorted[0];
  }
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

TransitBuildResult build_transit_matrix(const std::vector<GpsPoint>& points,
                                        const std::vector<Venue>& venues,
                                        const TransitBuildParams& params) {
  if (params.snap_radius_m <= 0.0) {
    throw DomainError("snap_radius_m must be > 0");
  }

  TransitBuildResult result;
  result.slot_speed_kmh.fill(params.default_speed_kmh);

  std::unordered_map<std::string, const Venue*> by_id;
  for (const Venue& v : venues) {
    by_id.emplace(v.id, &v);
  }

  // Group points per vehicle, preserving file order within each vehicle.
  std::map<std::string, std::vector<GpsPoint>> per_vehicle;
  for (const GpsPoint& p : points) {
    per_vehicle[p.vehicle_id].push_back(p);
  }

  const double snap_km = params.snap_radius_m / 1000.0;
  auto nearest_venue = [&](const LatLon& c) -> const Venue* {
    const Venue* best = nullptr;
    double best_km = snap_km;
    for (const Venue& v : venues) {
      const double d = haversine_km(c, v.location);
      if (d < best_km || (d == best_km && best != nullptr && v.id < best->id)) {
        best = &v;
        best_km = d;
      } else if (d == best_km && best == nullptr) {
        best = &v;
      }
    }
    return best;
  };

  struct CellSamples {
    std::array<std::vector<double>, kSlotsPerDay> minutes;
  };
  std::map<std::pair<std::string, std::string>, CellSamples> cells;
  std::map<std::string, std::vector<double>> dwell_samples;
  std::array<std::vector<double>, kSlotsPerDay> speed_samples;

  for (auto& [vehicle_id, trace] : per_vehicle) {
    const std::vector<StayPoint> stays =
        detect_stay_points(trace, params.stay_dist_m, params.stay_min);
    result.stay_points += stays.size();

    // Matched subsequence of stay points; consecutive entries give samples.
    const Venue* prev_venue = nullptr;
    std::int64_t prev_depart = 0;
    for (const StayPoint& sp : stays) {
      const Venue* venue = nearest_venue(sp.centroid);
      if (venue == nullptr) {
        continue;
      }
      dwell_samples[venue->id].push_back(static_cast<double>(sp.depart - sp.arrive) / 60.0);
      if (prev_venue != nullptr && prev_venue->id != venue->id) {
        const double minutes = static_cast<double>(sp.arrive - prev_depart) / 60.0;
        if (minutes > 0.0) {
          const int slot = local_hour(prev_depart, params.utc_offset_min);
          cells[{prev_venue->id, venue->id}].minutes[slot].push_back(minutes);
          ++result.samples;
        }
      }
      prev_venue = venue;
      prev_depart = sp.depart;
    }
  }

  // Aggregate deterministically: values sorted before trimming and summing, so
  // the result does not depend on vehicle or file order.
  for (auto& [pair, cell] : cells) {
    const Venue& from = *by_id.at(pair.first);
    const Venue& to = *by_id.at(pair.second);
    const double dist_km = haversine_km(from.location, to.location);

    TransitProfile profile;
    profile.from_id = pair.first;
    profile.to_id = pair.second;
    bool any_observed = false;
    for (int s = 0; s < kSlotsPerDay; ++s) {
      std::vector<double>& samples = cell.minutes[s];
      if (samples.empty()) {
        continue;
      }
      std::sort(samples.begin(), samples.end());
      const double lo = percentile_sorted(samples, params.trim_low);
      const double hi = percentile_sorted(samples, params.trim_high);
      std::vector<double> kept;
      kept.reserve(samples.size());
      for (double v : samples) {
        if (v >= lo && v <= hi) {
          kept.push_back(v);
        }
      }
      if (kept.empty()) {
        continue;
      }
      profile.slot_minutes[s] = mean_of_sorted(kept);
      profile.slot_samples[s] = static_cast<int>(kept.size());
      profile.provenance[s] = SlotProvenance::Observed;
      any_observed = true;
      ++result.observed_cells;
      for (double minutes : kept) {
        speed_samples[s].push_back(dist_km / minutes * 60.0);
      }
    }
    if (any_observed) {
      result.profiles.push_back(std::move(profile));
    }
  }

  for (int s = 0; s < kSlotsPerDay; ++s) {
    if (!speed_samples[s].empty()) {
      std::sort(speed_samples[s].begin(), speed_samples[s].end());
      result.slot_speed_kmh[s] = mean_of_sorted(speed_samples[s]);
    }
  }

  // Fill the unobserved slots of stored profiles with the distance fallback so
  // serialized profiles are self-contained.
  for (TransitProfile& profile : result.profiles) {
    const Venue& from = *by_id.at(profile.from_id);
    const Venue& to = *by_id.at(profile.to_id);
    const double dist_km = haversine_km(from.location, to.location);
    for (int s = 0; s < kSlotsPerDay; ++s) {
      if (profile.provenance[s] == SlotProvenance::Observed) {
        continue;
      }
      profile.slot_minutes[s] = std::max(0.01, dist_km / result.slot_speed_kmh[s] * 60.0);
      profile.slot_samples[s] = 0;
    }
  }

  for (auto& [venue_id, samples] : dwell_samples) {
    std::sort(samples.begin(), samples.end());
    result.observed_stay_mean[venue_id] = mean_of_sorted(samples);
  }
  return result;
}

NetworkBuildOutput build_poi_network(std::vector<Venue> venue_meta,
                                     const std::vector<CheckinRecord>& checkins,
                                     const std::vector<GpsPoint>& trace_points,
                                     const NetworkBuildParams& params) {
  if (params.top_k <= 0) {
    throw DomainError("top_k must be > 0");
  }

  NetworkBuildSummary summary;
  summary.venues_in = venue_meta.size();

  std::unordered_map<std::string, std::size_t> counts;
  for (const Venue& v : venue_meta) {
    counts.emplace(v.id, 0);
  }
  for (const CheckinRecord& rec : checkins) {
    auto it = counts.find(rec.venue_id);
    if (it == counts.end()) {
      ++summary.checkins_unknown_venue;
    } else {
      ++it->second;
      ++summary.checkins_used;
    }
  }

  // Rank by total check-ins descending, ties by id ascending; keep the top K.
  std::sort(venue_meta.begin(), venue_meta.end(), [&](const Venue& a, const Venue& b) {
    const std::size_t ca = counts.at(a.id);
    const std::size_t cb = counts.at(b.id);
    if (ca != cb) {
      return ca > cb;
    }
    return a.id < b.id;
  });
  if (venue_meta.size() > static_cast<std::size_t>(params.top_k)) {
    venue_meta.resize(static_cast<std::size_t>(params.top_k));
  }
  summary.venues_kept = venue_meta.size();

  build_venue_profiles(venue_meta, checkins, params.observation_days, params.transit.utc_offset_min);
  std::vector<UserProfile> users = build_user_profiles(checkins, venue_meta, params.smoothing);

  TransitBuildResult transit = build_transit_matrix(trace_points, venue_meta, params.transit);
  summary.stay_points = transit.stay_points;
  summary.transit_samples = transit.samples;
  summary.observed_cells = transit.observed_cells;

  for (Venue& v : venue_meta) {
    auto it = transit.observed_stay_mean.find(v.id);
    if (it != transit.observed_stay_mean.end() && it->second > 0.0) {
      v.mean_stay = it->second;
    }
  }

  const std::size_t n = venue_meta.size();
  const std::size_t total_cells = n >= 2 ? n * (n - 1) * kSlotsPerDay : 0;
  summary.fallback_fraction =
      total_cells == 0
          ? 1.0
          : 1.0 - static_cast<double>(summary.observed_cells) / static_cast<double>(total_cells);

  PoiNetwork network(std::move(venue_meta), std::move(transit.profiles), transit.slot_speed_kmh);
  return NetworkBuildOutput{std::move(network), std::move(users), summary};
}

}  // namespace tripweaver

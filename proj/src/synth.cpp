#include "tripweaver/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "tripweaver/errors.hpp"
#include "tripweaver/rng.hpp"

namespace tripweaver {

namespace {

// 2023-01-01 00:00:00 UTC; midnight-aligned so hour-of-day falls out of the
// epoch arithmetic directly.
constexpr std::int64_t kBaseEpoch = 1672531200;

constexpr double kMetersPerDegreeLat = 111320.0;

struct CategorySpec {
  const char* name;
  double stay_min;
};

// Stays stay comfortably above the 20-minute stay-point threshold even after
// the generators' +-10% dwell jitter.
constexpr CategorySpec kCategories[] = {
    {"museum", 80.0},   {"park", 45.0},    {"gallery", 50.0}, {"landmark", 35.0},
    {"market", 45.0},   {"theater", 95.0}, {"cafe", 30.0},    {"restaurant", 60.0},
};
constexpr int kCategoryCount = static_cast<int>(std::size(kCategories));

std::string venue_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "V%04d", index);
  return buf;
}

void append_csv_point(std::string& out, const std::string& vehicle, std::int64_t ts,
                      const LatLon& p) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s,%lld,%.6f,%.6f\n", vehicle.c_str(),
                static_cast<long long>(ts), p.lat, p.lon);
  out += buf;
}

LatLon jitter(const LatLon& p, double noise_m, Rng& rng) {
  if (noise_m <= 0.0) {
    return p;
  }
  const double dlat = rng.gaussian(0.0, noise_m) / kMetersPerDegreeLat;
  const double dlon = rng.gaussian(0.0, noise_m) /
                      (kMetersPerDegreeLat * std::cos(p.lat * 3.14159265358979323846 / 180.0));
  return LatLon{p.lat + dlat, p.lon + dlon};
}

int hour_of(std::int64_t ts) {
  return static_cast<int>(((ts % 86400) + 86400) % 86400 / 3600);
}

// Discrete Gaussian (sigma = 1 hour) around the venue's true peak, restricted
// to hours with at least one open minute.
int draw_checkin_hour(const Venue& venue, int peak_hour, Rng& rng) {
  double weights[kSlotsPerDay] = {};
  double total = 0.0;
  for (int h = 0; h < kSlotsPerDay; ++h) {
    const int minute_lo = std::max(venue.open_min, h * 60);
    const int minute_hi = std::min(venue.close_min - 1, h * 60 + 59);
    if (minute_lo > minute_hi) {
      continue;
    }
    const double d = static_cast<double>(h - peak_hour);
    weights[h] = std::exp(-0.5 * d * d);
    total += weights[h];
  }
  double pick = rng.uniform01() * total;
  for (int h = 0; h < kSlotsPerDay; ++h) {
    pick -= weights[h];
    if (weights[h] > 0.0 && pick <= 0.0) {
      return h;
    }
  }
  for (int h = kSlotsPerDay - 1; h >= 0; --h) {
    if (weights[h] > 0.0) {
      return h;
    }
  }
  return peak_hour;
}

}  // namespace

const Venue& CityGroundTruth::venue(const std::string& id) const {
  for (const Venue& v : venues) {
    if (v.id == id) {
      return v;
    }
  }
  throw LookupError("unknown synthetic venue: " + id);
}

const GroundTruthVenue& CityGroundTruth::truth_for(const std::string& id) const {
  for (const GroundTruthVenue& t : truth) {
    if (t.id == id) {
      return t;
    }
  }
  throw LookupError("unknown synthetic venue: " + id);
}

double CityGroundTruth::true_transit(const std::string& from, const std::string& to,
                                     int slot) const {
  const double km = haversine_km(venue(from).location, venue(to).location);
  double minutes = km / params.base_speed_kmh * 60.0;
  if (std::find(params.rush_hours.begin(), params.rush_hours.end(), slot) !=
      params.rush_hours.end()) {
    minutes *= params.rush_multiplier;
  }
  return minutes;
}

CityGroundTruth generate_city(std::uint64_t seed, int n_venues, const CityParams& params) {
  if (n_venues < 2) {
    throw DomainError("generate_city requires n_venues >= 2");
  }

  CityGroundTruth city;
  city.seed = seed;
  city.params = params;
  Rng rng(Rng::mix(seed, 0x5c17));

  const double lat_span = params.bbox_max.lat - params.bbox_min.lat;
  const double lon_span = params.bbox_max.lon - params.bbox_min.lon;

  // Popularity prior: restaurant special first, airport last, the rest a
  // seeded shuffle of the remaining Zipf-ish ranks.
  std::vector<int> rank(static_cast<std::size_t>(n_venues), 0);
  {
    std::vector<int> middle(static_cast<std::size_t>(std::max(0, n_venues - 2)));
    std::iota(middle.begin(), middle.end(), 1);
    for (std::size_t i = middle.size(); i > 1; --i) {
      std::swap(middle[i - 1], middle[static_cast<std::size_t>(rng.uniform_int(
                                   0, static_cast<int>(i) - 1))]);
    }
    if (n_venues >= 2) {
      rank[1] = 0;                // restaurant special: most checked-in
      rank[0] = n_venues - 1;     // airport: least checked-in
      for (int i = 2; i < n_venues; ++i) {
        rank[static_cast<std::size_t>(i)] = middle[static_cast<std::size_t>(i - 2)];
      }
    }
  }

  for (int i = 0; i < n_venues; ++i) {
    Venue v;
    GroundTruthVenue t;
    v.id = venue_id(i);
    t.id = v.id;

    if (i == 0) {
      v.name = "Airport Plaza";
      v.category = "airport";
      v.location = LatLon{params.bbox_min.lat + 0.08 * lat_span,
                          params.bbox_min.lon + 0.08 * lon_span};
      v.open_min = 0;
      v.close_min = kMinutesPerDay;
      t.peak_hour = 9;
      t.mean_stay = 45.0;
    } else if (i == 1) {
      v.name = "Trattoria Mezzogiorno";
      v.category = "restaurant";
      v.location = LatLon{params.bbox_min.lat + 0.08 * lat_span + 0.012,
                          params.bbox_min.lon + 0.08 * lon_span + 0.010};
      v.open_min = 630;   // 10:30
      v.close_min = 930;  // 15:30
      t.peak_hour = 12;
      t.mean_stay = 60.0;
    } else {
      const CategorySpec& spec = kCategories[rng.uniform_int(0, kCategoryCount - 1)];
      v.category = spec.name;
      v.name = spec.name + std::string(" ") + std::to_string(i);
      v.name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v.name[0])));
      v.location = LatLon{params.bbox_min.lat + rng.uniform01() * lat_span,
                          params.bbox_min.lon + rng.uniform01() * lon_span};
      v.open_min = 15 * rng.uniform_int(24, 40);   // 06:00 .. 10:00
      v.close_min = 15 * rng.uniform_int(72, 92);  // 18:00 .. 23:00
      const int open_hour = (v.open_min + 59) / 60;
      const int close_hour = v.close_min / 60;
      t.peak_hour = rng.uniform_int(std::min(open_hour + 1, close_hour - 1),
                                    std::max(open_hour + 1, close_hour - 2));
      t.mean_stay = std::max(25.0, spec.stay_min * rng.uniform(0.8, 1.2));
      t.mean_stay = std::round(t.mean_stay * 10.0) / 10.0;
    }
    v.mean_stay = t.mean_stay;
    t.popularity_weight = 1.0 / std::pow(1.0 + rank[static_cast<std::size_t>(i)], 0.7);
    city.venues.push_back(std::move(v));
    city.truth.push_back(std::move(t));
  }

  // Hubs: the airport plus the venues nearest the far corners, so hub pairs
  // are several kilometres apart and transit samples concentrate on few cells.
  city.hub_ids.push_back(city.venues[0].id);
  const LatLon corners[] = {
      {params.bbox_max.lat - 0.05 * lat_span, params.bbox_max.lon - 0.05 * lon_span},  // NE
      {params.bbox_min.lat + 0.05 * lat_span, params.bbox_max.lon - 0.05 * lon_span},  // SE
      {params.bbox_max.lat - 0.05 * lat_span, params.bbox_min.lon + 0.05 * lon_span},  // NW
  };
  for (int h = 1; h < params.hub_count && h <= 3; ++h) {
    const LatLon& corner = corners[h - 1];
    const Venue* best = nullptr;
    double best_km = 1e18;
    for (std::size_t i = 2; i < city.venues.size(); ++i) {
      const Venue& v = city.venues[i];
      if (std::find(city.hub_ids.begin(), city.hub_ids.end(), v.id) != city.hub_ids.end()) {
        continue;
      }
      const double d = haversine_km(v.location, corner);
      if (d < best_km) {
        best_km = d;
        best = &v;
      }
    }
    if (best != nullptr) {
      city.hub_ids.push_back(best->id);
    }
  }

  return city;
}

std::string venues_csv(const CityGroundTruth& city) {
  std::string out = "venue_id,name,lat,lon,category,open_min,close_min,mean_stay\n";
  for (const Venue& v : city.venues) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%s,%d,%d,%.1f\n", v.id.c_str(),
                  v.name.c_str(), v.location.lat, v.location.lon, v.category.c_str(), v.open_min,
                  v.close_min, v.mean_stay);
    out += buf;
  }
  return out;
}

std::string ground_truth_json(const CityGroundTruth& city) {
  nlohmann::ordered_json doc;
  doc["seed"] = city.seed;
  doc["base_speed_kmh"] = city.params.base_speed_kmh;
  doc["rush_hours"] = city.params.rush_hours;
  doc["rush_multiplier"] = city.params.rush_multiplier;
  doc["bbox"] = {{"min", {city.params.bbox_min.lat, city.params.bbox_min.lon}},
                 {"max", {city.params.bbox_max.lat, city.params.bbox_max.lon}}};
  doc["hubs"] = city.hub_ids;
  auto venues = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < city.venues.size(); ++i) {
    const Venue& v = city.venues[i];
    const GroundTruthVenue& t = city.truth[i];
    venues.push_back({{"id", v.id},
                      {"location", {v.location.lat, v.location.lon}},
                      {"peak_hour", t.peak_hour},
                      {"mean_stay", t.mean_stay},
                      {"popularity_weight", t.popularity_weight}});
  }
  doc["venues"] = std::move(venues);
  return doc.dump(2) + "\n";
}

std::string generate_traces(const CityGroundTruth& city, const TraceParams& params,
                            std::uint64_t seed) {
  if (params.cadence_s <= 0) {
    throw DomainError("cadence_s must be > 0");
  }
  std::string out = "vehicle_id,timestamp,lat,lon\n";
  if (city.hub_ids.size() < 2) {
    return out;
  }
  const double duration_jitter = params.noise_m / 400.0;  // 0 noise -> exact durations

  for (int vi = 0; vi < params.n_vehicles; ++vi) {
    Rng rng(Rng::mix(seed, 1000003ULL + static_cast<std::uint64_t>(vi)));
    char vbuf[16];
    std::snprintf(vbuf, sizeof(vbuf), "T%04d", vi);
    const std::string vehicle = vbuf;

    std::size_t current = static_cast<std::size_t>(vi) % city.hub_ids.size();
    std::int64_t t = kBaseEpoch + static_cast<std::int64_t>(rng.uniform(5.5, 6.5) * 3600.0);

    auto emit_dwell = [&](const Venue& venue, std::int64_t from, std::int64_t until) {
      for (std::int64_t ts = from;; ts += params.cadence_s) {
        if (ts >= until) {
          append_csv_point(out, vehicle, until, jitter(venue.location, params.noise_m, rng));
          break;
        }
        append_csv_point(out, vehicle, ts, jitter(venue.location, params.noise_m, rng));
      }
    };

    for (int trip = 0; trip < params.trips_per_vehicle; ++trip) {
      const Venue& here = city.venue(city.hub_ids[current]);
      const double dwell_min =
          city.truth_for(here.id).mean_stay * rng.uniform(0.9, 1.1);
      const std::int64_t t_dep = t + static_cast<std::int64_t>(std::llround(dwell_min * 60.0));
      emit_dwell(here, t, t_dep);

      std::size_t next = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(city.hub_ids.size()) - 2));
      if (next >= current) {
        ++next;
      }
      const Venue& there = city.venue(city.hub_ids[next]);

      const int slot = hour_of(t_dep);
      double minutes = city.true_transit(here.id, there.id, slot);
      if (duration_jitter > 0.0) {
        minutes *= 1.0 + duration_jitter * rng.uniform(-1.0, 1.0);
      }
      const std::int64_t dur_s =
          std::max<std::int64_t>(60, static_cast<std::int64_t>(std::llround(minutes * 60.0)));
      const std::int64_t t_arr = t_dep + dur_s;

      // Drive points stop one cadence short of arrival so the trailing point
      // cannot seed the destination's stay run early.
      for (std::int64_t ts = t_dep + params.cadence_s; ts + params.cadence_s <= t_arr;
           ts += params.cadence_s) {
        const double frac = static_cast<double>(ts - t_dep) / static_cast<double>(dur_s);
        const LatLon p{here.location.lat + frac * (there.location.lat - here.location.lat),
                       here.location.lon + frac * (there.location.lon - here.location.lon)};
        append_csv_point(out, vehicle, ts, jitter(p, params.noise_m, rng));
      }

      t = t_arr;
      current = next;
    }

    // Closing dwell so the last trip's arrival side becomes a stay point.
    const Venue& last = city.venue(city.hub_ids[current]);
    const double dwell_min = city.truth_for(last.id).mean_stay * rng.uniform(0.9, 1.1);
    emit_dwell(last, t, t + static_cast<std::int64_t>(std::llround(dwell_min * 60.0)));
  }
  return out;
}

std::string generate_checkins(const CityGroundTruth& city, const CheckinParams& params,
                              std::uint64_t seed) {
  if (params.days <= 0) {
    throw DomainError("days must be > 0");
  }
  std::string out = "user_id,venue_id,timestamp\n";

  for (int ui = 0; ui < params.n_users; ++ui) {
    Rng rng(Rng::mix(seed, 2000003ULL + static_cast<std::uint64_t>(ui)));
    char ubuf[16];
    std::snprintf(ubuf, sizeof(ubuf), "u%04d", ui);
    const std::string user = ubuf;

    const std::string preferred = kCategories[rng.uniform_int(0, kCategoryCount - 1)].name;

    std::vector<double> cumulative(city.venues.size());
    double total = 0.0;
    for (std::size_t i = 0; i < city.venues.size(); ++i) {
      const Venue& v = city.venues[i];
      double w = city.truth[i].popularity_weight;
      if (v.category == preferred) {
        w *= 4.0;
      } else if (v.category == "airport") {
        w *= 0.05;
      }
      total += w;
      cumulative[i] = total;
    }

    for (int c = 0; c < params.checkins_per_user; ++c) {
      const double pick = rng.uniform01() * total;
      const std::size_t vi = static_cast<std::size_t>(
          std::lower_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
      const Venue& venue = city.venues[std::min(vi, city.venues.size() - 1)];

      const int day = rng.uniform_int(0, params.days - 1);
      const int hour = draw_checkin_hour(venue, city.truth_for(venue.id).peak_hour, rng);
      const int minute_lo = std::max(venue.open_min - hour * 60, 0);
      const int minute_hi = std::min(venue.close_min - 1 - hour * 60, 59);
      const int minute = rng.uniform_int(minute_lo, std::max(minute_lo, minute_hi));
      const int second = rng.uniform_int(0, 59);

      const std::int64_t ts = kBaseEpoch + static_cast<std::int64_t>(day) * 86400 +
                              hour * 3600 + minute * 60 + second;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s,%s,%lld\n", user.c_str(), venue.id.c_str(),
                    static_cast<long long>(ts));
      out += buf;
    }
  }
  return out;
}

}  // namespace tripweaver

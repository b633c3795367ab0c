#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "tripweaver/errors.hpp"
#include "tripweaver/ingest.hpp"

using namespace tripweaver;
using namespace tripweaver::test;

namespace {

std::vector<GpsPoint> stationary_trace(const std::string& vehicle, double lat, double lon,
                                       std::int64_t from, std::int64_t until,
                                       std::int64_t step = 60) {
  std::vector<GpsPoint> points;
  for (std::int64_t t = from; t <= until; t += step) {
    points.push_back(GpsPoint{vehicle, t, LatLon{lat, lon}});
  }
  return points;
}

}  // namespace

TEST_CASE("parse_checkins happy path and edge cases") {
  {
    std::istringstream in("user_id,venue_id,timestamp\nu1,V1,1300000000\n");
    const auto result = parse_checkins(in);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].user_id == "u1");
    CHECK(result.records[0].venue_id == "V1");
    CHECK(result.records[0].timestamp == 1300000000);
    CHECK(result.skipped == 0);
  }
  {
    std::istringstream in("");
    const auto result = parse_checkins(in);
    CHECK(result.records.empty());
    CHECK(result.skipped == 0);
  }
  {
    std::istringstream in("user_id,venue_id,timestamp\nu1,V1,1300000000\nbad row without commas\n");
    const auto result = parse_checkins(in);
    CHECK(result.records.size() == 1);
    CHECK(result.skipped == 1);
  }
  {
    // 2 of 3 rows malformed: over the 50% threshold.
    std::istringstream in("user_id,venue_id,timestamp\nu1,V1,1\nnope\nu1,V1,notanumber\n");
    CHECK_THROWS_AS(parse_checkins(in), FormatError);
  }
  {
    std::istringstream in("wrong,header\n");
    CHECK_THROWS_AS(parse_checkins(in), FormatError);
  }
}

TEST_CASE("parse_venues validates rows") {
  // 2 malformed of 4: at the 50% threshold, not over it.
  std::istringstream in(
      "venue_id,name,lat,lon,category,open_min,close_min,mean_stay\n"
      "V1,Museum of Things,37.5,-122.1,museum,540,1080,75\n"
      "V2,Bad Venue,99.0,-122.1,park,540,1080,75\n"
      "V3,Closed Before Open,37.5,-122.1,park,1080,540,75\n"
      "V4,Garden,37.6,-122.2,park,480,1200,45\n");
  const auto result = parse_venues(in);
  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].id == "V1");
  CHECK(result.records[0].open_min == 540);
  CHECK(result.skipped == 2);
}

TEST_CASE("parse_traces validates rows") {
  std::istringstream in(
      "vehicle_id,timestamp,lat,lon\n"
      "T1,1700000000,37.5,-122.1\n"
      "T1,1700000060,37.5,-200.0\n");
  const auto result = parse_traces(in);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].vehicle_id == "T1");
  CHECK(result.skipped == 1);
}

TEST_CASE("build_venue_profiles computes popularity and histogram") {
  std::vector<Venue> venues{make_venue("V1", 37.5, -122.1), make_venue("V2", 37.6, -122.2)};

  SUBCASE("10 check-ins over 5 days, all at 12:xx") {
    std::vector<CheckinRecord> records;
    for (int i = 0; i < 10; ++i) {
      // 12:00 UTC plus i minutes, spread over days.
      records.push_back({"u1", "V1", 86400LL * (i % 5) + 12 * 3600 + i * 60});
    }
    const std::size_t unknown = build_venue_profiles(venues, records, 5, 0);
    CHECK(unknown == 0);
    CHECK(venues[0].popularity == doctest::Approx(2.0));
    CHECK(venues[0].visit_histogram[12] == doctest::Approx(1.0));
    double sum = 0.0;
    for (double h : venues[0].visit_histogram) {
      sum += h;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // venue with no check-ins
    CHECK(venues[1].popularity == 0.0);
    for (double h : venues[1].visit_histogram) {
      CHECK(h == 0.0);
    }
  }

  SUBCASE("24 check-ins, one per hour, 1 day -> uniform histogram") {
    std::vector<CheckinRecord> records;
    for (int h = 0; h < 24; ++h) {
      records.push_back({"u1", "V1", static_cast<std::int64_t>(h) * 3600 + 60});
    }
    build_venue_profiles(venues, records, 1, 0);
    CHECK(venues[0].popularity == doctest::Approx(24.0));
    for (double h : venues[0].visit_histogram) {
      CHECK(h == doctest::Approx(1.0 / 24.0));
    }
  }

  SUBCASE("UTC offset shifts the local hour") {
    std::vector<CheckinRecord> records{{"u1", "V1", 12 * 3600}};
    build_venue_profiles(venues, records, 1, -8 * 60);  // 12:00 UTC -> 04:00 local
    CHECK(venues[0].visit_histogram[4] == doctest::Approx(1.0));
  }

  SUBCASE("unknown venue ids are counted and skipped") {
    std::vector<CheckinRecord> records{{"u1", "V1", 100}, {"u1", "V9", 100}};
    CHECK(build_venue_profiles(venues, records, 1, 0) == 1);
  }

  CHECK_THROWS_AS(build_venue_profiles(venues, {}, 0, 0), DomainError);
}

TEST_CASE("build_user_profiles smoothed weights") {
  std::vector<Venue> venues{make_venue("V1", 0, 0, "museum"), make_venue("V2", 0.1, 0, "museum"),
                            make_venue("V3", 0.2, 0, "park")};

  SUBCASE("3 museum visits, 1 park visit, smoothing 1") {
    std::vector<CheckinRecord> records{{"u1", "V1", 1},
                                       {"u1", "V2", 2},
                                       {"u1", "V1", 3},
                                       {"u1", "V3", 4}};
    const auto users = build_user_profiles(records, venues, 1.0);
    REQUIRE(users.size() == 1);
    CHECK(users[0].category_weights.at("museum") == doctest::Approx(4.0 / 6.0));
    CHECK(users[0].category_weights.at("park") == doctest::Approx(2.0 / 6.0));
    CHECK(users[0].visited == std::set<std::string>{"V1", "V2", "V3"});
  }

  SUBCASE("all visits one category, smoothing -> 0 pushes weight to 1") {
    std::vector<CheckinRecord> records{{"u1", "V1", 1}, {"u1", "V1", 2}, {"u1", "V2", 3}};
    const auto users = build_user_profiles(records, venues, 1e-12);
    REQUIRE(users.size() == 1);
    CHECK(users[0].category_weights.at("museum") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(users[0].category_weights.at("park") == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("weights always sum to one") {
    std::vector<CheckinRecord> records{{"u1", "V1", 1}, {"u2", "V3", 2}};
    for (const auto& user : build_user_profiles(records, venues, 0.7)) {
      double sum = 0.0;
      for (const auto& [c, w] : user.category_weights) {
        sum += w;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(build_user_profiles({}, venues, 0.0), DomainError);
}

TEST_CASE("detect_stay_points on constructed traces") {
  SUBCASE("stationary 30 minutes -> one stay point") {
    const auto trace = stationary_trace("T1", 37.5, -122.1, 1000, 1000 + 30 * 60);
    const auto stays = detect_stay_points(trace, 200.0, 20.0);
    REQUIRE(stays.size() == 1);
    CHECK(stays[0].arrive == 1000);
    CHECK(stays[0].depart == 1000 + 30 * 60);
    CHECK(stays[0].centroid.lat == doctest::Approx(37.5));
  }

  SUBCASE("moving 1 km per minute -> no stay points") {
    std::vector<GpsPoint> trace;
    for (int i = 0; i < 60; ++i) {
      // ~1 km per minute northward
      trace.push_back(GpsPoint{"T1", 1000 + i * 60, LatLon{37.0 + i * 0.009, -122.0}});
    }
    CHECK(detect_stay_points(trace, 200.0, 20.0).empty());
  }

  SUBCASE("two dwells separated by a drive -> two stay points") {
    std::vector<GpsPoint> trace = stationary_trace("T1", 37.50, -122.10, 0, 25 * 60);
    // 10-minute drive, 1 km/min
    for (int i = 1; i < 10; ++i) {
      trace.push_back(GpsPoint{"T1", 25 * 60 + i * 60, LatLon{37.50 + i * 0.009, -122.10}});
    }
    const auto second = stationary_trace("T1", 37.50 + 10 * 0.009, -122.10, 35 * 60, 60 * 60);
    trace.insert(trace.end(), second.begin(), second.end());

    const auto stays = detect_stay_points(trace, 200.0, 20.0);
    REQUIRE(stays.size() == 2);
    CHECK(stays[0].arrive == 0);
    CHECK(stays[0].depart == 25 * 60);
    CHECK(stays[1].arrive == 35 * 60);
    CHECK(stays[1].depart == 60 * 60);
  }

  SUBCASE("unsorted input is a domain error") {
    std::vector<GpsPoint> trace{{"T1", 100, LatLon{37.5, -122.1}},
                                {"T1", 50, LatLon{37.5, -122.1}}};
    CHECK_THROWS_AS(detect_stay_points(trace, 200.0, 20.0), DomainError);
  }
}

TEST_CASE("percentile with linear interpolation") {
  const std::vector<double> sample{10.0, 10.0, 10.0, 10.0, 100.0};
  CHECK(percentile_sorted(sample, 5.0) == doctest::Approx(10.0));
  CHECK(percentile_sorted(sample, 95.0) == doctest::Approx(82.0));
  CHECK(percentile_sorted(sample, 50.0) == doctest::Approx(10.0));
  const std::vector<double> one{42.0};
  CHECK(percentile_sorted(one, 5.0) == 42.0);
  CHECK(percentile_sorted(one, 95.0) == 42.0);
}

TEST_CASE("build_transit_matrix mines dwell-to-dwell samples") {
  // V1 and V2 about 10 km apart.
  std::vector<Venue> venues{make_venue("V1", 37.50, -122.10), make_venue("V2", 37.59, -122.10)};

  SUBCASE("single trip yields one sample in the departure slot") {
    // dwell at V1 06:45..07:10, drive 15 min, dwell at V2 07:25..07:50
    std::vector<GpsPoint> trace = stationary_trace("T1", 37.50, -122.10, 6 * 3600 + 45 * 60,
                                                   7 * 3600 + 10 * 60);
    const auto second = stationary_trace("T1", 37.59, -122.10, 7 * 3600 + 25 * 60,
                                         7 * 3600 + 50 * 60);
    trace.insert(trace.end(), second.begin(), second.end());

    TransitBuildParams params;
    const auto result = build_transit_matrix(trace, venues, params);
    REQUIRE(result.profiles.size() == 1);
    const TransitProfile& p = result.profiles[0];
    CHECK(p.from_id == "V1");
    CHECK(p.to_id == "V2");
    CHECK(p.provenance[7] == SlotProvenance::Observed);
    CHECK(p.slot_minutes[7] == doctest::Approx(15.0));
    CHECK(p.slot_samples[7] == 1);
    // dwell means recovered
    CHECK(result.observed_stay_mean.at("V1") == doctest::Approx(25.0));
  }

  SUBCASE("no traces -> no profiles, default speeds") {
    TransitBuildParams params;
    const auto result = build_transit_matrix({}, venues, params);
    CHECK(result.profiles.empty());
    for (double s : result.slot_speed_kmh) {
      CHECK(s == params.default_speed_kmh);
    }
  }

  SUBCASE("trim drops the outlier from {10,10,10,10,100}") {
    // Five vehicles, each one V1 -> V2 trip departing 06:25 (slot 6), with
    // trip gaps 10,10,10,10,100 minutes landing in the same cell-slot.
    std::vector<GpsPoint> trace;
    const double gaps[] = {10, 10, 10, 10, 100};
    for (int v = 0; v < 5; ++v) {
      const std::string id = "T" + std::to_string(v);
      const auto first = stationary_trace(id, 37.50, -122.10, 6 * 3600, 6 * 3600 + 25 * 60);
      trace.insert(trace.end(), first.begin(), first.end());
      const std::int64_t arrive = 6 * 3600 + 25 * 60 + static_cast<std::int64_t>(gaps[v] * 60);
      const auto second = stationary_trace(id, 37.59, -122.10, arrive, arrive + 25 * 60);
      trace.insert(trace.end(), second.begin(), second.end());
    }

    TransitBuildParams params;
    const auto result = build_transit_matrix(trace, venues, params);
    const TransitProfile* forward = nullptr;
    for (const auto& p : result.profiles) {
      if (p.from_id == "V1" && p.to_id == "V2") {
        forward = &p;
      }
    }
    REQUIRE(forward != nullptr);
    // The 100-minute outlier is discarded by the (5, 95) band.
    CHECK(forward->provenance[6] == SlotProvenance::Observed);
    CHECK(forward->slot_samples[6] == 4);
    CHECK(forward->slot_minutes[6] == doctest::Approx(10.0));
  }

  SUBCASE("snap radius must be positive") {
    TransitBuildParams params;
    params.snap_radius_m = 0.0;
    CHECK_THROWS_AS(build_transit_matrix({}, venues, params), DomainError);
  }
}

TEST_CASE("transit matrix is deterministic under input reordering") {
  std::vector<Venue> venues{make_venue("V1", 37.50, -122.10), make_venue("V2", 37.59, -122.10)};

  auto vehicle_trace = [&](const std::string& id, std::int64_t start, double gap_min) {
    std::vector<GpsPoint> trace = stationary_trace(id, 37.50, -122.10, start, start + 25 * 60);
    const std::int64_t arrive =
        start + 25 * 60 + static_cast<std::int64_t>(gap_min * 60);
    const auto second = stationary_trace(id, 37.59, -122.10, arrive, arrive + 25 * 60);
    trace.insert(trace.end(), second.begin(), second.end());
    return trace;
  };

  const auto a = vehicle_trace("TA", 6 * 3600, 12.0);
  const auto b = vehicle_trace("TB", 6 * 3600 + 300, 18.0);

  std::vector<GpsPoint> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  std::vector<GpsPoint> ba = b;
  ba.insert(ba.end(), a.begin(), a.end());

  TransitBuildParams params;
  const auto r1 = build_transit_matrix(ab, venues, params);
  const auto r2 = build_transit_matrix(ba, venues, params);
  REQUIRE(r1.profiles.size() == r2.profiles.size());
  for (std::size_t i = 0; i < r1.profiles.size(); ++i) {
    CHECK(r1.profiles[i].from_id == r2.profiles[i].from_id);
    for (int s = 0; s < kSlotsPerDay; ++s) {
      CHECK(r1.profiles[i].slot_minutes[s] == r2.profiles[i].slot_minutes[s]);
      CHECK(r1.profiles[i].slot_samples[s] == r2.profiles[i].slot_samples[s]);
    }
  }
  CHECK(r1.slot_speed_kmh == r2.slot_speed_kmh);
}

TEST_CASE("build_poi_network ranks by check-ins and keeps top K") {
  std::vector<Venue> venues;
  std::vector<CheckinRecord> checkins;
  for (int i = 0; i < 6; ++i) {
    venues.push_back(make_venue("V" + std::to_string(i), 37.5 + i * 0.01, -122.1));
    // venue i receives i check-ins
    for (int c = 0; c < i; ++c) {
      checkins.push_back({"u" + std::to_string(c), "V" + std::to_string(i),
                          static_cast<std::int64_t>(c + 1) * 3600});
    }
  }

  NetworkBuildParams params;
  params.top_k = 3;
  params.observation_days = 1;
  const auto output = build_poi_network(venues, checkins, {}, params);
  CHECK(output.summary.venues_kept == 3);
  // The three most checked-in venues are V5, V4, V3.
  CHECK(output.network.find_venue("V5") != nullptr);
  CHECK(output.network.find_venue("V4") != nullptr);
  CHECK(output.network.find_venue("V3") != nullptr);
  CHECK(output.network.find_venue("V2") == nullptr);
  CHECK(output.network.max_popularity() == doctest::Approx(5.0));
}

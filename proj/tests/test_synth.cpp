#include <doctest.h>

#include <sstream>

#include "tripweaver/errors.hpp"
#include "tripweaver/ingest.hpp"
#include "tripweaver/rng.hpp"
#include "tripweaver/synth.hpp"

using namespace tripweaver;

TEST_CASE("generate_city is deterministic and seed-sensitive") {
  const auto a = generate_city(42, 50);
  const auto b = generate_city(42, 50);
  const auto c = generate_city(43, 50);
  CHECK(venues_csv(a) == venues_csv(b));
  CHECK(ground_truth_json(a) == ground_truth_json(b));
  CHECK(venues_csv(a) != venues_csv(c));
}

TEST_CASE("generate_city bounds") {
  const auto city = generate_city(42, 2);
  CHECK(city.venues.size() == 2);
  CHECK_THROWS_AS(generate_city(42, 1), DomainError);
}

TEST_CASE("generated venue metadata parses back through the CSV reader") {
  const auto city = generate_city(42, 60);
  std::istringstream in(venues_csv(city));
  const auto parsed = parse_venues(in);
  CHECK(parsed.skipped == 0);
  REQUIRE(parsed.records.size() == 60);
  CHECK(parsed.records[0].id == "V0000");
  CHECK(parsed.records[0].category == "airport");
  CHECK(parsed.records[1].category == "restaurant");

  // Hubs are far apart so transit cells are well-separated in time.
  REQUIRE(city.hub_ids.size() == 3);
  for (std::size_t i = 0; i < city.hub_ids.size(); ++i) {
    for (std::size_t j = i + 1; j < city.hub_ids.size(); ++j) {
      const double km = haversine_km(city.venue(city.hub_ids[i]).location,
                                     city.venue(city.hub_ids[j]).location);
      CHECK(km > 4.0);
    }
  }
}

TEST_CASE("true_transit applies the rush multiplier exactly on rush slots") {
  const auto city = generate_city(7, 10);
  const std::string& a = city.hub_ids[0];
  const std::string& b = city.hub_ids[1];
  const double base = city.true_transit(a, b, 10);
  CHECK(city.true_transit(a, b, 7) == doctest::Approx(base * 2.0));
  CHECK(city.true_transit(a, b, 8) == doctest::Approx(base * 2.0));
  CHECK(city.true_transit(a, b, 9) == doctest::Approx(base));
  CHECK(base > 0.0);
}

TEST_CASE("generate_traces determinism and empty case") {
  const auto city = generate_city(42, 30);
  TraceParams params;
  params.n_vehicles = 3;
  params.trips_per_vehicle = 2;
  CHECK(generate_traces(city, params, 9) == generate_traces(city, params, 9));
  CHECK(generate_traces(city, params, 9) != generate_traces(city, params, 10));

  params.n_vehicles = 0;
  CHECK(generate_traces(city, params, 9) == "vehicle_id,timestamp,lat,lon\n");
}

TEST_CASE("noise-free single trip recovers the true transit exactly") {
  const auto city = generate_city(11, 20);
  TraceParams params;
  params.n_vehicles = 1;
  params.trips_per_vehicle = 1;
  params.noise_m = 0.0;

  std::istringstream in(generate_traces(city, params, 5));
  const auto parsed = parse_traces(in);
  REQUIRE(parsed.skipped == 0);
  REQUIRE_FALSE(parsed.records.empty());

  TransitBuildParams build;
  const auto result = build_transit_matrix(parsed.records, city.venues, build);
  REQUIRE(result.profiles.size() == 1);
  const TransitProfile& p = result.profiles[0];
  int observed_slot = -1;
  for (int s = 0; s < kSlotsPerDay; ++s) {
    if (p.provenance[s] == SlotProvenance::Observed) {
      observed_slot = s;
      CHECK(p.slot_samples[s] == 1);
      // Integer-second timestamps allow up to 1/60 min rounding.
      CHECK(p.slot_minutes[s] ==
            doctest::Approx(city.true_transit(p.from_id, p.to_id, s)).epsilon(0.001));
    }
  }
  CHECK(observed_slot >= 0);
}

TEST_CASE("generate_checkins determinism, bounds, and peak concentration") {
  const auto city = generate_city(42, 40);
  CheckinParams params;
  params.n_users = 50;
  params.checkins_per_user = 30;

  const std::string csv = generate_checkins(city, params, 3);
  CHECK(csv == generate_checkins(city, params, 3));

  CheckinParams none = params;
  none.n_users = 0;
  CHECK(generate_checkins(city, none, 3) == "user_id,venue_id,timestamp\n");

  std::istringstream in(csv);
  const auto parsed = parse_checkins(in);
  REQUIRE(parsed.skipped == 0);
  REQUIRE(parsed.records.size() == 50 * 30);

  std::size_t noon_venue_total = 0;
  std::size_t noon_venue_lunch = 0;
  for (const CheckinRecord& rec : parsed.records) {
    const Venue& venue = city.venue(rec.venue_id);
    const std::int64_t minute_of_day = ((rec.timestamp % 86400) + 86400) % 86400 / 60;
    CHECK(minute_of_day >= venue.open_min);
    CHECK(minute_of_day < venue.close_min);
    if (rec.venue_id == "V0001") {  // the noon-peaked restaurant
      ++noon_venue_total;
      const int hour = static_cast<int>(minute_of_day / 60);
      if (hour >= 11 && hour <= 13) {
        ++noon_venue_lunch;
      }
    }
  }
  REQUIRE(noon_venue_total >= 50);  // most popular venue by construction
  CHECK(static_cast<double>(noon_venue_lunch) >= 0.6 * static_cast<double>(noon_venue_total));
}

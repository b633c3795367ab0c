#include "tripweaver/json_io.hpp"

#include <fstream>
#include <sstream>

#include "tripweaver/errors.hpp"

namespace tripweaver {

namespace {

nlohmann::ordered_json location_json(const LatLon& p) {
  return nlohmann::ordered_json::array({p.lat, p.lon});
}

LatLon location_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw FormatError("location must be a [lat, lon] pair");
  }
  return LatLon{j[0].get<double>(), j[1].get<double>()};
}

template <typename T, std::size_t N>
std::array<T, N> fixed_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != N) {
    throw FormatError(std::string(what) + " must have exactly " + std::to_string(N) + " entries");
  }
  std::array<T, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = j[i].get<T>();
  }
  return out;
}

}  // namespace

nlohmann::ordered_json network_to_json(const PoiNetwork& network) {
  nlohmann::ordered_json doc;
  auto venues = nlohmann::ordered_json::array();
  for (const Venue& v : network.venues()) {
    venues.push_back({{"id", v.id},
                      {"name", v.name},
                      {"location", location_json(v.location)},
                      {"category", v.category},
                      {"popularity", v.popularity},
                      {"open_min", v.open_min},
                      {"close_min", v.close_min},
                      {"visit_histogram", v.visit_histogram},
                      {"mean_stay", v.mean_stay}});
  }
  doc["venues"] = std::move(venues);

  auto transit = nlohmann::ordered_json::array();
  for (const TransitProfile& p : network.transit_profiles()) {
    auto provenance = nlohmann::ordered_json::array();
    for (SlotProvenance s : p.provenance) {
      provenance.push_back(s == SlotProvenance::Observed ? "observed" : "fallback");
    }
    transit.push_back({{"from_id", p.from_id},
                       {"to_id", p.to_id},
                       {"slot_minutes", p.slot_minutes},
                       {"slot_samples", p.slot_samples},
                       {"provenance", std::move(provenance)}});
  }
  doc["transit"] = std::move(transit);
  doc["fallback_speed"] = network.fallback_speed();
  return doc;
}

PoiNetwork network_from_json(const nlohmann::json& doc) {
  try {
    std::vector<Venue> venues;
    for (const auto& j : doc.at("venues")) {
      Venue v;
      v.id = j.at("id").get<std::string>();
      v.name = j.at("name").get<std::string>();
      v.location = location_from(j.at("location"));
      v.category = j.at("category").get<std::string>();
      v.popularity = j.at("popularity").get<double>();
      v.open_min = j.at("open_min").get<int>();
      v.close_min = j.at("close_min").get<int>();
      v.visit_histogram = fixed_array<double, kSlotsPerDay>(j.at("visit_histogram"), "histogram");
      v.mean_stay = j.at("mean_stay").get<double>();
      venues.push_back(std::move(v));
    }

    std::vector<TransitProfile> transit;
    for (const auto& j : doc.at("transit")) {
      TransitProfile p;
      p.from_id = j.at("from_id").get<std::string>();
      p.to_id = j.at("to_id").get<std::string>();
      p.slot_minutes = fixed_array<double, kSlotsPerDay>(j.at("slot_minutes"), "slot_minutes");
      p.slot_samples = fixed_array<int, kSlotsPerDay>(j.at("slot_samples"), "slot_samples");
      const auto& prov = j.at("provenance");
      if (!prov.is_array() || prov.size() != kSlotsPerDay) {
        throw FormatError("provenance must have 24 entries");
      }
      for (int s = 0; s < kSlotsPerDay; ++s) {
        const std::string flag = prov[s].get<std::string>();
        if (flag == "observed") {
          p.provenance[s] = SlotProvenance::Observed;
        } else if (flag == "fallback") {
          p.provenance[s] = SlotProvenance::Fallback;
        } else {
          throw FormatError("unknown provenance flag: " + flag);
        }
      }
      transit.push_back(std::move(p));
    }

    const auto fallback =
        fixed_array<double, kSlotsPerDay>(doc.at("fallback_speed"), "fallback_speed");
    return PoiNetwork(std::move(venues), std::move(transit), fallback);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed network document: ") + e.what());
  }
}

nlohmann::ordered_json users_to_json(const std::vector<UserProfile>& users) {
  nlohmann::ordered_json doc;
  auto arr = nlohmann::ordered_json::array();
  for (const UserProfile& u : users) {
    arr.push_back({{"user_id", u.user_id},
                   {"category_weights", u.category_weights},
                   {"visited", u.visited}});
  }
  doc["users"] = std::move(arr);
  return doc;
}

std::vector<UserProfile> users_from_json(const nlohmann::json& doc) {
  try {
    std::vector<UserProfile> users;
    for (const auto& j : doc.at("users")) {
      UserProfile u;
      u.user_id = j.at("user_id").get<std::string>();
      for (const auto& [category, weight] : j.at("category_weights").items()) {
        u.category_weights[category] = weight.get<double>();
      }
      for (const auto& v : j.at("visited")) {
        u.visited.insert(v.get<std::string>());
      }
      validate_user_profile(u);
      users.push_back(std::move(u));
    }
    return users;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed users document: ") + e.what());
  }
}

nlohmann::ordered_json itinerary_to_json(const PlanResult& result, const Query& query,
                                         const UserProfile& user, const PoiNetwork& network,
                                         const ScoringParams& scoring_params) {
  nlohmann::ordered_json doc;
  doc["feasible"] = result.feasible;
  doc["query"] = {{"start_location", location_json(query.start_location)},
                  {"end_location", location_json(query.end_location)},
                  {"start_time", query.start_time},
                  {"end_time", query.end_time}};
  auto visits = nlohmann::ordered_json::array();
  for (const ScheduledVisit& visit : result.itinerary.visits) {
    const Venue& venue = network.venue(visit.venue_id);
    visits.push_back({{"venue_id", visit.venue_id},
                      {"name", venue.name},
                      {"arrival", visit.arrival},
                      {"wait", visit.wait},
                      {"visit_start", visit.visit_start},
                      {"depart", visit.depart},
                      {"attractiveness", attractiveness(user, venue, network, scoring_params)},
                      {"suitability", suitability(venue, visit.visit_start, visit.depart)}});
  }
  doc["visits"] = std::move(visits);
  doc["final_arrival"] = result.itinerary.final_arrival;
  doc["score"] = result.itinerary.score;
  doc["venue_count"] = result.itinerary.visits.size();
  return doc;
}

nlohmann::ordered_json itinerary_to_geojson(const PlanResult& result, const Query& query,
                                            const PoiNetwork& network) {
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  auto features = nlohmann::ordered_json::array();

  auto route = nlohmann::ordered_json::array();
  route.push_back({query.start_location.lon, query.start_location.lat});
  int order = 0;
  for (const ScheduledVisit& visit : result.itinerary.visits) {
    const Venue& venue = network.venue(visit.venue_id);
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "Point"}, {"coordinates", {venue.location.lon, venue.location.lat}}}},
         {"properties",
          {{"venue_id", venue.id},
           {"name", venue.name},
           {"order", order++},
           {"arrival", visit.arrival},
           {"depart", visit.depart}}}});
    route.push_back({venue.location.lon, venue.location.lat});
  }
  route.push_back({query.end_location.lon, query.end_location.lat});
  features.push_back({{"type", "Feature"},
                      {"geometry", {{"type", "LineString"}, {"coordinates", std::move(route)}}},
                      {"properties", {{"kind", "route"}}}});
  doc["features"] = std::move(features);
  return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open for reading: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failure: " + path.string());
  }
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out << content;
  out.flush();
  if (!out) {
    throw IoError("write failure: " + path.string());
  }
}

void save_network(const PoiNetwork& network, const std::filesystem::path& path) {
  write_text_file(path, network_to_json(network).dump(2) + "\n");
}

PoiNetwork load_network(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return network_from_json(doc);
}

}  // namespace tripweaver

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tripweaver/model.hpp"
#include "tripweaver/scoring.hpp"
#include "tripweaver/search.hpp"

namespace tripweaver {

// Canonical network document: {venues: [...], transit: [...], fallback_speed: [...]}.
nlohmann::ordered_json network_to_json(const PoiNetwork& network);
PoiNetwork network_from_json(const nlohmann::json& doc);

nlohmann::ordered_json users_to_json(const std::vector<UserProfile>& users);
std::vector<UserProfile> users_from_json(const nlohmann::json& doc);

nlohmann::ordered_json itinerary_to_json(const PlanResult& result, const Query& query,
                                         const UserProfile& user, const PoiNetwork& network,
                                         const ScoringParams& scoring_params);

// FeatureCollection: one Point per visit plus the route LineString.
nlohmann::ordered_json itinerary_to_geojson(const PlanResult& result, const Query& query,
                                            const PoiNetwork& network);

std::string read_text_file(const std::filesystem::path& path);   // throws IoError
void write_text_file(const std::filesystem::path& path, const std::string& content);

void save_network(const PoiNetwork& network, const std::filesystem::path& path);
PoiNetwork load_network(const std::filesystem::path& path);

}  // namespace tripweaver

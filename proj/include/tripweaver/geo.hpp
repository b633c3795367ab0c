#pragma once

namespace tripweaver {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

bool valid_coordinates(const LatLon& p);

// Great-circle distance on the mean Earth sphere (R = 6371 km).
double haversine_km(const LatLon& a, const LatLon& b);

}  // namespace tripweaver

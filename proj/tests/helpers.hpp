#pragma once

#include <array>
#include <string>
#include <vector>

#include "tripweaver/model.hpp"

namespace tripweaver::test {

inline Venue make_venue(std::string id, double lat, double lon, std::string category = "museum",
                        int open_min = 0, int close_min = kMinutesPerDay, double mean_stay = 60.0,
                        double popularity = 0.0) {
  Venue v;
  v.id = std::move(id);
  v.name = "venue " + v.id;
  v.location = LatLon{lat, lon};
  v.category = std::move(category);
  v.open_min = open_min;
  v.close_min = close_min;
  v.mean_stay = mean_stay;
  v.popularity = popularity;
  return v;
}

inline std::array<double, kSlotsPerDay> flat_speed(double kmh) {
  std::array<double, kSlotsPerDay> s{};
  s.fill(kmh);
  return s;
}

// Profile observed in every slot with a constant duration.
inline TransitProfile observed_profile(std::string from, std::string to, double minutes,
                                       int samples = 1) {
  TransitProfile p;
  p.from_id = std::move(from);
  p.to_id = std::move(to);
  p.slot_minutes.fill(minutes);
  p.slot_samples.fill(samples);
  p.provenance.fill(SlotProvenance::Observed);
  return p;
}

inline std::array<double, kSlotsPerDay> point_mass_histogram(int hour) {
  std::array<double, kSlotsPerDay> h{};
  h[hour] = 1.0;
  return h;
}

inline std::array<double, kSlotsPerDay> uniform_histogram() {
  std::array<double, kSlotsPerDay> h{};
  h.fill(1.0 / kSlotsPerDay);
  return h;
}

}  // namespace tripweaver::test

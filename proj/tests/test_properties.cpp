#include <doctest.h>

#include "properties.hpp"

using namespace tripweaver::test;

TEST_CASE("schedule invariants hold over randomized cases") {
  CHECK(prop_schedule_invariants(300, 1001) == 0);
}

TEST_CASE("suitability is scale-invariant") {
  CHECK(prop_suitability_scale_invariance(300, 1002) == 0);
}

TEST_CASE("attractiveness is monotone in popularity") {
  CHECK(prop_attractiveness_monotonicity(300, 1003) == 0);
}

TEST_CASE("nonempty visit histograms normalize to 1") {
  CHECK(prop_histogram_normalization(300, 1004) == 0);
}

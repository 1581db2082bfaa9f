#pragma once

#include <cstdint>

#include "billiards/report.hpp"

namespace billiards {

// Force, wall, reflection, independence and twin-run correspondences between the curved
// systems and their planar partners. Random states are drawn from seed.
Report verify_projective(std::uint64_t seed = 0);

// Orbit correspondences of the square map and the confocal image family.
Report verify_conformal();

}  // namespace billiards

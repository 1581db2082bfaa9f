#pragma once

#include <array>

#include "billiards/spaces.hpp"

namespace billiards {

// Mass factors of the two Kepler centers Z1 = (0, a), Z2 = (0, -a) and the Hooke
// strength of the term centered at the pole. For a plane m1, m2 are planar masses;
// for curved spaces they are the curved factors m-hat.
struct LagrangeParams {
    double m1 = 0.0;
    double m2 = 0.0;
    double f = 0.0;
    bool operator==(const LagrangeParams&) const = default;
};

struct EnergyPair {
    double e_native = 0.0;
    double e_partner = 0.0;
};

inline constexpr double kCenterGuard = 1e-9;

// m-hat / sqrt(1 + sign a^2).
double projected_mass(double mhat, double a, int sign);
// Parameters of the projectively paired system (m <-> m-hat, f unchanged).
LagrangeParams partner_params(const LagrangeParams& params, const SpaceSpec& space);

std::array<Eigen::Vector2d, 2> chart_centers(const SpaceSpec& space);
std::array<Eigen::Vector3d, 2> ambient_centers(const SpaceSpec& space);

Eigen::Vector2d force_plane(const Eigen::Vector2d& p, const LagrangeParams& params, const SpaceSpec& space);
AmbientVector force_curved(const AmbientPoint& q, const LagrangeParams& params, const SpaceSpec& space);

// m1 cot th1 + m2 cot th2 + f tan^2 th (coth, tanh^2 on the hyperboloid).
double force_function_curved(const AmbientPoint& q, const LagrangeParams& params, const SpaceSpec& space);

double energy_plane(const Eigen::Vector2d& p, const Eigen::Vector2d& v, const LagrangeParams& params,
                    const SpaceSpec& space);
double energy_curved(const AmbientPoint& q, const AmbientVector& v, const LagrangeParams& params,
                     const SpaceSpec& space);
// Curved energy written in the gnomonic chart; v is the chart velocity in the planar time.
double energy_curved_in_chart(const Eigen::Vector2d& p, const Eigen::Vector2d& v, const LagrangeParams& params,
                              const SpaceSpec& space);

EnergyPair energy_pair(const GnomonicPoint& p, const GnomonicVector& v, const LagrangeParams& params,
                       const SpaceSpec& space);
EnergyPair energy_pair(const AmbientPoint& q, const AmbientVector& v, const LagrangeParams& params,
                       const SpaceSpec& space);

// Planar Lagrange energy expressed in ambient sphere coordinates; defined off the
// equator on both hemispheres. params carry the curved factors m-hat.
double extended_integral_on_sphere(const AmbientPoint& q, const AmbientVector& v, const LagrangeParams& params,
                                   const SpaceSpec& space);

}  // namespace billiards

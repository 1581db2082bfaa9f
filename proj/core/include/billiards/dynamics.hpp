#pragma once

#include <optional>
#include <string>
#include <vector>

#include "billiards/conics.hpp"
#include "billiards/integrator.hpp"
#include "billiards/potentials.hpp"
#include "billiards/spaces.hpp"

namespace billiards {

// Position and velocity in a declared chart; t is the native time of the system.
template <Chart C>
struct State {
    ChartPoint<C> pos;
    TangentVector<C> vel;
    double t = 0.0;
};

using PlaneState = State<Chart::Gnomonic>;
using CurvedState = State<Chart::Ambient3>;

template <Chart C>
struct Sample {
    State<C> state;
    EnergyPair energies;
};

template <Chart C>
struct ReflectionEvent {
    double t = 0.0;
    ChartPoint<C> pos;
    TangentVector<C> v_in;
    TangentVector<C> v_out;
    TangentVector<C> normal;
    int wall_index = -1;
    EnergyPair before;
    EnergyPair after;
    bool grazing = false;
    // Landed within 1e-10 of two wall members.
    bool corner = false;
};

enum class Termination { TimeLimit, BounceLimit, Collision, SingularSet, DomainExit, NumericalFailure };
const char* to_string(Termination t);

template <Chart C>
struct TrajectoryRecord {
    SpaceSpec space;
    LagrangeParams params;
    std::vector<Sample<C>> samples;
    std::vector<ReflectionEvent<C>> events;
    Termination termination = Termination::TimeLimit;
    std::string detail;
};

using PlaneRecord = TrajectoryRecord<Chart::Gnomonic>;
using CurvedRecord = TrajectoryRecord<Chart::Ambient3>;

struct SimulationLimits {
    double t_max = 100.0;
    int bounce_max = 20;
    double sample_dt = 0.02;
};

// Result of one adaptive step: the accepted state and the step size to try next.
template <Chart C>
struct StepResult {
    State<C> state;
    double h_used = 0.0;
    double h_next = 0.0;
};

// One accepted adaptive step starting with trial size h. Throws SingularityError from the
// force and NumericalError on step-size underflow.
StepResult<Chart::Gnomonic> step(const PlaneState& s, const LagrangeParams& params, const SpaceSpec& space, double h,
                                 const IntegratorOptions& opt = IntegratorOptions::defaults());
StepResult<Chart::Ambient3> step(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space, double h,
                                 const IntegratorOptions& opt = IntegratorOptions::defaults());

// Single fixed step of size h with no error control (used to re-walk an accepted step).
PlaneState fixed_step(const PlaneState& s, const LagrangeParams& params, const SpaceSpec& space, double h);
CurvedState fixed_step(const CurvedState& s, const LagrangeParams& params, const SpaceSpec& space, double h);

template <Chart C>
struct Crossing {
    State<C> state;
    int member = -1;
    int iterations = 0;
};

// Given an accepted step from a to b, finds the first sign change of a wall member along it
// by re-integrating from a, refined until |implicit| < 1e-12. Empty when no member changes sign.
std::optional<Crossing<Chart::Gnomonic>> locate_crossing(const PlaneState& a, const PlaneState& b,
                                                         const WallSet& wall, const LagrangeParams& params,
                                                         const SpaceSpec& space);
std::optional<Crossing<Chart::Ambient3>> locate_crossing(const CurvedState& a, const CurvedState& b,
                                                         const WallSet& wall, const LagrangeParams& params,
                                                         const SpaceSpec& space);

struct Reflected {
    bool grazing = false;
};

// Elastic reflection: keeps the tangential component and flips the normal one in the space metric.
PlaneState reflect(const PlaneState& on_wall, const ConicSpec& member, const SpaceSpec& space,
                   Reflected* info = nullptr);
CurvedState reflect(const CurvedState& on_wall, const ConicSpec& member, const SpaceSpec& space,
                    Reflected* info = nullptr);

PlaneRecord simulate(const PlaneState& init, const LagrangeParams& params, const SpaceSpec& space,
                     const WallSet& wall, const SimulationLimits& limits,
                     const IntegratorOptions& opt = IntegratorOptions::defaults());
CurvedRecord simulate(const CurvedState& init, const LagrangeParams& params, const SpaceSpec& space,
                      const WallSet& wall, const SimulationLimits& limits,
                      const IntegratorOptions& opt = IntegratorOptions::defaults());

}  // namespace billiards

#pragma once

#include <optional>
#include <vector>

#include "fita/data_org.hpp"
#include "fita/test_space.hpp"

namespace fita {

/// Intelligent Driver Model parameters. All strictly positive.
struct IdmParameters {
  double desired_speed = 15.0;     // v0, m/s
  double time_headway = 1.5;       // T, s
  double max_accel = 1.5;          // a_max, m/s^2
  double comfortable_decel = 2.5;  // b, m/s^2
  double min_gap = 2.0;            // s0, m
  double accel_exponent = 4.0;     // delta

  void validate() const;
};

struct SimulationParameters {
  double dt = 0.1;               // s
  int horizon_steps = 300;       // 30 s at the default dt
  double ttc_cap = 10.0;         // s
  double vehicle_length = 4.0;   // m
  double initial_speed_follower = 10.0;  // m/s
  double initial_speed_leader = 10.0;    // m/s
  int fault_sign_car_following = +1;
  int fault_sign_cut_in = -1;
  int cut_in_completion_step = 0;
  // Actuator envelope. Controller commands are clamped to
  // [-brake_limit, accel_limit]; the injected fault acts downstream of the
  // clamp (a forced actuation), so it is not bounded by it. The envelope is
  // kept below the maximum fault magnitude so a faulted vehicle can exceed
  // what its neighbour's controller is able to counteract.
  double brake_limit = 3.0;  // m/s^2
  double accel_limit = 3.0;  // m/s^2
  bool record_trajectory = false;

  void validate(int fault_time_steps) const;
};

struct TrajectoryStep {
  double gap = 0.0;  // bumper-to-bumper, m
  double v_follower = 0.0;
  double v_leader = 0.0;
};

struct EpisodeResult {
  bool collision = false;
  double collision_severity = 0.0;  // relative speed at impact (m/s), 0 if none
  double min_ttc = 0.0;             // s, capped at ttc_cap
  double safety_indicator = 0.0;    // x
  std::optional<std::vector<TrajectoryStep>> trajectory;
};

struct FaultSpec {
  double value = 0.0;      // m/s^2, >= 0
  int injection_step = 0;  // simulation step index
};

/// IDM car-following acceleration. Requires gap > 0 (collision must have
/// been detected by the caller first).
double idm_acceleration(double v, double v_lead, double gap, const IdmParameters& p);

/// gap / closing speed when the rear vehicle approaches the front one,
/// +infinity otherwise.
double instantaneous_ttc(double gap, double v_rear, double v_front);

/// Forward-Euler episode with an additive acceleration fault on the HAV
/// from injection_step to the end of the horizon. Deterministic.
EpisodeResult run_episode(const ConcreteScenario& scenario, const FaultSpec& fault,
                          const SimulationParameters& sim, const IdmParameters& idm);

/// Collision -> severity; otherwise -> -min_ttc. Critical iff result > 0.
double safety_indicator(const EpisodeResult& episode);

struct GroundTruth {
  SafetyMatrix matrix;        // folded I x M safety indicators, unshifted
  double wall_seconds = 0.0;  // full-space simulation time
};

/// One episode per (scenario, fault value, injection step) cell, folded.
GroundTruth simulate_full_space(const TestSpace& space, const SimulationParameters& sim,
                                const IdmParameters& idm);

}  // namespace fita

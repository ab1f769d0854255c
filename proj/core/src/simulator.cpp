#include "fita/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fita {
namespace {

double free_flow_acceleration(double v, const IdmParameters& p) {
  return p.max_accel * (1.0 - std::pow(v / p.desired_speed, p.accel_exponent));
}

double clamp_command(double accel, const SimulationParameters& sim) {
  return std::clamp(accel, -sim.brake_limit, sim.accel_limit);
}

}  // namespace

void IdmParameters::validate() const {
  if (!(desired_speed > 0.0)) throw std::invalid_argument("idm: desired_speed must be positive");
  if (!(time_headway > 0.0)) throw std::invalid_argument("idm: time_headway must be positive");
  if (!(max_accel > 0.0)) throw std::invalid_argument("idm: max_accel must be positive");
  if (!(comfortable_decel > 0.0)) {
    throw std::invalid_argument("idm: comfortable_decel must be positive");
  }
  if (!(min_gap > 0.0)) throw std::invalid_argument("idm: min_gap must be positive");
  if (!(accel_exponent > 0.0)) throw std::invalid_argument("idm: accel_exponent must be positive");
}

void SimulationParameters::validate(int fault_time_steps) const {
  if (!(dt > 0.0)) throw std::invalid_argument("simulation: dt must be positive");
  if (horizon_steps < fault_time_steps) {
    throw std::invalid_argument("simulation: horizon_steps (" + std::to_string(horizon_steps) +
                                ") must cover the fault grid's injection steps (" +
                                std::to_string(fault_time_steps) + ")");
  }
  if (!(ttc_cap > 0.0)) throw std::invalid_argument("simulation: ttc_cap must be positive");
  if (vehicle_length < 0.0) {
    throw std::invalid_argument("simulation: vehicle_length must be >= 0");
  }
  if (initial_speed_follower < 0.0 || initial_speed_leader < 0.0) {
    throw std::invalid_argument("simulation: initial speeds must be >= 0");
  }
  if (fault_sign_car_following != 1 && fault_sign_car_following != -1) {
    throw std::invalid_argument("simulation: fault_sign_car_following must be +1 or -1");
  }
  if (fault_sign_cut_in != 1 && fault_sign_cut_in != -1) {
    throw std::invalid_argument("simulation: fault_sign_cut_in must be +1 or -1");
  }
  if (cut_in_completion_step < 0 || cut_in_completion_step >= horizon_steps) {
    throw std::invalid_argument("simulation: cut_in_completion_step outside the horizon");
  }
  if (!(brake_limit > 0.0) || !(accel_limit > 0.0)) {
    throw std::invalid_argument("simulation: actuator limits must be positive");
  }
}

double idm_acceleration(double v, double v_lead, double gap, const IdmParameters& p) {
  if (!(gap > 0.0)) {
    throw std::domain_error("idm_acceleration: gap must be positive (vehicles in contact)");
  }
  const double desired_gap =
      p.min_gap + std::max(0.0, v * p.time_headway +
                                    v * (v - v_lead) / (2.0 * std::sqrt(p.max_accel *
                                                                        p.comfortable_decel)));
  const double ratio = desired_gap / gap;
  return p.max_accel *
         (1.0 - std::pow(v / p.desired_speed, p.accel_exponent) - ratio * ratio);
}

double instantaneous_ttc(double gap, double v_rear, double v_front) {
  const double closing = v_rear - v_front;
  if (closing <= 0.0) return std::numeric_limits<double>::infinity();
  return gap / closing;
}

EpisodeResult run_episode(const ConcreteScenario& scenario, const FaultSpec& fault,
                          const SimulationParameters& sim, const IdmParameters& idm) {
  if (fault.value < 0.0) throw std::invalid_argument("run_episode: fault value must be >= 0");
  if (fault.injection_step < 0 || fault.injection_step >= sim.horizon_steps) {
    throw std::out_of_range("run_episode: injection step " + std::to_string(fault.injection_step) +
                            " outside horizon of " + std::to_string(sim.horizon_steps));
  }
  const bool cut_in = scenario.kind == ScenarioKind::kCutIn;
  double gap = scenario.parameter_value - sim.vehicle_length;  // bumper to bumper
  if (!(gap > 0.0)) {
    throw std::invalid_argument("run_episode: initial distance " +
                                std::to_string(scenario.parameter_value) +
                                " m does not exceed the vehicle length");
  }
  // The rear vehicle is the follower in both maneuvers: the HAV itself when
  // car-following, the cut-off vehicle when the HAV merges in front.
  double v_rear = sim.initial_speed_follower;
  double v_front = sim.initial_speed_leader;
  const int fault_sign = cut_in ? sim.fault_sign_cut_in : sim.fault_sign_car_following;
  const int interaction_start = cut_in ? sim.cut_in_completion_step : 0;

  EpisodeResult episode;
  episode.min_ttc = sim.ttc_cap;
  if (sim.record_trajectory) episode.trajectory.emplace();

  const auto track_ttc = [&](int step) {
    if (step < fault.injection_step || step < interaction_start) return;
    episode.min_ttc = std::min(episode.min_ttc, instantaneous_ttc(gap, v_rear, v_front));
  };

  track_ttc(0);
  for (int step = 0; step < sim.horizon_steps && !episode.collision; ++step) {
    if (sim.record_trajectory) episode.trajectory->push_back({gap, v_rear, v_front});
    const bool interacting = step >= interaction_start;
    const bool faulted = step >= fault.injection_step;

    // Commanded accelerations pass through the actuator envelope; the
    // injected fault is a forced actuation downstream of it.
    double a_rear;
    double a_front;
    if (cut_in) {
      a_rear = clamp_command(
          interacting ? idm_acceleration(v_rear, v_front, gap, idm)
                      : free_flow_acceleration(v_rear, idm),
          sim);
      a_front = clamp_command(free_flow_acceleration(v_front, idm), sim);
      if (faulted) a_front += fault_sign * fault.value;
    } else {
      a_rear = clamp_command(idm_acceleration(v_rear, v_front, gap, idm), sim);
      if (faulted) a_rear += fault_sign * fault.value;
      a_front = 0.0;  // constant-speed leader
    }

    gap += (v_front - v_rear) * sim.dt;
    v_rear = std::max(0.0, v_rear + a_rear * sim.dt);
    v_front = std::max(0.0, v_front + a_front * sim.dt);

    if (step + 1 >= interaction_start && gap <= 0.0) {
      episode.collision = true;
      episode.collision_severity = std::max(0.0, v_rear - v_front);
      break;
    }
    track_ttc(step + 1);
  }

  if (sim.record_trajectory) episode.trajectory->push_back({gap, v_rear, v_front});
  episode.safety_indicator = episode.collision ? episode.collision_severity : -episode.min_ttc;
  return episode;
}

double safety_indicator(const EpisodeResult& episode) {
  return episode.collision ? episode.collision_severity : -episode.min_ttc;
}

GroundTruth simulate_full_space(const TestSpace& space, const SimulationParameters& sim,
                                const IdmParameters& idm) {
  idm.validate();
  sim.validate(space.fault_grid.time_step_count);

  const auto start = std::chrono::steady_clock::now();
  std::vector<CellValue> cells;
  cells.reserve(static_cast<std::size_t>(space.cell_count()));
  for (const ConcreteScenario& scenario : space.scenarios) {
    for (int i = 0; i < space.fault_grid.value_count; ++i) {
      for (int j = 0; j < space.fault_grid.time_step_count; ++j) {
        const auto [value, step] = space.fault_grid.at(i, j);
        EpisodeResult episode;
        try {
          episode = run_episode(scenario, {value, step}, sim, idm);
        } catch (const std::exception& error) {
          throw std::runtime_error("simulate_full_space: cell (scenario " +
                                   std::to_string(scenario.global_index) + ", value " +
                                   std::to_string(i) + ", step " + std::to_string(j) +
                                   "): " + error.what());
        }
        cells.push_back({scenario.global_index, i, j, episode.safety_indicator});
      }
    }
  }

  GroundTruth truth;
  truth.matrix = fold(cells, {space.fault_grid.value_count, space.fault_grid.time_step_count,
                              space.scenario_count()});
  truth.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return truth;
}

}  // namespace fita

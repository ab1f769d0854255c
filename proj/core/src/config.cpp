#include "fita/config.hpp"

#include <fstream>
#include <stdexcept>

namespace fita {
namespace {

using nlohmann::json;

json functional_to_json(const FunctionalScenario& functional) {
  return {{"id", functional.id},
          {"kind", to_string(functional.kind)},
          {"parameter_name", functional.parameter_name},
          {"parameter_min", functional.parameter_min},
          {"parameter_max", functional.parameter_max},
          {"parameter_step", functional.parameter_step}};
}

FunctionalScenario functional_from_json(const json& j) {
  FunctionalScenario functional;
  functional.id = j.at("id").get<int>();
  functional.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
  functional.parameter_name = j.value("parameter_name", functional.parameter_name);
  functional.parameter_min = j.at("parameter_min").get<double>();
  functional.parameter_max = j.at("parameter_max").get<double>();
  functional.parameter_step = j.at("parameter_step").get<double>();
  return functional;
}

}  // namespace

void EvaluationConfig::validate() const {
  if (rare_threshold < 0.0 || rare_threshold > 1.0) {
    throw std::invalid_argument("evaluation: rare_threshold must lie in [0, 1]");
  }
}

void ExperimentConfig::validate() const {
  if (space.functional_scenarios.empty()) {
    throw std::invalid_argument("space: at least one functional scenario is required");
  }
  for (const FunctionalScenario& functional : space.functional_scenarios) {
    functional.validate();
  }
  space.fault_grid.validate();
  idm.validate();
  simulation.validate(space.fault_grid.time_step_count);
  if (sampling.per_functional.size() != space.functional_scenarios.size()) {
    throw std::invalid_argument("sampling: one plan entry per functional scenario is required");
  }
  solver.validate();
  evaluation.validate();
  for (const std::string& name : baselines) {
    if (name != "knn" && name != "mean") {
      throw std::invalid_argument("baselines: unknown baseline \"" + name +
                                  "\" (expected knn or mean)");
    }
  }
  if (knn_k < 1) throw std::invalid_argument("baselines: knn_k must be >= 1");
  if (output_directory.empty()) throw std::invalid_argument("output_directory must be non-empty");
}

void ExperimentConfig::propagate_seed() {
  if (!sampling_seed_explicit) sampling.seed = seed;
  if (!solver_seed_explicit) solver.seed = seed;
}

ExperimentConfig default_config() {
  ExperimentConfig config;
  config.space.functional_scenarios = {
      {0, ScenarioKind::kCutIn, "initial distance", 5.0, 13.0, 1.0},
      {1, ScenarioKind::kCarFollowing, "initial distance", 16.0, 25.0, 1.0}};
  config.space.fault_grid = {0.0, 0.1, 50, 50};
  config.sampling.per_functional = {{2, 0.2}, {3, 0.1}};
  config.seed = 42;
  config.propagate_seed();
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  json space_json;
  for (const FunctionalScenario& functional : config.space.functional_scenarios) {
    space_json["functional_scenarios"].push_back(functional_to_json(functional));
  }
  space_json["fault_grid"] = {{"value_min", config.space.fault_grid.value_min},
                              {"value_step", config.space.fault_grid.value_step},
                              {"value_count", config.space.fault_grid.value_count},
                              {"time_step_count", config.space.fault_grid.time_step_count}};

  json sampling_json;
  for (const FunctionalSamplingPlan& plan : config.sampling.per_functional) {
    sampling_json["plans"].push_back(
        {{"tested_interval", plan.tested_interval}, {"tested_fraction", plan.tested_fraction}});
  }
  sampling_json["anchor_offset"] = config.sampling.anchor_offset;
  if (config.sampling_seed_explicit) sampling_json["seed"] = config.sampling.seed;

  json solver_json = {{"rank", config.solver.rank},
                      {"rho", config.solver.rho},
                      {"lambda1", config.solver.lambda1},
                      {"lambda2", config.solver.lambda2},
                      {"lambda3", config.solver.lambda3},
                      {"ar_order", config.solver.ar_order},
                      {"max_iters", config.solver.max_iters},
                      {"rel_tol", config.solver.rel_tol},
                      {"init_stddev", config.solver.init_stddev},
                      {"mask_cross_block_smoothness", config.solver.mask_cross_block_smoothness}};
  if (config.solver_seed_explicit) solver_json["seed"] = config.solver.seed;

  return json{
      {"seed", config.seed},
      {"output_directory", config.output_directory},
      {"space", space_json},
      {"idm",
       {{"desired_speed", config.idm.desired_speed},
        {"time_headway", config.idm.time_headway},
        {"max_accel", config.idm.max_accel},
        {"comfortable_decel", config.idm.comfortable_decel},
        {"min_gap", config.idm.min_gap},
        {"accel_exponent", config.idm.accel_exponent}}},
      {"simulation",
       {{"dt", config.simulation.dt},
        {"horizon_steps", config.simulation.horizon_steps},
        {"ttc_cap", config.simulation.ttc_cap},
        {"vehicle_length", config.simulation.vehicle_length},
        {"initial_speed_follower", config.simulation.initial_speed_follower},
        {"initial_speed_leader", config.simulation.initial_speed_leader},
        {"fault_sign_car_following", config.simulation.fault_sign_car_following},
        {"fault_sign_cut_in", config.simulation.fault_sign_cut_in},
        {"cut_in_completion_step", config.simulation.cut_in_completion_step},
        {"brake_limit", config.simulation.brake_limit},
        {"accel_limit", config.simulation.accel_limit}}},
      {"sampling", sampling_json},
      {"solver", solver_json},
      {"evaluation",
       {{"mode", to_string(config.evaluation.mode)},
        {"rare_threshold", config.evaluation.rare_threshold}}},
      {"baselines", config.baselines},
      {"knn_k", config.knn_k}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config = default_config();
  config.seed = j.value("seed", config.seed);
  config.output_directory = j.value("output_directory", config.output_directory);

  if (j.contains("space")) {
    const json& space_json = j.at("space");
    if (space_json.contains("functional_scenarios")) {
      config.space.functional_scenarios.clear();
      for (const json& entry : space_json.at("functional_scenarios")) {
        config.space.functional_scenarios.push_back(functional_from_json(entry));
      }
    }
    if (space_json.contains("fault_grid")) {
      const json& grid = space_json.at("fault_grid");
      config.space.fault_grid.value_min = grid.value("value_min", 0.0);
      config.space.fault_grid.value_step = grid.value("value_step", 0.1);
      config.space.fault_grid.value_count = grid.value("value_count", 1);
      config.space.fault_grid.time_step_count = grid.value("time_step_count", 1);
    }
  }
  if (j.contains("idm")) {
    const json& idm = j.at("idm");
    config.idm.desired_speed = idm.value("desired_speed", config.idm.desired_speed);
    config.idm.time_headway = idm.value("time_headway", config.idm.time_headway);
    config.idm.max_accel = idm.value("max_accel", config.idm.max_accel);
    config.idm.comfortable_decel = idm.value("comfortable_decel", config.idm.comfortable_decel);
    config.idm.min_gap = idm.value("min_gap", config.idm.min_gap);
    config.idm.accel_exponent = idm.value("accel_exponent", config.idm.accel_exponent);
  }
  if (j.contains("simulation")) {
    const json& sim = j.at("simulation");
    config.simulation.dt = sim.value("dt", config.simulation.dt);
    config.simulation.horizon_steps = sim.value("horizon_steps", config.simulation.horizon_steps);
    config.simulation.ttc_cap = sim.value("ttc_cap", config.simulation.ttc_cap);
    config.simulation.vehicle_length = sim.value("vehicle_length", config.simulation.vehicle_length);
    config.simulation.initial_speed_follower =
        sim.value("initial_speed_follower", config.simulation.initial_speed_follower);
    config.simulation.initial_speed_leader =
        sim.value("initial_speed_leader", config.simulation.initial_speed_leader);
    config.simulation.fault_sign_car_following =
        sim.value("fault_sign_car_following", config.simulation.fault_sign_car_following);
    config.simulation.fault_sign_cut_in =
        sim.value("fault_sign_cut_in", config.simulation.fault_sign_cut_in);
    config.simulation.cut_in_completion_step =
        sim.value("cut_in_completion_step", config.simulation.cut_in_completion_step);
    config.simulation.brake_limit = sim.value("brake_limit", config.simulation.brake_limit);
    config.simulation.accel_limit = sim.value("accel_limit", config.simulation.accel_limit);
  }
  if (j.contains("sampling")) {
    const json& sampling = j.at("sampling");
    if (sampling.contains("plans")) {
      config.sampling.per_functional.clear();
      for (const json& entry : sampling.at("plans")) {
        config.sampling.per_functional.push_back(
            {entry.value("tested_interval", 1), entry.value("tested_fraction", 1.0)});
      }
    }
    config.sampling.anchor_offset = sampling.value("anchor_offset", 0);
    if (sampling.contains("seed")) {
      config.sampling.seed = sampling.at("seed").get<std::uint64_t>();
      config.sampling_seed_explicit = true;
    }
  }
  if (j.contains("solver")) {
    const json& solver = j.at("solver");
    config.solver.rank = solver.value("rank", config.solver.rank);
    config.solver.rho = solver.value("rho", config.solver.rho);
    config.solver.lambda1 = solver.value("lambda1", config.solver.lambda1);
    config.solver.lambda2 = solver.value("lambda2", config.solver.lambda2);
    config.solver.lambda3 = solver.value("lambda3", config.solver.lambda3);
    config.solver.ar_order = solver.value("ar_order", config.solver.ar_order);
    config.solver.max_iters = solver.value("max_iters", config.solver.max_iters);
    config.solver.rel_tol = solver.value("rel_tol", config.solver.rel_tol);
    config.solver.init_stddev = solver.value("init_stddev", config.solver.init_stddev);
    config.solver.mask_cross_block_smoothness =
        solver.value("mask_cross_block_smoothness", config.solver.mask_cross_block_smoothness);
    if (solver.contains("seed")) {
      config.solver.seed = solver.at("seed").get<std::uint64_t>();
      config.solver_seed_explicit = true;
    }
  }
  if (j.contains("evaluation")) {
    const json& evaluation = j.at("evaluation");
    if (evaluation.contains("mode")) {
      config.evaluation.mode = eval_mode_from_string(evaluation.at("mode").get<std::string>());
    }
    config.evaluation.rare_threshold =
        evaluation.value("rare_threshold", config.evaluation.rare_threshold);
  }
  if (j.contains("baselines")) {
    config.baselines = j.at("baselines").get<std::vector<std::string>>();
  }
  config.knn_k = j.value("knn_k", config.knn_k);

  config.propagate_seed();
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream input(path);
  if (!input) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(input);
  } catch (const nlohmann::json::exception& error) {
    throw std::runtime_error("config " + path + ": " + error.what());
  }
  ExperimentConfig config;
  try {
    config = config_from_json(j);
    config.validate();
  } catch (const std::exception& error) {
    throw std::runtime_error("config " + path + ": " + error.what());
  }
  return config;
}

}  // namespace fita

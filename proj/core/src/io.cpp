#include "fita/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fita {
namespace {

using nlohmann::json;

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

json load_json(const std::string& path) {
  std::ifstream in = open_for_read(path);
  try {
    return json::parse(in);
  } catch (const json::exception& error) {
    throw std::runtime_error(path + ": " + error.what());
  }
}

void dump_json(const std::string& path, const json& j) {
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& text, const std::string& path, int line) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": cannot parse number \"" +
                             text + "\"");
  }
  return value;
}

int parse_int(const std::string& text, const std::string& path, int line) {
  int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": cannot parse integer \"" +
                             text + "\"");
  }
  return value;
}

json dims_to_json(const MatrixDims& dims) {
  return {{"value_count", dims.value_count},
          {"step_count", dims.step_count},
          {"scenario_count", dims.scenario_count}};
}

MatrixDims dims_from_json(const json& j) {
  return {j.at("value_count").get<int>(), j.at("step_count").get<int>(),
          j.at("scenario_count").get<int>()};
}

json factor_to_json(const Eigen::MatrixXd& factor) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(factor.size()));
  for (Eigen::Index r = 0; r < factor.rows(); ++r) {
    for (Eigen::Index c = 0; c < factor.cols(); ++c) data.push_back(factor(r, c));
  }
  return {{"rows", factor.rows()}, {"cols", factor.cols()}, {"data", data}};
}

Eigen::MatrixXd factor_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const std::vector<double> data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::runtime_error("factor payload size does not match its dimensions");
  }
  Eigen::MatrixXd factor(rows, cols);
  std::size_t next = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) factor(r, c) = data[next++];
  }
  return factor;
}

json metrics_block_to_json(const MetricsBlock& block) {
  return {{"cells", block.cell_count},
          {"mae", block.regression.mae},
          {"wmape", block.regression.wmape},
          {"wmape_defined", block.wmape_defined},
          {"precision", block.classification.precision},
          {"recall", block.classification.recall},
          {"f1", block.classification.f1},
          {"true_positives", block.classification.true_positives},
          {"false_positives", block.classification.false_positives},
          {"false_negatives", block.classification.false_negatives}};
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buffer, end);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

void write_cells_csv(const std::string& path, const SafetyMatrix& matrix) {
  std::ofstream out = open_for_write(path);
  out << "scenario_index,fault_value_index,injection_step_index,safety_indicator\n";
  for (const CellValue& cell : unfold(matrix)) {
    out << cell.scenario << ',' << cell.value_index << ',' << cell.step_index << ','
        << format_double(cell.value) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SafetyMatrix read_cells_csv(const std::string& path, const MatrixDims& dims) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "scenario_index,fault_value_index,injection_step_index,safety_indicator") {
    throw std::runtime_error(path + ":1: unexpected header \"" + line + "\"");
  }
  std::vector<CellValue> cells;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw std::runtime_error(path + ":" + std::to_string(line_number) +
                               ": expected 4 fields, got " + std::to_string(fields.size()));
    }
    cells.push_back({parse_int(fields[0], path, line_number),
                     parse_int(fields[1], path, line_number),
                     parse_int(fields[2], path, line_number),
                     parse_double(fields[3], path, line_number)});
  }
  try {
    return fold(cells, dims);
  } catch (const std::exception& error) {
    throw std::runtime_error(path + ": " + error.what());
  }
}

void write_ground_truth_meta(const std::string& path, const TestSpace& space,
                             const SimulationParameters& sim, const IdmParameters& idm,
                             double wall_seconds) {
  const json j = {
      {"dims", dims_to_json({space.fault_grid.value_count, space.fault_grid.time_step_count,
                             space.scenario_count()})},
      {"scenario_count", space.scenario_count()},
      {"cell_count", space.cell_count()},
      {"simulation",
       {{"dt", sim.dt},
        {"horizon_steps", sim.horizon_steps},
        {"ttc_cap", sim.ttc_cap},
        {"vehicle_length", sim.vehicle_length},
        {"initial_speed_follower", sim.initial_speed_follower},
        {"initial_speed_leader", sim.initial_speed_leader},
        {"fault_sign_car_following", sim.fault_sign_car_following},
        {"fault_sign_cut_in", sim.fault_sign_cut_in},
        {"cut_in_completion_step", sim.cut_in_completion_step},
        {"brake_limit", sim.brake_limit},
        {"accel_limit", sim.accel_limit}}},
      {"idm",
       {{"desired_speed", idm.desired_speed},
        {"time_headway", idm.time_headway},
        {"max_accel", idm.max_accel},
        {"comfortable_decel", idm.comfortable_decel},
        {"min_gap", idm.min_gap},
        {"accel_exponent", idm.accel_exponent}}},
      {"wall_seconds", wall_seconds}};
  dump_json(path, j);
}

GroundTruthMeta read_ground_truth_meta(const std::string& path) {
  const json j = load_json(path);
  GroundTruthMeta meta;
  try {
    meta.dims = dims_from_json(j.at("dims"));
    meta.wall_seconds = j.value("wall_seconds", 0.0);
  } catch (const json::exception& error) {
    throw std::runtime_error(path + ": " + error.what());
  }
  return meta;
}

void write_mask_csv(const std::string& path, const SamplingMask& mask) {
  std::ofstream out = open_for_write(path);
  out << "row,col\n";
  for (const auto& [row, column] : mask.observed) out << row << ',' << column << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_mask_meta(const std::string& path, const SamplingPlan& plan,
                     const SamplingMask& mask) {
  json plans = json::array();
  for (const FunctionalSamplingPlan& family : plan.per_functional) {
    plans.push_back({{"tested_interval", family.tested_interval},
                     {"tested_fraction", family.tested_fraction}});
  }
  std::vector<int> tested(mask.scenario_tested.begin(), mask.scenario_tested.end());
  const json j = {{"dims", dims_to_json(mask.dims)},
                  {"plan",
                   {{"plans", plans},
                    {"anchor_offset", plan.anchor_offset},
                    {"seed", plan.seed}}},
                  {"scenario_tested", tested},
                  {"scenario_fraction", mask.scenario_fraction},
                  {"observed_count", mask.observed_count()}};
  dump_json(path, j);
}

SamplingMask read_mask(const std::string& csv_path, const std::string& meta_path) {
  const json meta = load_json(meta_path);
  SamplingMask mask;
  try {
    mask.dims = dims_from_json(meta.at("dims"));
    const std::vector<int> tested = meta.at("scenario_tested").get<std::vector<int>>();
    mask.scenario_tested.assign(tested.begin(), tested.end());
    mask.scenario_fraction = meta.at("scenario_fraction").get<std::vector<double>>();
  } catch (const json::exception& error) {
    throw std::runtime_error(meta_path + ": " + error.what());
  }

  std::ifstream in = open_for_read(csv_path);
  std::string line;
  if (!std::getline(in, line) || line != "row,col") {
    throw std::runtime_error(csv_path + ":1: unexpected header \"" + line + "\"");
  }
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw std::runtime_error(csv_path + ":" + std::to_string(line_number) +
                               ": expected 2 fields");
    }
    const int row = parse_int(fields[0], csv_path, line_number);
    const int column = parse_int(fields[1], csv_path, line_number);
    if (row < 0 || row >= mask.dims.rows() || column < 0 || column >= mask.dims.columns()) {
      throw std::runtime_error(csv_path + ":" + std::to_string(line_number) +
                               ": index outside the matrix");
    }
    mask.observed.emplace_back(row, column);
  }
  std::sort(mask.observed.begin(), mask.observed.end());
  return mask;
}

void write_model_json(const std::string& path, const SrmfModel& model) {
  json t_json = json::array();
  for (const Eigen::MatrixXd& t : model.state.t) t_json.push_back(factor_to_json(t));
  const json j = {{"dims", dims_to_json(model.dims)},
                  {"options",
                   {{"rank", model.options.rank},
                    {"rho", model.options.rho},
                    {"lambda1", model.options.lambda1},
                    {"lambda2", model.options.lambda2},
                    {"lambda3", model.options.lambda3},
                    {"ar_order", model.options.ar_order},
                    {"max_iters", model.options.max_iters},
                    {"rel_tol", model.options.rel_tol},
                    {"init_stddev", model.options.init_stddev},
                    {"seed", model.options.seed},
                    {"mask_cross_block_smoothness", model.options.mask_cross_block_smoothness},
                    {"scenario_groups", model.options.scenario_groups}}},
                  {"shift", model.shift},
                  {"w", factor_to_json(model.state.w)},
                  {"h", factor_to_json(model.state.h)},
                  {"t", t_json},
                  {"objective_trace", model.objective_trace},
                  {"iterations", model.iterations},
                  {"converged", model.converged}};
  dump_json(path, j);
}

SrmfModel read_model_json(const std::string& path) {
  const json j = load_json(path);
  SrmfModel model;
  try {
    model.dims = dims_from_json(j.at("dims"));
    const json& options = j.at("options");
    model.options.rank = options.at("rank").get<int>();
    model.options.rho = options.at("rho").get<double>();
    model.options.lambda1 = options.at("lambda1").get<double>();
    model.options.lambda2 = options.at("lambda2").get<double>();
    model.options.lambda3 = options.at("lambda3").get<double>();
    model.options.ar_order = options.at("ar_order").get<int>();
    model.options.max_iters = options.at("max_iters").get<int>();
    model.options.rel_tol = options.at("rel_tol").get<double>();
    model.options.init_stddev = options.at("init_stddev").get<double>();
    model.options.seed = options.at("seed").get<std::uint64_t>();
    model.options.mask_cross_block_smoothness =
        options.value("mask_cross_block_smoothness", false);
    model.options.scenario_groups =
        options.value("scenario_groups", std::vector<int>{});
    model.shift = j.at("shift").get<double>();
    model.state.w = factor_from_json(j.at("w"));
    model.state.h = factor_from_json(j.at("h"));
    for (const json& t : j.at("t")) model.state.t.push_back(factor_from_json(t));
    model.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    model.iterations = j.at("iterations").get<int>();
    model.converged = j.at("converged").get<bool>();
  } catch (const json::exception& error) {
    throw std::runtime_error(path + ": " + error.what());
  }
  return model;
}

void write_report_json(const std::string& path, const EvaluationReport& report) {
  json methods = json::array();
  for (const MethodReport& method : report.methods) {
    json scenarios = json::array();
    for (const ScenarioRow& row : method.scenarios) {
      scenarios.push_back({{"scenario_index", row.scenario_index},
                           {"functional_id", row.functional_id},
                           {"parameter_value", row.parameter_value},
                           {"tested", row.tested},
                           {"critical_rate", row.critical_rate},
                           {"rare", row.rare},
                           {"evaluated_cells", row.evaluated_cells},
                           {"metrics", metrics_block_to_json(row.metrics)}});
    }
    methods.push_back({{"method", method.method},
                       {"overall", metrics_block_to_json(method.overall)},
                       {"existing", metrics_block_to_json(method.existing)},
                       {"new", metrics_block_to_json(method.new_block)},
                       {"scenarios", scenarios}});
  }
  const json j = {{"mode", to_string(report.mode)},
                  {"rare_threshold", report.rare_threshold},
                  {"cells",
                   {{"total", report.total_cells},
                    {"observed", report.observed_cells},
                    {"evaluated", report.evaluated_cells}}},
                  {"methods", methods}};
  dump_json(path, j);
}

void write_report_text(const std::string& path, const EvaluationReport& report) {
  std::ofstream out = open_for_write(path);
  out << render_report_text(report);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_timing_json(const std::string& path, const TimingReport& timing) {
  const json j = {{"simulation_seconds", timing.simulation_seconds},
                  {"simulation_seconds_eval_cells", timing.simulation_seconds_eval_cells},
                  {"fit_seconds", timing.fit_seconds},
                  {"predict_seconds", timing.predict_seconds},
                  {"acceleration_rate", timing.acceleration_rate}};
  dump_json(path, j);
}

TimingReport read_timing_json(const std::string& path) {
  TimingReport timing;
  if (!std::filesystem::exists(path)) return timing;
  const json j = load_json(path);
  timing.simulation_seconds = j.value("simulation_seconds", 0.0);
  timing.simulation_seconds_eval_cells = j.value("simulation_seconds_eval_cells", 0.0);
  timing.fit_seconds = j.value("fit_seconds", 0.0);
  timing.predict_seconds = j.value("predict_seconds", 0.0);
  timing.acceleration_rate = j.value("acceleration_rate", 0.0);
  return timing;
}

void write_scenario_heatmaps(const std::string& directory, const TestSpace& space,
                             const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
  const MatrixDims dims{space.fault_grid.value_count, space.fault_grid.time_step_count,
                        space.scenario_count()};
  if (pred.rows() != dims.rows() || pred.cols() != dims.columns() ||
      truth.rows() != dims.rows() || truth.cols() != dims.columns()) {
    throw std::invalid_argument("write_scenario_heatmaps: matrix shapes do not match the space");
  }
  const auto write_grid = [&](const std::string& path, const Eigen::MatrixXd& values,
                              int scenario) {
    std::ofstream out = open_for_write(path);
    out << "fault_value_index";
    for (int j = 0; j < dims.step_count; ++j) out << ",step_" << j;
    out << '\n';
    for (int i = 0; i < dims.rows(); ++i) {
      out << i;
      for (int j = 0; j < dims.step_count; ++j) {
        out << ',' << format_double(values(i, dims.column_of(j, scenario)));
      }
      out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
  };
  for (int s = 0; s < dims.scenario_count; ++s) {
    const std::string prefix = directory + "/scenario_" + std::to_string(s) + "_";
    write_grid(prefix + "pred.csv", pred, s);
    write_grid(prefix + "truth.csv", truth, s);
  }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "parameter,value,mae,wmape,precision,f1\n";
  for (const SweepRow& row : rows) {
    out << row.parameter << ',' << format_double(row.value) << ',' << format_double(row.mae)
        << ',' << format_double(row.wmape) << ',' << format_double(row.precision) << ','
        << format_double(row.f1) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& directory, const std::string& command,
                    const std::vector<std::string>& artifacts) {
  const json j = {{"command", command}, {"artifacts", artifacts}, {"complete", true}};
  dump_json(directory + "/manifest.json", j);
}

}  // namespace fita

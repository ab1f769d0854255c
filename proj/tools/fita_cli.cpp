// Command-line harness: simulate | complete | evaluate | pipeline | sweep.
// Every stage reads/writes a shared artifact directory so the stages can be
// chained or run end to end; see README.md for the formats.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fita/config.hpp"
#include "fita/evaluation.hpp"
#include "fita/io.hpp"
#include "fita/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::int64_t> seed;
  std::optional<std::string> baselines_csv;
  std::optional<std::string> eval_mode;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> items;
  if (text.empty()) return items;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      items.push_back(text.substr(start));
      return items;
    }
    items.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
}

void add_common_options(CLI::App* command, CommonArgs& args, bool with_eval_flags) {
  command->add_option("--config", args.config_path, "experiment config JSON (default: built-in)");
  command->add_option("--out", args.out_dir, "artifact directory (overrides the config)");
  command->add_option("--seed", args.seed, "override the global seed");
  if (with_eval_flags) {
    command->add_option("--baseline", args.baselines_csv,
                        "comma-separated baselines to evaluate (knn,mean)");
    command->add_option("--eval-mode", args.eval_mode, "untested|all");
  }
}

fita::ExperimentConfig resolve_config(const CommonArgs& args) {
  fita::ExperimentConfig config =
      args.config_path.empty() ? fita::default_config() : fita::load_config(args.config_path);
  if (args.seed) {
    config.seed = static_cast<std::uint64_t>(*args.seed);
    config.propagate_seed();
  }
  if (args.out_dir.empty() == false) config.output_directory = args.out_dir;
  if (args.baselines_csv) config.baselines = split_csv(*args.baselines_csv);
  if (args.eval_mode) config.evaluation.mode = fita::eval_mode_from_string(*args.eval_mode);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fita: fault-injection testing acceleration toolkit"};
  app.require_subcommand(0, 1);
  bool print_default_config = false;
  app.add_flag("--print-default-config", print_default_config,
               "print the built-in experiment config as JSON and exit");

  CommonArgs simulate_args;
  CommonArgs complete_args;
  CommonArgs evaluate_args;
  CommonArgs pipeline_args;
  CommonArgs sweep_args;
  std::string sweep_param;
  std::string sweep_values_csv;

  CLI::App* simulate = app.add_subcommand("simulate", "run the full-space fault simulation");
  add_common_options(simulate, simulate_args, false);
  CLI::App* complete = app.add_subcommand(
      "complete", "sample the persisted ground truth and fit the completion model");
  add_common_options(complete, complete_args, false);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score the persisted prediction against the ground truth");
  add_common_options(evaluate, evaluate_args, true);
  CLI::App* pipeline = app.add_subcommand("pipeline", "simulate + complete + evaluate");
  add_common_options(pipeline, pipeline_args, true);
  CLI::App* sweep = app.add_subcommand("sweep", "re-fit across one hyperparameter's values");
  add_common_options(sweep, sweep_args, true);
  sweep->add_option("--sweep-param", sweep_param, "rank|lambda1|lambda2|lambda3")->required();
  sweep->add_option("--sweep-values", sweep_values_csv, "comma-separated values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_default_config) {
      std::cout << fita::config_to_json(fita::default_config()).dump(2) << "\n";
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 1;
    }

    if (simulate->parsed()) {
      const fita::ExperimentConfig config = resolve_config(simulate_args);
      const fita::SimulateResult result =
          fita::run_simulate_stage(config, config.output_directory);
      std::cout << "simulate: " << result.space.cell_count() << " cells -> "
                << config.output_directory << " (" << result.wall_seconds << " s)\n";
    } else if (complete->parsed()) {
      const fita::ExperimentConfig config = resolve_config(complete_args);
      const fita::CompleteResult result =
          fita::run_complete_stage(config, config.output_directory);
      std::cout << "complete: " << result.mask.observed_count() << " observed cells, "
                << result.model.iterations << " sweeps"
                << (result.model.converged ? " (converged)" : "") << " -> "
                << config.output_directory << "\n";
    } else if (evaluate->parsed()) {
      const fita::ExperimentConfig config = resolve_config(evaluate_args);
      const fita::EvaluationReport report =
          fita::run_evaluate_stage(config, config.output_directory);
      std::cout << fita::render_report_text(report);
    } else if (pipeline->parsed()) {
      const fita::ExperimentConfig config = resolve_config(pipeline_args);
      const fita::EvaluationReport report = fita::run_pipeline(config, config.output_directory);
      std::cout << fita::render_report_text(report);
    } else if (sweep->parsed()) {
      const fita::ExperimentConfig config = resolve_config(sweep_args);
      std::vector<double> values;
      for (const std::string& item : split_csv(sweep_values_csv)) {
        try {
          values.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw std::runtime_error("cannot parse sweep value \"" + item + "\"");
        }
      }
      const std::vector<fita::SweepRow> rows =
          fita::run_sweep(config, config.output_directory, sweep_param, values);
      std::cout << "sweep: " << rows.size() << " rows -> " << config.output_directory
                << "/sweep.csv\n";
    }
  } catch (const fita::StageError& error) {
    std::cerr << error.what() << "\n";
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "[cli] " << error.what() << "\n";
    return 1;
  }
  return 0;
}

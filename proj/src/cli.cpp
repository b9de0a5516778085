#include "gcnal/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>

#include "gcnal/datasets.hpp"
#include "gcnal/error.hpp"
#include "gcnal/report.hpp"

namespace gcnal {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const auto item = text.substr(start, pos == std::string::npos ? pos : pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string file_stem(const std::string& label) {
  std::string s;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') s += c;
    else if (!s.empty() && s.back() != '_') s += '_';
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

const char* metric_name(TaskKind task) {
  return task == TaskKind::kClassification ? "accuracy" : "mean squared error";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

std::vector<Curve> run_comparison(const ExperimentConfig& base,
                                  const std::vector<StrategyId>& strategies,
                                  const std::string& sweep_key,
                                  const std::vector<std::string>& sweep_values) {
  if (strategies.empty()) throw Error("no strategies given");
  std::vector<Curve> curves;
  const std::vector<std::string> values =
      sweep_key.empty() ? std::vector<std::string>{""} : sweep_values;
  if (!sweep_key.empty() && values.empty()) throw Error("sweep needs at least one value");
  for (StrategyId id : strategies) {
    for (const auto& value : values) {
      ExperimentConfig cfg = base;
      cfg.strategy = id;
      if (!sweep_key.empty()) cfg.set(sweep_key, value);
      cfg.validate();
      const PreparedExperiment exp = prepare_experiment(cfg);
      Curve c = run_experiment(exp.data.train, exp.data.test, exp.loop, exp.trainer);
      if (!sweep_key.empty()) c.label += "[" + sweep_key + "=" + value + "]";
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pool-based active learning with sequential GCN samplers", "gcnal"};
  app.require_subcommand(1);

  std::string config_path, out_dir, strategies_text, sweep_text;
  bool parallel = false;

  auto* run = app.add_subcommand("run", "run one strategy from a config file");
  run->add_option("--config", config_path, "experiment config (key = value)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_flag("--parallel-trials", parallel, "run trials on separate threads");

  auto* compare = app.add_subcommand("compare", "run several strategies under shared seeds");
  compare->add_option("--config", config_path, "experiment config (key = value)")->required();
  compare->add_option("--strategies", strategies_text, "comma-separated strategy ids")->required();
  compare->add_option("--out", out_dir, "output directory")->required();
  compare->add_option("--sweep", sweep_text, "KEY=V1,V2,... hyper-parameter sweep");
  compare->add_flag("--parallel-trials", parallel, "run trials on separate threads");

  std::string spec_text, data_out, test_out;
  std::uint64_t data_seed = 0;
  auto* gen = app.add_subcommand("gen-data", "write a generated dataset as CSV");
  gen->add_option("--spec", spec_text, "generator, e.g. blobs:classes=10,per_class=250")
      ->required();
  gen->add_option("--out", data_out, "CSV path for the train split")->required();
  gen->add_option("--test-out", test_out, "CSV path for the test split");
  gen->add_option("--seed", data_seed, "generator seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    err << '\n' << app.help();
    return 2;
  }

  try {
    if (run->parsed() || compare->parsed()) {
      ExperimentConfig cfg = load_config(config_path);
      cfg.parallel_trials = parallel;
      ensure_dir(out_dir);
      std::vector<Curve> curves;
      std::string y_label;
      if (run->parsed()) {
        curves = run_comparison(cfg, {cfg.strategy});
      } else {
        std::vector<StrategyId> ids;
        for (const auto& name : split_list(strategies_text)) {
          const auto id = parse_strategy(name);
          if (!id) throw Error("unknown strategy '" + name + "'");
          ids.push_back(*id);
        }
        std::string key;
        std::vector<std::string> values;
        if (!sweep_text.empty()) {
          const auto eq = sweep_text.find('=');
          if (eq == std::string::npos) throw Error("--sweep expects KEY=V1,V2,...");
          key = sweep_text.substr(0, eq);
          values = split_list(sweep_text.substr(eq + 1));
        }
        curves = run_comparison(cfg, ids, key, values);
      }
      y_label = metric_name(prepare_experiment(cfg).task);
      for (const auto& c : curves) {
        const fs::path csv = fs::path(out_dir) / (file_stem(c.label) + ".csv");
        write_curve_csv(c, csv);
        out << "wrote " << csv.string() << '\n';
      }
      const std::string stem = run->parsed() ? file_stem(curves.front().label) : "compare";
      if (compare->parsed()) {
        write_compare_csv(curves, fs::path(out_dir) / "compare.csv");
        out << "wrote " << (fs::path(out_dir) / "compare.csv").string() << '\n';
      }
      emit_plot(curves, fs::path(out_dir) / (stem + ".svg"), y_label);
      out << "wrote " << (fs::path(out_dir) / (stem + ".svg")).string() << '\n';
      return 0;
    }

    const DatasetSource src = DatasetSource::parse(spec_text);
    Rng rng = Rng(data_seed).derive("data");
    const DatasetSplit split = src.materialize(rng);
    write_dataset(split.train, data_out);
    out << "wrote " << data_out << " (" << split.train.size() << " rows)\n";
    if (!test_out.empty()) {
      write_dataset(split.test, test_out);
      out << "wrote " << test_out << " (" << split.test.size() << " rows)\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "gcnal: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace gcnal

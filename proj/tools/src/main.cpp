#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "hardattn/error.hpp"
#include "hardattn/model_io.hpp"
#include "hardattn/transformer.hpp"

using namespace hardattn;

namespace {

void emit(const std::vector<MetricRecord>& records, const std::string& out, const std::string& svg,
          bool svg_accuracy) {
  if (out.empty() || out == "-") {
    write_csv(std::cout, records);
  } else {
    cli::write_csv_file(out, records);
  }
  if (!svg.empty()) {
    std::ofstream f(svg, std::ios::trunc);
    if (!f) throw Error("cannot open " + svg + " for writing");
    cli::write_svg(f, records, svg_accuracy);
  }
}

struct ModelFlags {
  std::string task = "parity";
  std::string variant = "none";
  double eps = 1e-5;
  double c = 1.0;
  bool flawed = false;
  bool scaled = false;
  double eta = -1.0;

  void add(CLI::App* app) {
    app->add_option("--task", task, "parity or first")->check(CLI::IsMember({"parity", "first"}));
    app->add_option("--variant", variant, "none, ln_eps or ln_zero")
        ->check(CLI::IsMember({"none", "ln_eps", "ln_zero"}));
    app->add_option("--eps", eps, "epsilon for ln_eps");
    app->add_option("-c", c, "construction sharpness constant");
    app->add_flag("--flawed", flawed, "single-layer FIRST construction");
    app->add_flag("--scaled", scaled, "log-length attention scaling");
    app->add_option("--eta", eta, "amplifier target cross-entropy in nats");
  }

  cli::ExactModelOptions options() const {
    cli::ExactModelOptions o;
    o.task = parse_task(task);
    o.variant = cli::parse_variant(variant, eps);
    o.c = c;
    o.flawed = flawed;
    o.scaled = scaled;
    if (eta > 0.0) o.eta = eta;
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transformer encoders for PARITY and FIRST: exact constructions and training"};
  app.require_subcommand(1);

  std::string out, svg;
  bool svg_accuracy = false;
  std::uint64_t seed = 0;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", out, "CSV path (default stdout)");
    sub->add_option("--svg", svg, "also write a line chart");
    sub->add_flag("--svg-accuracy", svg_accuracy, "chart accuracy instead of cross-entropy");
    sub->add_option("--seed", seed, "random seed");
  };

  ModelFlags model;
  std::string lengths = "1..100";
  std::size_t samples = 1000;
  auto* eval = app.add_subcommand("eval-exact", "evaluate an exact construction per length");
  model.add(eval);
  eval->add_option("--lengths", lengths, "e.g. 1..100, 2..1000:2, 50,100");
  eval->add_option("--samples", samples, "random strings per length");
  add_output(eval);

  std::string sweep_lengths = "100";
  std::size_t sweep_samples = 1000;
  std::size_t grid_points = 201;
  auto* sweep = app.add_subcommand("sweep-param", "sensitivity of wrapped PARITY to one weight");
  sweep->add_option("--lengths", sweep_lengths, "string lengths");
  sweep->add_option("--samples", sweep_samples, "random strings per length");
  sweep->add_option("--points", grid_points, "grid points on [0.5, 1.5]")->check(CLI::Range(2, 100000));
  add_output(sweep);

  TrainConfig tc;
  std::string train_task = "first";
  bool train_scaled = false;
  std::string save_path;
  auto* train = app.add_subcommand("train", "train from random initialization");
  train->add_option("--task", train_task, "parity or first")->check(CLI::IsMember({"parity", "first"}));
  train->add_option("--train-n", tc.train_length, "training string length");
  train->add_option("--min-train-n", tc.min_train_length, "draw lengths uniformly from [min, train-n]");
  train->add_option("--test-n", tc.test_length, "test string length");
  train->add_option("--test-count", tc.test_count, "test strings");
  train->add_option("--epochs", tc.epochs, "epochs");
  train->add_option("--strings-per-epoch", tc.strings_per_epoch, "training strings per epoch");
  train->add_option("--runs", tc.runs, "independent runs (seeds seed, seed+1, ...)");
  train->add_option("--lr", tc.lr, "Adam learning rate");
  train->add_option("--eval-every", tc.eval_every, "evaluate every k epochs");
  train->add_flag("--scaled", train_scaled, "log-length attention scaling");
  train->add_option("--save-model", save_path, "write the first run's final weights");
  add_output(train);

  std::size_t grad_len = 8;
  auto* grad = app.add_subcommand("grad-check", "compare gradients with finite differences");
  grad->add_option("--seed", seed, "random seed");
  grad->add_option("--length", grad_len, "string length");

  ModelFlags build;
  std::string model_out;
  auto* build_cmd = app.add_subcommand("build-model", "write an exact construction to a model file");
  build.add(build_cmd);
  build_cmd->add_option("--out", model_out, "model path")->required();

  std::string model_in;
  std::vector<std::string> inputs;
  auto* classify_cmd = app.add_subcommand("classify", "classify bit strings with a model file");
  classify_cmd->add_option("--model", model_in, "model path")->required();
  classify_cmd->add_option("strings", inputs, "bit strings such as 0110")->required();

  std::string ds_task = "parity";
  std::size_t ds_len = 10, ds_count = 100;
  auto* dump = app.add_subcommand("dump-dataset", "print a labeled random dataset");
  dump->add_option("--task", ds_task, "parity or first")->check(CLI::IsMember({"parity", "first"}));
  dump->add_option("--length", ds_len, "string length");
  dump->add_option("--count", ds_count, "strings");
  dump->add_option("--seed", seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      cli::EvalExactOptions o;
      o.model = model.options();
      o.lengths = cli::parse_lengths(lengths);
      o.samples = samples;
      o.seed = seed;
      emit(cli::cmd_eval_exact(o), out, svg, svg_accuracy);
    } else if (*sweep) {
      cli::SweepOptions o;
      for (std::size_t i = 0; i < grid_points; ++i) {
        o.grid.push_back(0.5 + static_cast<double>(i) / static_cast<double>(grid_points - 1));
      }
      o.lengths = cli::parse_lengths(sweep_lengths);
      o.samples = sweep_samples;
      o.seed = seed;
      emit(cli::cmd_sweep_param(o), out, svg, svg_accuracy);
    } else if (*train) {
      tc.task = parse_task(train_task);
      tc.scaling = train_scaled ? AttnScaling::LogLength : AttnScaling::Standard;
      tc.seed = seed;
      const auto runs = train_runs(tc);
      emit(collect_records(runs), out, svg, svg_accuracy);
      if (!save_path.empty()) save_model(runs.front().params, save_path);
    } else if (*grad) {
      cli::GradCheckOptions o;
      o.seed = seed;
      o.string_length = grad_len;
      return cli::cmd_grad_check(o, std::cout) ? EXIT_SUCCESS : EXIT_FAILURE;
    } else if (*build_cmd) {
      save_model(cli::build_exact_model(build.options()), model_out);
    } else if (*classify_cmd) {
      const ModelParams params = load_model(model_in);
      for (const auto& s : inputs) {
        const Prediction p = classify(params, TokenSeq::parse(s));
        std::cout << s << '\t' << (p.accepted ? 1 : 0) << '\t' << format_double(p.logit) << '\n';
      }
    } else if (*dump) {
      RngStream rng(seed);
      write_dataset(std::cout, make_dataset(parse_task(ds_task), FixedLength{ds_len}, ds_count, rng));
    }
  } catch (const std::exception& e) {
    std::cerr << "hardattn: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}

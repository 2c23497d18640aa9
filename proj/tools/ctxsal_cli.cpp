// ctxsal: generate planted-saliency data, train toy classifiers, explain them
// with context-aware mask perturbation, and run removal experiments.
//
// Exit codes: 0 success, 2 usage error, 3 data/format error, 4 numeric failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctxsal/csv.hpp"
#include "ctxsal/dataset.hpp"
#include "ctxsal/error.hpp"
#include "ctxsal/evaluation.hpp"
#include "ctxsal/heatmap_svg.hpp"
#include "ctxsal/model.hpp"
#include "ctxsal/saliency.hpp"
#include "ctxsal/simd/kernels.hpp"
#include "ctxsal/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

void echo_config(const json& config) { std::cout << config.dump(2) << "\n"; }

// ---------------------------------------------------------------- gen-data

struct GenArgs {
  std::string out_dir;
  std::size_t channels = 32;
  std::size_t timesteps = 512;
  std::size_t classes = 2;
  std::size_t samples_per_class = 200;
  double test_fraction = 0.25;
  std::vector<std::size_t> planted;
  std::vector<std::size_t> window;
  std::string asym_pair;  // "a,b", "none", or empty for the default
  double amplitude = 2.0;
  double noise = 1.0;
  std::size_t carrier_period = 6;
  std::optional<std::size_t> active_count;
  std::optional<std::size_t> window_jitter;
  std::string preset = "channel";
  std::uint64_t seed = 0;
};

int run_gen_data(const GenArgs& a) {
  ctxsal::PlantSpec plant = a.preset == "timestep"
                                ? ctxsal::PlantSpec::timestep_benchmark(a.channels, a.timesteps)
                                : ctxsal::PlantSpec::channel_benchmark(a.channels, a.timesteps);
  if (!a.planted.empty()) {
    plant.planted_channels = a.planted;
    plant.asymmetry_pair.reset();
    plant.active_count = 0;
    if (a.planted.size() >= 2) plant.asymmetry_pair = std::make_pair(a.planted[0], a.planted[1]);
  }
  if (!a.window.empty()) {
    if (a.window.size() != 2) throw ctxsal::InvalidArgument("--window takes two values: start,end");
    plant.t_start = a.window[0];
    plant.t_end = a.window[1];
    plant.window_jitter = 0;
  }
  if (a.asym_pair == "none") {
    plant.asymmetry_pair.reset();
  } else if (!a.asym_pair.empty()) {
    const auto comma = a.asym_pair.find(',');
    if (comma == std::string::npos) throw ctxsal::InvalidArgument("--asym-pair takes a,b or none");
    plant.asymmetry_pair = std::make_pair(std::stoul(a.asym_pair.substr(0, comma)),
                                          std::stoul(a.asym_pair.substr(comma + 1)));
  }
  plant.pattern_amplitude = a.amplitude;
  plant.noise_std = a.noise;
  plant.carrier_period = a.carrier_period;
  if (a.active_count) plant.active_count = *a.active_count;
  if (a.window_jitter) plant.window_jitter = *a.window_jitter;

  ctxsal::GeneratorOptions opts;
  opts.channels = a.channels;
  opts.timesteps = a.timesteps;
  opts.num_classes = a.classes;
  opts.samples_per_class = a.samples_per_class;
  opts.test_fraction = a.test_fraction;
  opts.seed = a.seed;
  plant.validate(a.channels, a.timesteps);

  const fs::path manifest = fs::path(a.out_dir) / "manifest.json";
  json cfg{{"command", "gen-data"},
           {"out", manifest.string()},
           {"channels", a.channels},
           {"timesteps", a.timesteps},
           {"classes", a.classes},
           {"samples_per_class", a.samples_per_class},
           {"test_fraction", a.test_fraction},
           {"planted", plant.planted_channels},
           {"window", {plant.t_start, plant.t_end}},
           {"asym_pair", plant.asymmetry_pair ? json{plant.asymmetry_pair->first,
                                                     plant.asymmetry_pair->second}
                                              : json(nullptr)},
           {"amplitude", plant.pattern_amplitude},
           {"noise", plant.noise_std},
           {"carrier_period", plant.carrier_period},
           {"active_count", plant.active_count},
           {"window_jitter", plant.window_jitter},
           {"preset", a.preset},
           {"seed", a.seed}};
  echo_config(cfg);

  const auto data = ctxsal::generate_synthetic(plant, opts);
  ctxsal::save_manifest(data, manifest);
  std::cout << manifest.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string manifest;
  std::string out;
  std::string arch = "mlp";
  std::size_t epochs = 20;
  double lr = 0.01;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  ctxsal::ModelConfig model;
};

int run_train(TrainArgs a) {
  a.model.arch = ctxsal::parse_architecture(a.arch);
  json cfg{{"command", "train"},
           {"manifest", a.manifest},
           {"out", a.out},
           {"arch", a.arch},
           {"epochs", a.epochs},
           {"lr", a.lr},
           {"weight_decay", a.weight_decay},
           {"seed", a.seed},
           {"batch_size", ctxsal::kTrainBatchSize},
           {"hidden", a.model.hidden},
           {"filters", a.model.filters},
           {"kernel", a.model.kernel},
           {"group_size", a.model.group_size},
           {"pool", a.model.pool}};
  echo_config(cfg);

  const auto data = ctxsal::load_manifest(a.manifest);
  ctxsal::TrainOptions opts;
  opts.model = a.model;
  opts.epochs = a.epochs;
  opts.lr = a.lr;
  opts.weight_decay = a.weight_decay;
  opts.seed = a.seed;
  const auto result = ctxsal::train(data, opts);
  ctxsal::save_checkpoint(*result.model, a.out);
  json summary{{"checkpoint", a.out},
               {"parameters", result.model->parameters().size()},
               {"train_accuracy", result.train_accuracy},
               {"test_accuracy", result.test_accuracy},
               {"final_loss", result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back()}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- explain

struct ExplainArgs {
  std::string method = "context";
  ctxsal::ExplainConfig cfg;
};

void add_explain_options(CLI::App* cmd, ExplainArgs& e) {
  cmd->add_option("--method", e.method, "context | nocontext | gradient")
      ->check(CLI::IsMember({"context", "nocontext", "gradient"}))
      ->capture_default_str();
  cmd->add_flag("--area", e.cfg.area_enabled, "Enable the area-limitation term");
  cmd->add_option("--a", e.cfg.area_ratio, "Fraction of mask entries pushed toward 0")
      ->capture_default_str();
  cmd->add_option("--lambda", e.cfg.lambda, "Weight of the area term")->capture_default_str();
  cmd->add_option("--stage-switch", e.cfg.stage_switch, "Error-only epochs before the area term")
      ->capture_default_str();
  cmd->add_option("--epochs", e.cfg.epochs, "Mask optimization epochs")->capture_default_str();
  cmd->add_option("--lr", e.cfg.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--mask-init", e.cfg.mask_init, "Initial mask value")->capture_default_str();
  cmd->add_option("--temporal-kernel", e.cfg.temporal_kernel)->capture_default_str();
  cmd->add_option("--spatial-kernel", e.cfg.spatial_kernel)->capture_default_str();
  cmd->add_option("--seed", e.cfg.seed)->capture_default_str();
}

json explain_config_json(const ExplainArgs& e) {
  return {{"method", e.method},
          {"area", e.cfg.area_enabled},
          {"a", e.cfg.area_ratio},
          {"lambda", e.cfg.lambda},
          {"stage_switch", e.cfg.stage_switch},
          {"epochs", e.cfg.epochs},
          {"lr", e.cfg.lr},
          {"mask_init", e.cfg.mask_init},
          {"temporal_kernel", e.cfg.temporal_kernel},
          {"spatial_kernel", e.cfg.spatial_kernel},
          {"adam", {{"beta1", e.cfg.beta1}, {"beta2", e.cfg.beta2}, {"eps", e.cfg.adam_eps}}},
          {"seed", e.cfg.seed}};
}

struct ExplainCmdArgs {
  std::string model;
  std::string input;
  std::string manifest;
  std::size_t index = 0;
  std::string split = "test";
  std::string out;
  std::string svg;
  std::string trace;
  ExplainArgs explain;
};

int run_explain(const ExplainCmdArgs& a) {
  if (a.input.empty() == a.manifest.empty()) {
    throw ctxsal::InvalidArgument("explain: give exactly one of --input or --manifest");
  }
  const auto method = ctxsal::parse_method(a.explain.method);
  a.explain.cfg.validate();
  json cfg = explain_config_json(a.explain);
  cfg["command"] = "explain";
  cfg["model"] = a.model;
  cfg["input"] = a.input.empty() ? json(nullptr) : json(a.input);
  cfg["manifest"] = a.manifest.empty() ? json(nullptr) : json(a.manifest);
  cfg["index"] = a.index;
  cfg["split"] = a.split;
  cfg["out"] = a.out;
  cfg["svg"] = a.svg.empty() ? json(nullptr) : json(a.svg);
  cfg["trace"] = a.trace.empty() ? json(nullptr) : json(a.trace);
  cfg["simd"] = ctxsal::simd::active().name;
  echo_config(cfg);

  const auto model = ctxsal::load_checkpoint(a.model);
  std::optional<ctxsal::EegMatrix> x;
  if (!a.input.empty()) {
    x = ctxsal::read_matrix_csv(a.input);
  } else {
    const auto data = ctxsal::load_manifest(a.manifest);
    const auto subset =
        data.subset(a.split == "train" ? ctxsal::Split::kTrain : ctxsal::Split::kTest);
    if (a.index >= subset.size()) {
      throw ctxsal::InvalidArgument("--index " + std::to_string(a.index) + " out of range (" +
                                    std::to_string(subset.size()) + " samples)");
    }
    x = subset[a.index]->x;
  }

  std::optional<ctxsal::SaliencyMask> mask;
  if (method == ctxsal::Method::kGradient) {
    mask = ctxsal::gradient_saliency(*model, *x);
  } else {
    auto result = method == ctxsal::Method::kContext
                      ? ctxsal::explain_context(*model, *x, a.explain.cfg)
                      : ctxsal::explain_nocontext(*model, *x, a.explain.cfg);
    if (!a.trace.empty()) ctxsal::write_text_file(a.trace, result.trace.to_json());
    mask = std::move(result.mask);
  }
  ctxsal::write_matrix_csv(a.out, mask->matrix());
  if (!a.svg.empty()) {
    ctxsal::HeatmapOptions hopts;
    hopts.title = a.explain.method + " saliency";
    ctxsal::write_text_file(a.svg, ctxsal::render_heatmap_svg(*mask, hopts));
  }
  json summary{{"mask", a.out},
               {"predicted_class", model->predict(*x)},
               {"mean_mask", [&] {
                  double s = 0.0;
                  for (double v : mask->matrix().values()) s += v;
                  return s / static_cast<double>(mask->matrix().size());
                }()}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string model;
  std::string manifest;
  std::string mode = "channel";
  std::vector<std::size_t> k_list{0, 2, 4, 6};
  std::string selection = "top";
  bool group = false;
  std::size_t jobs = 1;
  std::size_t limit = 0;
  std::string out;
  std::string csv;
  ExplainArgs explain;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto method = ctxsal::parse_method(a.explain.method);
  a.explain.cfg.validate();
  ctxsal::ReductionOptions ropts;
  ropts.mode = ctxsal::parse_mode(a.mode);
  ropts.selection = a.selection == "bottom" ? ctxsal::Selection::kBottom : ctxsal::Selection::kTop;
  ropts.granularity = a.group ? ctxsal::Granularity::kGroup : ctxsal::Granularity::kInstance;
  ropts.k_list = a.k_list;

  json cfg = explain_config_json(a.explain);
  cfg["command"] = "evaluate";
  cfg["model"] = a.model;
  cfg["manifest"] = a.manifest;
  cfg["mode"] = a.mode;
  cfg["k_list"] = a.k_list;
  cfg["selection"] = a.selection;
  cfg["group"] = a.group;
  cfg["jobs"] = a.jobs;
  cfg["limit"] = a.limit;
  cfg["out"] = a.out.empty() ? json(nullptr) : json(a.out);
  cfg["csv"] = a.csv.empty() ? json(nullptr) : json(a.csv);
  cfg["simd"] = ctxsal::simd::active().name;
  echo_config(cfg);

  const auto model = ctxsal::load_checkpoint(a.model);
  const auto data = ctxsal::load_manifest(a.manifest);
  auto samples = data.subset(ctxsal::Split::kTest);
  if (a.limit > 0 && a.limit < samples.size()) samples.resize(a.limit);
  const auto masks = ctxsal::explain_all(*model, samples, method, a.explain.cfg, a.jobs);
  const auto report =
      ctxsal::run_reduction(*model, samples, masks, a.explain.method, ropts, data.plant);

  if (!a.out.empty()) ctxsal::write_text_file(a.out, report.to_json());
  if (!a.csv.empty()) ctxsal::write_text_file(a.csv, report.to_csv());
  std::cout << report.to_json();
  return 0;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
  std::string mask;
  std::string out;
  std::string title;
};

int run_render(const RenderArgs& a) {
  echo_config({{"command", "render"}, {"mask", a.mask}, {"out", a.out}, {"title", a.title}});
  const ctxsal::SaliencyMask mask(ctxsal::read_matrix_csv(a.mask));
  ctxsal::HeatmapOptions opts;
  opts.title = a.title;
  ctxsal::write_text_file(a.out, ctxsal::render_heatmap_svg(mask, opts));
  std::cout << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware perturbation saliency for time-series classifiers"};
  app.require_subcommand(1);
  std::string simd;
  auto* simd_opt = app.add_option("--simd", simd,
                                  "Kernel set: auto | scalar | avx2 | neon (default: $CTXSAL_SIMD or auto)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic planted-saliency dataset");
  gen_cmd->add_option("--out", gen.out_dir, "Output directory (manifest.json + samples/)")->required();
  gen_cmd->add_option("--channels", gen.channels)->capture_default_str();
  gen_cmd->add_option("--timesteps", gen.timesteps)->capture_default_str();
  gen_cmd->add_option("--classes", gen.classes)->capture_default_str();
  gen_cmd->add_option("--samples-per-class", gen.samples_per_class)->capture_default_str();
  gen_cmd->add_option("--test-fraction", gen.test_fraction)->capture_default_str();
  gen_cmd->add_option("--planted", gen.planted, "Planted channels, comma separated")->delimiter(',');
  gen_cmd->add_option("--window", gen.window, "Planted window start,end")->delimiter(',');
  gen_cmd->add_option("--asym-pair", gen.asym_pair, "Asymmetry pair a,b or none");
  gen_cmd->add_option("--amplitude", gen.amplitude)->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise)->capture_default_str();
  gen_cmd->add_option("--carrier-period", gen.carrier_period)->capture_default_str();
  gen_cmd->add_option("--active-count", gen.active_count,
                      "Planted channels carrying the burst in each sample (0 = all)");
  gen_cmd->add_option("--window-jitter", gen.window_jitter,
                      "Maximum per-sample right shift of the window");
  gen_cmd->add_option("--preset", gen.preset, "Plant layout the other flags start from")
      ->check(CLI::IsMember({"channel", "timestep"}))
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a toy classifier on a manifest");
  train_cmd->add_option("--manifest", tr.manifest)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--arch", tr.arch)
      ->check(CLI::IsMember({"linear", "mlp", "convnet"}))
      ->capture_default_str();
  train_cmd->add_option("--epochs", tr.epochs)->capture_default_str();
  train_cmd->add_option("--lr", tr.lr)->capture_default_str();
  train_cmd->add_option("--weight-decay", tr.weight_decay, "L2 coefficient")->capture_default_str();
  train_cmd->add_option("--seed", tr.seed)->capture_default_str();
  train_cmd->add_option("--hidden", tr.model.hidden)->capture_default_str();
  train_cmd->add_option("--filters", tr.model.filters)->capture_default_str();
  train_cmd->add_option("--kernel", tr.model.kernel)->capture_default_str();
  train_cmd->add_option("--group-size", tr.model.group_size)->capture_default_str();
  train_cmd->add_option("--pool", tr.model.pool)->capture_default_str();

  ExplainCmdArgs ex;
  auto* explain_cmd = app.add_subcommand("explain", "Compute a saliency mask for one input");
  explain_cmd->add_option("--model", ex.model)->required()->check(CLI::ExistingFile);
  explain_cmd->add_option("--input", ex.input, "Sample CSV")->check(CLI::ExistingFile);
  explain_cmd->add_option("--manifest", ex.manifest)->check(CLI::ExistingFile);
  explain_cmd->add_option("--index", ex.index, "Sample index within --split")->capture_default_str();
  explain_cmd->add_option("--split", ex.split)
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  explain_cmd->add_option("--out", ex.out, "Mask CSV path")->required();
  explain_cmd->add_option("--svg", ex.svg, "Optional heatmap SVG path");
  explain_cmd->add_option("--trace", ex.trace, "Optional per-epoch loss trace (JSON)");
  add_explain_options(explain_cmd, ex.explain);

  EvaluateArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Channel / time-step removal experiment");
  eval_cmd->add_option("--model", ev.model)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--manifest", ev.manifest)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--mode", ev.mode)
      ->check(CLI::IsMember({"channel", "timestep"}))
      ->capture_default_str();
  eval_cmd->add_option("--k-list", ev.k_list)->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--selection", ev.selection)
      ->check(CLI::IsMember({"top", "bottom"}))
      ->capture_default_str();
  eval_cmd->add_flag("--group", ev.group, "Use one dataset-averaged mask");
  eval_cmd->add_option("--jobs", ev.jobs)->check(CLI::PositiveNumber)->capture_default_str();
  eval_cmd->add_option("--limit", ev.limit, "Use only the first N test samples (0 = all)")
      ->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Report JSON path");
  eval_cmd->add_option("--csv", ev.csv, "Report CSV path");
  add_explain_options(eval_cmd, ev.explain);

  RenderArgs rd;
  auto* render_cmd = app.add_subcommand("render", "Render a mask CSV as an SVG heatmap");
  render_cmd->add_option("--mask", rd.mask)->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--out", rd.out)->required();
  render_cmd->add_option("--title", rd.title);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simd_opt->count() > 0) ctxsal::simd::select(ctxsal::simd::parse_isa(simd));
    if (gen_cmd->parsed()) return run_gen_data(gen);
    if (train_cmd->parsed()) return run_train(tr);
    if (explain_cmd->parsed()) return run_explain(ex);
    if (eval_cmd->parsed()) return run_evaluate(ev);
    if (render_cmd->parsed()) return run_render(rd);
  } catch (const ctxsal::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ctxsal::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ctxsal::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::logic_error& e) {  // e.g. std::stoul on a malformed flag
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

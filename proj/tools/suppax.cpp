// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0
//
// suppax command-line front end.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
// Every subcommand accepts --config FILE (a JSON object keyed by long option
// names without dashes); explicitly passed flags take precedence.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "suppax/suppax.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace suppax;

namespace {

/// Collects option bindings so values from --config fill in whatever was not
/// given on the command line.
class Bindings {
 public:
  explicit Bindings(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON file with option values (flags win)");
  }

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + name, var, help)->capture_default_str();
    fillers_.push_back([opt, name, &var](const json& cfg) {
      if (opt->count() == 0 && cfg.contains(name)) var = cfg.at(name).get<T>();
    });
    names_.push_back(name);
    options_[name] = opt;
    return opt;
  }

  /// True when the option was passed on the command line or in --config.
  bool given(const std::string& name) const {
    auto it = options_.find(name);
    return (it != options_.end() && it->second->count() > 0) || config_keys_.count(name) > 0;
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + name, var, help);
    fillers_.push_back([opt, name, &var](const json& cfg) {
      if (opt->count() == 0 && cfg.contains(name)) var = cfg.at(name).get<bool>();
    });
    names_.push_back(name);
    return opt;
  }

  void apply() {
    if (config_path_.empty()) return;
    json cfg;
    try {
      cfg = json::parse(report::read_file(config_path_));
    } catch (const json::exception& e) {
      throw ConfigError("config '" + config_path_ + "': " + e.what());
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config '" + config_path_ + "' must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      if (std::find(names_.begin(), names_.end(), key) == names_.end())
        throw ConfigError("config: unknown key '" + key + "'");
      config_keys_.insert(key);
    }
    try {
      for (const auto& f : fillers_) f(cfg);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::vector<std::function<void(const json&)>> fillers_;
  std::vector<std::string> names_;
  std::map<std::string, CLI::Option*> options_;
  std::set<std::string> config_keys_;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::optional<FeatureKind> optional_feature(const std::string& s) {
  if (s.empty() || s == "none") return std::nullopt;
  return parse_feature(s);
}

InjectionSite parse_site(const std::string& s) {
  if (s == "input") return InjectionSite::input();
  const std::string prefix = "hidden:";
  if (s.rfind(prefix, 0) == 0) {
    try {
      const int k = std::stoi(s.substr(prefix.size()));
      if (k >= 1) return InjectionSite::after_hidden(static_cast<std::size_t>(k));
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("bad injection site '" + s + "' (expected input or hidden:K)");
}

/// The feature each dataset was built around.
FeatureKind canonical_feature(experiments::DatasetKind kind) {
  switch (kind) {
    case experiments::DatasetKind::type1: return FeatureKind::distance;
    case experiments::DatasetKind::type2: return FeatureKind::periodic;
    case experiments::DatasetKind::patch: return FeatureKind::landmark;
  }
  return FeatureKind::distance;
}

// ------------------------------------------------------------- gen-data

struct GenDataCmd {
  std::string type = "type1";
  std::size_t n = 100;
  double noise = 0.05;
  std::size_t stripes = 4;
  std::uint64_t seed = 1;
  std::string feature;
  std::string out_dir = ".";
  std::string output = "dataset.csv";

  void attach(CLI::App* sub, Bindings& b) {
    b.add("type", type, "dataset: type1, type2, patch or mixture8")
        ->check(CLI::IsMember({"type1", "type2", "patch", "mixture8"}));
    b.add("n", n, "samples per class (per mode for mixture8)");
    b.add("noise", noise, "noise level (mode std for mixture8)");
    b.add("stripes", stripes, "type2 stripe count");
    b.add("seed", seed, "generator seed");
    b.add("feature", feature, "attach a supplementary column: distance or periodic");
    b.add("out-dir", out_dir, "output directory");
    b.add("output", output, "CSV file name inside --out-dir");
    (void)sub;
  }

  int run(const Bindings&) const {
    Timer timer;
    if (n == 0) throw ConfigError("--n must be positive");
    LabeledDataset ds;
    if (type == "mixture8") {
      ds = gen_cond_mixture(8 * n, 8, 1.0, noise, seed);
    } else {
      experiments::DatasetSpec spec{experiments::parse_dataset_kind(type), n, noise, stripes, seed};
      ds = experiments::make_dataset(spec);
    }
    if (auto f = optional_feature(feature)) {
      if (!is_pointwise(*f)) throw ConfigError("--feature must be distance or periodic");
      if (ds.inputs.cols != 2) throw ConfigError("--feature needs 2-D inputs");
      ds = with_feature(std::move(ds), *f);
    }
    json cfg{{"command", "gen-data"}, {"type", type},   {"n", n},         {"noise", noise},
             {"stripes", stripes},    {"seed", seed},   {"feature", feature}};
    report::Manifest manifest("gen-data", cfg, seed);
    manifest.emit(out_dir, output, report::dataset_csv(ds, manifest.hash()));
    manifest.finish(out_dir, timer.seconds());
    std::printf("wrote %zu rows to %s\n", ds.size(), (fs::path(out_dir) / output).string().c_str());
    return 0;
  }
};

// ------------------------------------------------------------- compare

struct CompareCmd {
  std::string data = "type1";
  std::vector<std::string> models{"A", "B", "C"};
  std::string feature;
  std::size_t n = 100;
  double noise = 0.05;
  std::size_t stripes = 4;
  std::uint64_t data_seed = 1;
  std::uint64_t seed = 0;
  std::size_t hidden = 3;
  std::string site = "hidden:1";
  std::size_t runs = 100;
  std::size_t epochs = 2000;
  bool full_budget = false;
  std::string optimizer = "sgd";
  double lr = 1e-2;
  std::size_t batch_size = 0;
  std::string init = "normal";
  std::size_t record_every = 1;
  std::size_t threads = 0;
  std::string out_dir = ".";

  void attach(CLI::App*, Bindings& b) {
    b.add("data", data, "type1, type2 or patch; naming it also picks the feature B defaults to")
        ->check(CLI::IsMember({"type1", "type2", "patch"}));
    b.add("models", models, "comma-separated model kinds")->delimiter(',');
    b.add("feature", feature, "supplementary feature for model B: distance, periodic or landmark");
    b.add("n", n, "samples per class");
    b.add("noise", noise, "dataset noise");
    b.add("stripes", stripes, "type2 stripe count");
    b.add("data-seed", data_seed, "dataset seed");
    b.add("seed", seed, "master seed for weight initialization");
    b.add("hidden", hidden, "base hidden width H");
    b.add("site", site, "injection site: input or hidden:K");
    b.add("runs", runs, "runs per model");
    b.add("epochs", epochs, "epochs per run");
    b.flag("full-budget", full_budget, "use 1000 runs x 10000 epochs");
    b.add("optimizer", optimizer, "sgd or adam")->check(CLI::IsMember({"sgd", "adam"}));
    b.add("lr", lr, "learning rate");
    b.add("batch-size", batch_size, "mini-batch size (0 = full batch)");
    b.add("init", init, "normal or uniform He initialization")->check(CLI::IsMember({"normal", "uniform"}));
    b.add("record-every", record_every, "record the error every K epochs");
    b.add("threads", threads, "worker threads (0 = SUPPAX_THREADS or all cores)");
    b.add("out-dir", out_dir, "output directory");
  }

  int run(const Bindings& given) const {
    Timer timer;
    experiments::ExperimentConfig cfg;
    cfg.data = {experiments::parse_dataset_kind(data), n, noise, stripes, data_seed};
    cfg.models.clear();
    for (const auto& m : models) cfg.models.push_back(parse_model_kind(m));
    cfg.feature = optional_feature(feature);
    if (!cfg.feature && given.given("data")) cfg.feature = canonical_feature(cfg.data.kind);
    cfg.base_hidden = hidden;
    cfg.site = parse_site(site);
    cfg.runs = full_budget ? 1000 : runs;
    cfg.epochs = full_budget ? 10000 : epochs;
    cfg.optimizer = optimizer == "adam" ? OptimizerKind::adam : OptimizerKind::sgd;
    cfg.learning_rate = lr;
    cfg.batch_size = batch_size;
    cfg.init = init == "uniform" ? InitScheme::uniform_he : InitScheme::normal_he;
    cfg.master_seed = seed;
    cfg.record_every = record_every;
    cfg.threads = threads;
    cfg.validate();

    json jc{{"command", "compare"}, {"data", data},         {"models", models},
            {"feature", cfg.feature ? std::string(to_string(*cfg.feature)) : std::string("none")},
            {"n", n},               {"noise", noise},       {"stripes", stripes},      {"data_seed", data_seed},
            {"seed", seed},         {"hidden", hidden},     {"site", site},            {"runs", cfg.runs},
            {"epochs", cfg.epochs}, {"optimizer", optimizer}, {"lr", lr},              {"batch_size", batch_size},
            {"init", init},         {"record_every", record_every}};
    report::Manifest manifest("compare", jc, seed);
    const auto result = experiments::run_comparison_detailed(cfg);
    const auto summary = experiments::summarize(result.series);

    manifest.emit(out_dir, "dataset.csv", report::dataset_csv(experiments::make_dataset(cfg.data), manifest.hash()));
    manifest.emit(out_dir, "errors.csv", report::stats_csv(result.series, manifest.hash()));
    manifest.emit(out_dir, "errors.svg",
                  report::error_curve_svg(result.series, manifest.hash(), "training error, " + data));
    json sj = report::summary_json(summary);
    sj["config"] = jc;
    sj["config_hash"] = manifest.hash();
    manifest.emit(out_dir, "summary.json", dump(sj));
    for (std::size_t k = 0; k < cfg.models.size(); ++k) {
      const std::string name = "model_" + std::string(to_string(cfg.models[k])) + "_run0.spxn";
      checkpoint::save(result.first_run_networks[k], fs::path(out_dir) / name);
      manifest.record(name);
    }
    manifest.finish(out_dir, timer.seconds());

    std::printf("model  final_mean  final_std  <0.05  <0.1  <0.3\n");
    for (const auto& s : summary) {
      std::printf("%-5s  %10.4f  %9.4f  %5.2f  %4.2f  %4.2f\n", std::string(to_string(s.kind)).c_str(), s.final_mean,
                  s.final_std, s.fraction_below[0].second, s.fraction_below[1].second, s.fraction_below[2].second);
    }
    return 0;
  }
};

// ------------------------------------------------------------- init-net

struct InitNetCmd {
  std::vector<std::size_t> dims{2, 3, 2};
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string output = "net.spxn";

  void attach(CLI::App*, Bindings& b) {
    b.add("dims", dims, "layer widths, input first")->delimiter(',');
    b.add("seed", seed, "initialization seed");
    b.add("out-dir", out_dir, "output directory");
    b.add("output", output, "checkpoint file name");
  }

  int run(const Bindings&) const {
    Timer timer;
    if (dims.size() < 2) throw ConfigError("--dims needs at least an input and an output width");
    Network net = make_mlp(dims, Activation::identity, std::nullopt);
    init_params(net, seed);
    report::Manifest manifest("init-net", {{"command", "init-net"}, {"dims", dims}, {"seed", seed}}, seed);
    checkpoint::save(net, fs::path(out_dir) / output);
    manifest.record(output);
    manifest.finish(out_dir, timer.seconds());
    std::printf("wrote %zu parameters to %s\n", net.param_count(), (fs::path(out_dir) / output).string().c_str());
    return 0;
  }
};

// ------------------------------------------------------------- regions

struct RegionsCmd {
  std::string checkpoint_path;
  std::size_t resolution = 512;
  std::vector<double> bbox{-1.5, 1.5, -1.5, 1.5};
  std::string out_dir = ".";

  void attach(CLI::App*, Bindings& b) {
    b.add("checkpoint", checkpoint_path, "network checkpoint (.spxn)");
    b.add("resolution", resolution, "grid cells per axis");
    b.add("bbox", bbox, "xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);
    b.add("out-dir", out_dir, "output directory");
  }

  int run(const Bindings&) const {
    Timer timer;
    if (checkpoint_path.empty()) throw ConfigError("--checkpoint is required");
    if (!fs::exists(checkpoint_path)) throw Error("checkpoint '" + checkpoint_path + "' not found");
    if (bbox.size() != 4) throw ConfigError("--bbox needs four values");
    const Network net = checkpoint::load(checkpoint_path);
    if (net.input_dim() != 2 || net.layers().front().spec.in_dim != 2) {
      throw DimensionError("unsupported: region analysis needs a network with 2-D input (got " +
                           std::to_string(net.input_dim()) + ")");
    }
    const analysis::BBox box{bbox[0], bbox[1], bbox[2], bbox[3]};
    const auto map = analysis::count_regions(net, box, resolution, resolution);
    const auto lines = analysis::layer1_hyperplanes(net);
    json result{{"grid_regions", map.region_count}, {"resolution", resolution}, {"units", lines.size()}};
    // With one hidden layer and nothing injected, regions are exactly the faces of the line arrangement.
    const bool single_layer = net.depth() == 2 && !net.injection();
    if (single_layer) {
      result["arrangement_regions"] = analysis::arrangement_region_count(lines, box);
      result["bound"] = analysis::arrangement_bound(lines.size());
    }
    json cfg{{"command", "regions"},
             {"checkpoint_fnv1a", report::fnv1a64(report::read_file(checkpoint_path))},
             {"resolution", resolution},
             {"bbox", bbox}};
    report::Manifest manifest("regions", cfg, 0);
    result["config_hash"] = manifest.hash();
    manifest.emit(out_dir, "regions.csv", report::region_csv(map, manifest.hash()));
    manifest.emit(out_dir, "regions.svg", report::regions_svg(map, lines, manifest.hash()));
    manifest.emit(out_dir, "regions.json", dump(result));
    manifest.finish(out_dir, timer.seconds());
    std::printf("regions: %zu\n", map.region_count);
    if (single_layer) {
      std::printf("arrangement regions: %zu (bound %zu)\n", result["arrangement_regions"].get<std::size_t>(),
                  result["bound"].get<std::size_t>());
    }
    return 0;
  }
};

// ------------------------------------------------------------- gan

struct GanCmd {
  std::string data = "mixture8";
  bool cond = false;
  std::size_t epochs = 0;
  std::size_t batch = 0;
  double lr = 0.0;
  std::size_t z_dim = 0;
  std::vector<std::size_t> hidden{64, 64};
  std::size_t n = 2048;
  double mode_std = 0.05;
  std::string loss = "non-saturating";
  std::size_t d_steps = 1;
  std::size_t grid = 100;
  std::size_t parzen_samples = 1000;
  std::size_t test_size = 1000;
  std::string mnist_images, mnist_labels, mnist_test_images, mnist_test_labels;
  std::size_t max_train = 10000;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  void attach(CLI::App*, Bindings& b) {
    b.add("data", data, "mixture8, mnist, type1 or type2")
        ->check(CLI::IsMember({"mixture8", "mnist", "type1", "type2"}));
    b.flag("cond", cond, "train a conditional GAN");
    b.add("epochs", epochs, "training epochs (0 = dataset default)");
    b.add("batch", batch, "mini-batch size (0 = dataset default)");
    b.add("lr", lr, "Adam learning rate for both players (0 = dataset default)");
    b.add("z-dim", z_dim, "noise dimension (0 = dataset default)");
    b.add("hidden", hidden, "hidden widths for 2-D data")->delimiter(',');
    b.add("n", n, "training samples for synthetic data");
    b.add("mode-std", mode_std, "mixture mode std");
    b.add("loss", loss, "generator loss")->check(CLI::IsMember({"non-saturating", "minimax"}));
    b.add("d-steps", d_steps, "discriminator steps per generator step");
    b.add("grid", grid, "number of samples in the sample grid");
    b.add("parzen-samples", parzen_samples, "generated samples for the Parzen estimate");
    b.add("test-size", test_size, "held-out points for the Parzen estimate");
    b.add("mnist-images", mnist_images, "MNIST training images (IDX)");
    b.add("mnist-labels", mnist_labels, "MNIST training labels (IDX)");
    b.add("mnist-test-images", mnist_test_images, "MNIST test images (IDX)");
    b.add("mnist-test-labels", mnist_test_labels, "MNIST test labels (IDX)");
    b.add("max-train", max_train, "cap on MNIST training rows (0 = all)");
    b.add("seed", seed, "master seed");
    b.add("out-dir", out_dir, "output directory");
  }

  static LabeledDataset head_rows(const LabeledDataset& ds, std::size_t first, std::size_t count) {
    count = std::min(count, ds.size() - std::min(first, ds.size()));
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = first + i;
    LabeledDataset out;
    out.inputs = gather_rows(ds.inputs, idx);
    for (auto i : idx) out.labels.push_back(ds.labels[i]);
    out.num_classes = ds.num_classes;
    if (ds.conditions) out.conditions = gather_rows(*ds.conditions, idx);
    return out;
  }

  int run(const Bindings&) const {
    Timer timer;
    const bool mnist = data == "mnist";
    const bool toy = data == "type1" || data == "type2";
    if (cond && toy) throw ConfigError("--cond: dataset '" + data + "' has no conditions");
    if (mnist && (mnist_images.empty() || mnist_labels.empty())) {
      throw ConfigError("--data mnist requires --mnist-images and --mnist-labels");
    }
    if (grid == 0 || parzen_samples == 0 || test_size == 0) throw ConfigError("--grid, --parzen-samples and --test-size must be positive");

    // Training, validation (bandwidth selection) and test sets.
    LabeledDataset train_ds, val_ds, test_ds;
    if (mnist) {
      LabeledDataset full = idx::load_mnist_idx(mnist_images, mnist_labels);
      if (!mnist_test_images.empty() != !mnist_test_labels.empty())
        throw ConfigError("--mnist-test-images and --mnist-test-labels go together");
      const std::size_t n_val = std::min<std::size_t>(1000, full.size() / 10);
      const std::size_t n_train = max_train == 0 ? full.size() - n_val : std::min(max_train, full.size() - n_val);
      if (n_train == 0 || n_val == 0) throw ConfigError("MNIST file too small");
      train_ds = head_rows(full, 0, n_train);
      val_ds = head_rows(full, full.size() - n_val, n_val);
      test_ds = mnist_test_images.empty() ? val_ds
                                          : head_rows(idx::load_mnist_idx(mnist_test_images, mnist_test_labels), 0,
                                                      test_size);
    } else if (data == "mixture8") {
      train_ds = gen_cond_mixture(n, 8, 1.0, mode_std, derive_seed(seed, 10));
      val_ds = gen_cond_mixture(test_size, 8, 1.0, mode_std, derive_seed(seed, 11));
      test_ds = gen_cond_mixture(test_size, 8, 1.0, mode_std, derive_seed(seed, 12));
    } else {
      experiments::DatasetSpec spec{experiments::parse_dataset_kind(data), n / 2, 0.05, 4, derive_seed(seed, 10)};
      train_ds = experiments::make_dataset(spec);
      spec.n_per_class = test_size / 2 + 1;
      spec.seed = derive_seed(seed, 11);
      val_ds = experiments::make_dataset(spec);
      spec.seed = derive_seed(seed, 12);
      test_ds = experiments::make_dataset(spec);
    }

    const std::size_t zd = z_dim ? z_dim : (mnist ? 128 : 4);
    const std::size_t cond_dim = cond ? train_ds.conditions->cols : 0;
    gan::GanPair pair = mnist ? gan::make_gan_pair(784, zd, cond_dim, {256, 512}, {512, 256}, Activation::sigmoid,
                                                   derive_seed(seed, 0))
                              : gan::make_gan_pair(train_ds.inputs.cols, zd, cond_dim, hidden, hidden,
                                                   Activation::identity, derive_seed(seed, 0));
    gan::GanTrainConfig tc;
    tc.epochs = epochs ? epochs : (mnist ? 5 : 20);
    tc.batch_size = batch ? batch : (mnist ? 128 : 64);
    tc.g_learning_rate = tc.d_learning_rate = lr > 0 ? lr : (mnist ? 2e-4 : 1e-3);
    tc.d_steps_per_g_step = d_steps;
    tc.seed = derive_seed(seed, 1);
    tc.generator_loss = loss == "minimax" ? gan::GeneratorLoss::minimax : gan::GeneratorLoss::non_saturating;

    json jc{{"command", "gan"},   {"data", data},         {"cond", cond},         {"epochs", tc.epochs},
            {"batch", tc.batch_size}, {"lr", tc.g_learning_rate}, {"z_dim", zd},   {"hidden", hidden},
            {"n", n},             {"mode_std", mode_std}, {"loss", loss},         {"d_steps", d_steps},
            {"grid", grid},       {"parzen_samples", parzen_samples}, {"test_size", test_size},
            {"max_train", max_train}, {"seed", seed}};
    if (mnist) {
      jc["mnist_images"] = mnist_images;
      jc["mnist_test_images"] = mnist_test_images;
    }
    report::Manifest manifest("gan", jc, seed);
    const std::string hash = manifest.hash();

    gan::GanTrainer trainer(std::move(pair), tc);
    const auto history = gan::train(trainer, train_ds);
    const auto& trained = trainer.pair();

    std::string losses = "# suppax gan losses; config_hash=" + hash + "\nepoch,d_loss,g_loss\n";
    for (std::size_t e = 0; e < history.size(); ++e) {
      losses += std::to_string(e + 1) + "," + report::num(history[e].d_loss) + "," + report::num(history[e].g_loss) + "\n";
    }
    manifest.emit(out_dir, "losses.csv", losses);

    // Sample grid: with conditions, consecutive blocks of grid/k samples share a class.
    Matrix grid_samples;
    std::vector<int> grid_groups(grid, 0);
    if (cond) {
      Matrix c(grid, cond_dim);
      for (std::size_t i = 0; i < grid; ++i) {
        const std::size_t k = std::min(cond_dim - 1, i * cond_dim / grid);
        c(i, k) = 1.0;
        grid_groups[i] = static_cast<int>(k);
      }
      grid_samples = gan::sample_conditions(trained, c, derive_seed(seed, 20));
    } else {
      grid_samples = gan::sample(trained, grid, std::nullopt, derive_seed(seed, 20));
    }
    manifest.emit(out_dir, "samples.csv", report::samples_csv(grid_samples, cond ? &grid_groups : nullptr, hash));
    if (mnist) {
      const std::size_t cols = 10, rows = (grid + cols - 1) / cols;
      manifest.emit(out_dir, "grid.pgm", report::pgm_grid(grid_samples, 28, rows, cols, hash));
    } else if (grid_samples.cols == 2) {
      std::vector<std::array<double, 2>> marks;
      if (data == "mixture8")
        for (std::size_t k = 0; k < 8; ++k) {
          auto [x, y] = mixture_center(k, 8, 1.0);
          marks.push_back({x, y});
        }
      manifest.emit(out_dir, "samples.svg",
                    report::scatter_svg(grid_samples, grid_groups, hash, cond ? "cGAN samples" : "GAN samples", marks));
    }

    const Matrix ps = gan::sample_balanced(trained, parzen_samples, derive_seed(seed, 21));
    const auto sigma_grid = mnist ? analysis::log_grid(0.05, 1.0, 12) : analysis::log_grid(0.01, 1.0, 15);
    const double sigma = analysis::select_bandwidth(ps, val_ds.inputs, sigma_grid);
    const Matrix test_rows = test_ds.inputs.rows > test_size
                                 ? head_rows(test_ds, 0, test_size).inputs
                                 : test_ds.inputs;
    const auto est = analysis::parzen_loglik(ps, test_rows, sigma);
    json pj = report::parzen_json(est);
    pj["model"] = cond ? "cgan" : "gan";
    pj["config_hash"] = hash;
    if (cond && data == "mixture8") pj["mode_accuracy"] = gan::mode_accuracy(trained, 8, 1.0, 100, derive_seed(seed, 22));
    manifest.emit(out_dir, "parzen.json", dump(pj));

    checkpoint::save(trained.generator, fs::path(out_dir) / "generator.spxn");
    manifest.record("generator.spxn");
    checkpoint::save(trained.discriminator, fs::path(out_dir) / "discriminator.spxn");
    manifest.record("discriminator.spxn");
    manifest.finish(out_dir, timer.seconds());

    std::printf("%s parzen log-likelihood: %.4f +- %.4f (sigma %.4g, n %zu)\n", cond ? "cgan" : "gan", est.mean_loglik,
                est.sem, est.bandwidth, est.n_test);
    if (pj.contains("mode_accuracy")) std::printf("mode accuracy: %.4f\n", pj["mode_accuracy"].get<double>());
    return 0;
  }
};

// ------------------------------------------------------------- separability

struct SeparabilityCmd {
  std::string data = "type1";
  std::string input;
  std::string lift;
  std::size_t n = 100;
  double noise = 0.0;
  std::size_t stripes = 4;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  void attach(CLI::App*, Bindings& b) {
    b.add("data", data, "type1, type2 or patch (ignored with --input)")
        ->check(CLI::IsMember({"type1", "type2", "patch"}));
    b.add("input", input, "dataset CSV instead of a generated set");
    b.add("lift", lift, "append a feature before testing: distance or periodic");
    b.add("n", n, "samples per class");
    b.add("noise", noise, "dataset noise (0 = clean)");
    b.add("stripes", stripes, "type2 stripe count");
    b.add("seed", seed, "dataset seed");
    b.add("out-dir", out_dir, "output directory");
  }

  int run(const Bindings&) const {
    Timer timer;
    LabeledDataset ds = input.empty() ? experiments::make_dataset({experiments::parse_dataset_kind(data), n, noise,
                                                                   stripes, seed})
                                      : report::parse_dataset_csv(report::read_file(input));
    Matrix points = ds.inputs;
    if (auto f = optional_feature(lift)) {
      if (!is_pointwise(*f)) throw ConfigError("--lift must be distance or periodic");
      if (points.cols != 2) throw ConfigError("--lift needs 2-D inputs");
      points = hconcat(points, feature_eval(*f, points));
    }
    const auto res = analysis::linear_separable(points, ds.labels);
    json cfg{{"command", "separability"}, {"lift", lift}, {"seed", seed}};
    if (input.empty()) {
      cfg["data"] = data;
      cfg["n"] = n;
      cfg["noise"] = noise;
      cfg["stripes"] = stripes;
    } else {
      cfg["input_fnv1a"] = report::fnv1a64(report::read_file(input));
    }
    report::Manifest manifest("separability", cfg, seed);
    json j = report::separability_json(res);
    j["dims"] = points.cols;
    j["config_hash"] = manifest.hash();
    // For a lift, the plane expressed as a threshold on the lifted coordinate.
    if (res.witness && !lift.empty() && res.witness->w.back() != 0.0) {
      j["lift_threshold"] = -res.witness->b / res.witness->w.back();
    }
    manifest.emit(out_dir, "separability.json", dump(j));
    manifest.finish(out_dir, timer.seconds());
    std::printf("separable: %s (%s, %zu-D)\n", res.separable ? "true" : "false", res.method.c_str(), points.cols);
    if (res.witness) {
      std::printf("witness: w = [");
      for (std::size_t k = 0; k < res.witness->w.size(); ++k) std::printf("%s%.6g", k ? ", " : "", res.witness->w[k]);
      std::printf("], b = %.6g\n", res.witness->b);
      if (j.contains("lift_threshold")) std::printf("lifted threshold: %.6g\n", j["lift_threshold"].get<double>());
    }
    return 0;
  }
};

// ------------------------------------------------------------- parzen

struct ParzenCmd {
  std::string samples, test, validation;
  double sigma = 0.0;
  std::vector<double> sigma_grid{0.01, 1.0, 15};
  std::string out_dir = ".";

  void attach(CLI::App*, Bindings& b) {
    b.add("samples", samples, "CSV of model samples (x* columns)");
    b.add("test", test, "CSV of test points (x* columns)");
    b.add("sigma", sigma, "fixed bandwidth (0 = select on --validation)");
    b.add("validation", validation, "CSV used to select the bandwidth");
    b.add("sigma-grid", sigma_grid, "lo,hi,count of the log-spaced bandwidth grid")->delimiter(',')->expected(3);
    b.add("out-dir", out_dir, "output directory");
  }

  int run(const Bindings&) const {
    Timer timer;
    if (samples.empty() || test.empty()) throw ConfigError("--samples and --test are required");
    if (sigma <= 0.0 && validation.empty()) throw ConfigError("give --sigma or --validation");
    if (sigma_grid.size() != 3 || sigma_grid[2] < 1) throw ConfigError("--sigma-grid needs lo,hi,count");
    const Matrix s = report::parse_points_csv(report::read_file(samples));
    const Matrix t = report::parse_points_csv(report::read_file(test));
    double bw = sigma;
    if (bw <= 0.0) {
      const Matrix v = report::parse_points_csv(report::read_file(validation));
      bw = analysis::select_bandwidth(
          s, v, analysis::log_grid(sigma_grid[0], sigma_grid[1], static_cast<std::size_t>(sigma_grid[2])));
    }
    const auto est = analysis::parzen_loglik(s, t, bw);
    json cfg{{"command", "parzen"},
             {"samples_fnv1a", report::fnv1a64(report::read_file(samples))},
             {"test_fnv1a", report::fnv1a64(report::read_file(test))},
             {"sigma", sigma},
             {"sigma_grid", sigma_grid}};
    if (!validation.empty()) cfg["validation_fnv1a"] = report::fnv1a64(report::read_file(validation));
    report::Manifest manifest("parzen", cfg, 0);
    json j = report::parzen_json(est);
    j["config_hash"] = manifest.hash();
    manifest.emit(out_dir, "parzen.json", dump(j));
    manifest.finish(out_dir, timer.seconds());
    std::printf("parzen log-likelihood: %.6f +- %.6f (sigma %.6g, n %zu)\n", est.mean_loglik, est.sem, est.bandwidth,
                est.n_test);
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"suppax: supplementary-axis network experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(report::kToolVersion));

  GenDataCmd gen;
  CompareCmd compare;
  InitNetCmd init_net;
  RegionsCmd regions;
  GanCmd gan_cmd;
  SeparabilityCmd sep;
  ParzenCmd parzen;

  std::vector<std::unique_ptr<Bindings>> bindings;
  std::map<CLI::App*, std::function<int()>> runners;
  auto add = [&](auto& cmd, const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    bindings.push_back(std::make_unique<Bindings>(sub));
    cmd.attach(sub, *bindings.back());
    Bindings* b = bindings.back().get();
    runners[sub] = [&cmd, b] {
      b->apply();
      return cmd.run(*b);
    };
  };
  add(gen, "gen-data", "generate a toy dataset as CSV");
  add(compare, "compare", "train models A/B/C over many seeds and plot error curves");
  add(init_net, "init-net", "write a randomly initialized MLP checkpoint");
  add(regions, "regions", "map the linear regions of a 2-D input network");
  add(gan_cmd, "gan", "train a GAN or conditional GAN and score it");
  add(sep, "separability", "exact linear separability test");
  add(parzen, "parzen", "Gaussian Parzen-window log-likelihood of test points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    for (auto* sub : app.get_subcommands()) return runners.at(sub)();
  } catch (const ConfigError& e) {
    std::cerr << "suppax: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "suppax: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

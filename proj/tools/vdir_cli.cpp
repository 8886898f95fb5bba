// vdir: generate data, train, evaluate and sweep from the command line.
//
// Exit status: 0 on success, 1 when the work itself fails (I/O, bad data,
// corrupt checkpoint), 2 for usage errors.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vdir/vdir.hpp"

namespace fs = std::filesystem;
using vdir::TrainConfig;
using vdir::report::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out = ".";
  int threads = 1;
  std::string preset = "reference";
  json train_keys = json::object();
  bool seed_from_file = false;
  bool threads_from_file = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* preset_opt = nullptr;
};

// Synthetic benchmark settings shared by `gen --kind benchmark` and `sweep`.
struct BenchmarkFlags {
  double separation = 6.0;
  double sigma = 0.7;
  std::size_t dim = 16;
  std::size_t n_train = 300;
  std::size_t n_test = 300;
  std::size_t n_ood = 500;
  double box = 10.0;

  void add_to(CLI::App* app) {
    app->add_option("--separation", separation, "Distance of class means from the origin")->capture_default_str();
    app->add_option("--sigma", sigma, "Per-coordinate noise standard deviation")->capture_default_str();
    app->add_option("--dim", dim, "Feature dimension")->capture_default_str();
    app->add_option("--n-train", n_train, "Training rows")->capture_default_str();
    app->add_option("--n-test", n_test, "Test rows")->capture_default_str();
    app->add_option("--n-ood", n_ood, "Out-of-distribution rows")->capture_default_str();
    app->add_option("--box", box, "Half-width of the uniform OOD box")->capture_default_str();
  }

  vdir::experiment::SyntheticSpec spec() const {
    vdir::experiment::SyntheticSpec s;
    s.separation = separation;
    s.sigma = sigma;
    s.dim = dim;
    s.n_train = n_train;
    s.n_test = n_test;
    s.n_ood = n_ood;
    s.ood.box_lo = -box;
    s.ood.box_hi = box;
    return s;
  }

  json to_json() const {
    return json{{"separation", separation}, {"sigma", sigma}, {"dim", dim}, {"n_train", n_train},
                {"n_test", n_test},         {"n_ood", n_ood}, {"box", box}};
  }
};

// Training flags. Each value is applied only when given on the command line,
// so the preset and config file stay in effect otherwise. Help text shows
// the reference-recipe defaults.
struct TrainFlags {
  TrainConfig v = TrainConfig::reference();
  std::string prior = "gt-preserve";
  std::string direction = "ascend";
  std::vector<std::pair<CLI::Option*, std::function<void(TrainConfig&)>>> bound;

  template <typename T>
  void bind(CLI::App* app, const std::string& name, T& slot, T TrainConfig::*field, const std::string& help) {
    auto* o = app->add_option(name, slot, help)->capture_default_str();
    bound.emplace_back(o, [&slot, field](TrainConfig& c) { c.*field = slot; });
  }

  void add_to(CLI::App* app) {
    bind(app, "--epochs", v.epochs, &TrainConfig::epochs, "Training epochs");
    bind(app, "--batch", v.batch_size, &TrainConfig::batch_size, "Mini-batch size");
    bind(app, "--lr", v.base_lr, &TrainConfig::base_lr, "Initial learning rate");
    auto* ms = app->add_option("--milestones", v.milestones, "Epochs at which the rate is divided by --lr-factor")
                   ->delimiter(',')
                   ->capture_default_str();
    bound.emplace_back(ms, [this](TrainConfig& c) { c.milestones = v.milestones; });
    bind(app, "--lr-factor", v.lr_factor, &TrainConfig::lr_factor, "Learning-rate divisor per milestone");
    bind(app, "--momentum", v.momentum, &TrainConfig::momentum, "Nesterov momentum");
    bind(app, "--weight-decay", v.weight_decay, &TrainConfig::weight_decay, "L2 weight decay");
    bind(app, "--clip-norm", v.clip_norm, &TrainConfig::clip_norm, "Global gradient-norm ceiling");
    bind(app, "--lambda", v.lambda, &TrainConfig::lambda, "Weight of the discriminative term (0 disables it)");
    bind(app, "--eta", v.eta, &TrainConfig::eta, "Weight of the KL term inside the lower bound");
    bind(app, "--fgsm-eps", v.epsilon_fgsm, &TrainConfig::epsilon_fgsm, "Adversarial step size");
    auto* hid = app->add_option("--hidden", v.hidden, "Hidden layer widths")->delimiter(',')->capture_default_str();
    bound.emplace_back(hid, [this](TrainConfig& c) { c.hidden = v.hidden; });
    bind(app, "--val-fraction", v.val_fraction, &TrainConfig::val_fraction, "Share of rows held out for validation");
    auto* pr = app->add_option("--prior", prior, "Prior concentration scheme")
                   ->check(CLI::IsMember({"uniform", "gt-preserve", "pred-preserve"}))
                   ->capture_default_str();
    bound.emplace_back(pr, [this](TrainConfig& c) { c.prior = vdir::parse_prior(prior); });
    auto* dir = app->add_option("--fgsm-direction", direction, "Sign of the adversarial step")
                    ->check(CLI::IsMember({"ascend", "descend"}))
                    ->capture_default_str();
    bound.emplace_back(dir, [this](TrainConfig& c) { c.fgsm_direction = vdir::parse_fgsm_direction(direction); });
  }

  void apply(TrainConfig& c) const {
    for (const auto& [opt, set] : bound)
      if (opt->count()) set(c);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vdir::IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vdir::IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw vdir::IoError("write to '" + path.string() + "' failed");
}

// Config file schema (JSON object, all keys optional):
//   preset   "desk" | "reference"
//   seed, threads, out
//   train    object of training keys, see vdir::report::apply_json
// Values from the file fill in any global flag not given on the command line
// or through the environment.
void load_config_file(Globals& g) {
  if (g.config_path.empty()) return;
  json j;
  try {
    j = json::parse(slurp(g.config_path));
  } catch (const json::exception& e) {
    throw UsageError("config '" + g.config_path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("config '" + g.config_path + "' must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "preset") {
        if (!g.preset_opt->count()) g.preset = v.get<std::string>();
      } else if (key == "seed") {
        if (!g.seed_opt->count()) g.seed = v.get<std::uint64_t>(), g.seed_from_file = true;
      } else if (key == "threads") {
        if (!g.threads_opt->count()) g.threads = v.get<int>(), g.threads_from_file = true;
      } else if (key == "out") {
        if (!g.out_opt->count()) g.out = v.get<std::string>();
      } else if (key == "train") {
        g.train_keys = v;
      } else {
        throw UsageError("config '" + g.config_path + "': unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw UsageError("config '" + g.config_path + "': " + e.what());
  }
}

TrainConfig resolve_config(const Globals& g, const TrainFlags* flags) {
  TrainConfig cfg;
  if (g.preset == "desk") cfg = TrainConfig::desk();
  else if (g.preset == "reference") cfg = TrainConfig::reference();
  else throw UsageError("unknown preset '" + g.preset + "'");

  try {
    cfg = vdir::report::apply_json(cfg, g.train_keys);
    if (g.seed_opt->count() || g.seed_from_file) cfg.seed = g.seed;
    if (g.threads_opt->count() || g.threads_from_file) cfg.threads = g.threads;
    if (flags) flags->apply(cfg);
    cfg.validate();
  } catch (const vdir::ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::string config_hash(const json& j) {
  const std::string text = j.dump();
  const auto h = vdir::checkpoint::fnv1a64(
      std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string training_log(const vdir::TrainResult& r) {
  std::string text;
  for (const auto& e : r.log) text += vdir::report::to_json(e).dump() + "\n";
  return text;
}

// ------------------------------------------------------------------ gen

struct GenArgs {
  std::string kind = "mixture";
  std::size_t k = 3;
  std::size_t n = 300;
  std::size_t dim = 2;
  double separation = 6.0;
  double sigma = 0.7;
  vdir::data::OodParams ood;
  std::string file;
  BenchmarkFlags bench;
};

int cmd_gen(const Globals& g, const GenArgs& a) {
  const fs::path out(g.out);
  auto emit = [&](const vdir::Dataset& ds, const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    vdir::data::save_csv(ds, path.string());
    std::cout << "wrote " << ds.rows() << " rows to " << path.string() << "\n";
  };

  if (a.kind == "benchmark") {
    const auto d = vdir::experiment::make_synthetic(a.bench.spec(), g.seed);
    emit(d.train, out / "train.csv");
    emit(d.test, out / "test.csv");
    emit(d.ood, out / "ood.csv");
    return 0;
  }
  const fs::path path = out / (a.file.empty() ? a.kind + ".csv" : a.file);
  if (a.kind == "mixture") {
    if (a.k < 2 || a.n % a.k != 0) throw UsageError("--n must be a positive multiple of --k (k >= 2)");
    emit(vdir::data::gen_gaussian_mixture(a.k, a.n / a.k, a.dim, a.separation, a.sigma, g.seed), path);
  } else {
    emit(vdir::data::gen_ood(vdir::data::parse_ood_kind(a.kind), a.n, a.dim, a.ood, g.seed), path);
  }
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string train_csv;
  std::string checkpoint = "model.ckpt";
  std::string log = "train_log.jsonl";
  TrainFlags flags;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
  const TrainConfig cfg = resolve_config(g, &a.flags);
  const auto ds = vdir::data::load_csv(a.train_csv);
  const fs::path out(g.out);
  fs::create_directories(out);

  std::ofstream log(out / a.log, std::ios::binary);
  if (!log) throw vdir::IoError("cannot open '" + (out / a.log).string() + "' for writing");
  auto result = vdir::trainer::train(ds, cfg, [&](const vdir::EpochRecord& e) {
    log << vdir::report::to_json(e).dump() << "\n";
    log.flush();
  });
  vdir::checkpoint::save(result.params, (out / a.checkpoint).string());
  write_text(out / "config.json", vdir::report::to_json(cfg).dump(2) + "\n");

  const auto& last = result.log.back();
  std::printf("epochs %d  final train accuracy %.4f  best epoch %d", cfg.epochs, last.train_accuracy,
              result.best_epoch);
  if (!std::isnan(last.val_accuracy)) std::printf("  validation accuracy %.4f", result.log[result.best_epoch].val_accuracy);
  std::printf("\ncheckpoint %s\n", (out / a.checkpoint).string().c_str());
  return 0;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string in_csv;
  std::string ood_csv;
  std::string smooth = "none";
  double perturb_eps = 0.0;
  std::string report = "report.json";
  std::string scores;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  const auto params = vdir::checkpoint::load(a.checkpoint);
  const auto in_set = vdir::data::load_csv(a.in_csv);
  const auto ood_set = vdir::data::load_csv(a.ood_csv);
  const vdir::detect::ScoringOptions opt{vdir::parse_smoothing(a.smooth), a.perturb_eps};
  const auto recs = vdir::experiment::score_sets(params, in_set, ood_set, opt);
  const auto rep = vdir::detect::evaluate(recs);

  const fs::path out(g.out);
  write_text(out / a.report, vdir::report::to_json(rep).dump(2) + "\n");
  if (!a.scores.empty()) {
    std::string text = "score,origin\n";
    for (const auto& r : recs)
      text += vdir::data::detail::format_double(r.score) + (r.origin == vdir::Origin::In ? ",in\n" : ",out\n");
    write_text(out / a.scores, text);
  }
  if (in_set.labeled) std::printf("in-distribution accuracy %.4f\n", vdir::trainer::accuracy(params, in_set));
  std::printf("fpr@95tpr %.4f  detection error %.4f  auroc %.4f  aupr-in %.4f  aupr-out %.4f  (%zu in, %zu out)\n",
              rep.fpr_at_95_tpr, rep.detection_error, rep.auroc, rep.aupr_in, rep.aupr_out, rep.n_in, rep.n_out);
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string sweep;
  std::string train_csv, test_csv, ood_csv;
  BenchmarkFlags bench;
  TrainFlags flags;
};

struct Cell {
  std::string value;
  TrainConfig cfg;
  std::string hash;
  double test_accuracy = 0.0;
  vdir::DetectionReport report;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  const auto eq = a.sweep.find('=');
  if (eq == std::string::npos) throw UsageError("--sweep expects key=v1,v2,...");
  const std::string key = a.sweep.substr(0, eq);
  if (key != "lambda" && key != "prior" && key != "smooth") throw UsageError("can only sweep lambda, prior or smooth");
  std::vector<std::string> values;
  std::stringstream ss(a.sweep.substr(eq + 1));
  for (std::string v; std::getline(ss, v, ',');)
    if (!v.empty()) values.push_back(v);
  if (values.empty()) throw UsageError("--sweep lists no values");

  const TrainConfig base = resolve_config(g, &a.flags);
  std::vector<Cell> cells;
  for (const auto& v : values) {
    Cell c;
    c.value = v;
    c.cfg = base;
    try {
      if (key == "lambda") c.cfg.lambda = std::stod(v);
      else if (key == "prior") c.cfg.prior = vdir::parse_prior(v);
      else c.cfg.smoothing = vdir::parse_smoothing(v);
      c.cfg.threads = 1;
      c.cfg.validate();
    } catch (const std::invalid_argument&) {
      throw UsageError("bad " + key + " value '" + v + "'");
    } catch (const vdir::ConfigError& e) {
      throw UsageError(e.what());
    }
    cells.push_back(std::move(c));
  }

  vdir::Dataset train, test, ood;
  json data_desc;
  const bool from_files = !a.train_csv.empty() || !a.test_csv.empty() || !a.ood_csv.empty();
  if (from_files) {
    if (a.train_csv.empty() || a.test_csv.empty() || a.ood_csv.empty())
      throw UsageError("--train, --test and --ood go together");
    train = vdir::data::load_csv(a.train_csv);
    test = vdir::data::load_csv(a.test_csv);
    ood = vdir::data::load_csv(a.ood_csv);
    data_desc = json{{"train", a.train_csv}, {"test", a.test_csv}, {"ood", a.ood_csv}};
  } else {
    auto d = vdir::experiment::make_synthetic(a.bench.spec(), base.seed);
    train = std::move(d.train);
    test = std::move(d.test);
    ood = std::move(d.ood);
    data_desc = a.bench.to_json();
    data_desc["seed"] = base.seed;
  }

  const fs::path runs = fs::path(g.out) / "runs";
  for (auto& c : cells) c.hash = config_hash(json{{"train", vdir::report::to_json(c.cfg)}, {"data", data_desc}});

  // Cells are independent and each is deterministic, so they are handed out
  // to workers in any order and results land in their own slots.
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(cells.size());
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      Cell& c = cells[i];
      try {
        const auto o = vdir::experiment::run(train, test, ood, c.cfg);
        c.test_accuracy = o.test_accuracy;
        c.report = o.report;
        const fs::path dir = runs / c.hash;
        fs::create_directories(dir);
        json cfg_doc{{"train", vdir::report::to_json(c.cfg)}, {"data", data_desc}};
        write_text(dir / "config.json", cfg_doc.dump(2) + "\n");
        write_text(dir / "report.json", vdir::report::to_json(c.report).dump(2) + "\n");
        write_text(dir / "train_log.jsonl", training_log(o.training));
        vdir::checkpoint::save(o.training.params, (dir / "model.ckpt").string());
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, g.threads));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(n_workers, cells.size()); ++t) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!errors[i].empty()) throw vdir::Error("sweep cell " + key + "=" + cells[i].value + ": " + errors[i]);

  const TrainConfig ref = TrainConfig::reference();
  auto is_default = [&](const Cell& c) {
    if (key == "lambda") return c.cfg.lambda == ref.lambda;
    if (key == "prior") return c.cfg.prior == ref.prior;
    return c.cfg.smoothing == ref.smoothing;
  };

  std::string csv = key + ",test_accuracy,fpr_at_95_tpr,detection_error,auroc,aupr_in,aupr_out,run\n";
  std::printf("  %-12s %9s %9s %9s %9s %9s %9s  %s\n", key.c_str(), "accuracy", "fpr@95", "det.err", "auroc",
              "aupr-in", "aupr-out", "run");
  for (const auto& c : cells) {
    const auto& r = c.report;
    std::printf("%c %-12s %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f  %s\n", is_default(c) ? '*' : ' ', c.value.c_str(),
                c.test_accuracy, r.fpr_at_95_tpr, r.detection_error, r.auroc, r.aupr_in, r.aupr_out, c.hash.c_str());
    using vdir::data::detail::format_double;
    csv += c.value + "," + format_double(c.test_accuracy) + "," + format_double(r.fpr_at_95_tpr) + "," +
           format_double(r.detection_error) + "," + format_double(r.auroc) + "," + format_double(r.aupr_in) + "," +
           format_double(r.aupr_out) + "," + c.hash + "\n";
  }
  std::printf("* default setting\n");
  write_text(fs::path(g.out) / ("sweep_" + key + ".csv"), csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-posterior classifier with confidence-based out-of-distribution detection"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Globals g;
  app.add_option("--config", g.config_path, "JSON config file")->envname("VDIR_CONFIG");
  g.seed_opt = app.add_option("--seed", g.seed, "Seed for data generation and training")
                   ->envname("VDIR_SEED")
                   ->capture_default_str();
  g.out_opt = app.add_option("--out", g.out, "Output directory")->envname("VDIR_OUT")->capture_default_str();
  g.threads_opt = app.add_option("--threads", g.threads, "Worker threads")
                      ->envname("VDIR_THREADS")
                      ->check(CLI::PositiveNumber)
                      ->capture_default_str();
  g.preset_opt = app.add_option("--preset", g.preset, "Starting configuration before overrides")
      ->check(CLI::IsMember({"reference", "desk"}))
      ->envname("VDIR_PRESET")
      ->capture_default_str();
  app.footer("Environment: VDIR_CONFIG, VDIR_SEED, VDIR_OUT, VDIR_THREADS and VDIR_PRESET stand in for the "
             "matching global flags.\nPrecedence: preset < config file < environment < flags.");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Write synthetic datasets as CSV");
  gen->add_option("--kind", gen_args.kind, "Dataset family")
      ->check(CLI::IsMember({"mixture", "uniform_box", "ring", "shifted_mixture", "benchmark"}))
      ->capture_default_str();
  gen->add_option("--k", gen_args.k, "Classes (mixture)")->capture_default_str();
  gen->add_option("--n", gen_args.n, "Rows to write")->capture_default_str();
  gen->add_option("--d", gen_args.dim, "Feature dimension")->capture_default_str();
  gen->add_option("--separation", gen_args.separation, "Distance of class means from the origin (mixture)")
      ->capture_default_str();
  gen->add_option("--sigma", gen_args.sigma, "Noise standard deviation (mixture)")->capture_default_str();
  gen->add_option("--box-lo", gen_args.ood.box_lo, "Lower box edge (uniform_box)")->capture_default_str();
  gen->add_option("--box-hi", gen_args.ood.box_hi, "Upper box edge (uniform_box)")->capture_default_str();
  gen->add_option("--radius", gen_args.ood.radius, "Ring radius (ring)")->capture_default_str();
  gen->add_option("--width", gen_args.ood.width, "Ring half-width (ring)")->capture_default_str();
  gen->add_option("--shift", gen_args.ood.shift, "Offset along the first axis (shifted_mixture)")
      ->capture_default_str();
  gen->add_option("--file", gen_args.file, "Output file name inside --out (default <kind>.csv)");
  auto* bench_group = gen->add_option_group("benchmark", "Settings for --kind benchmark (train/test/ood CSVs)");
  gen_args.bench.add_to(bench_group);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a network on a labelled CSV");
  train->add_option("--train", train_args.train_csv, "Labelled training CSV")->required();
  train->add_option("--checkpoint", train_args.checkpoint, "Checkpoint file name inside --out")->capture_default_str();
  train->add_option("--log", train_args.log, "JSON Lines training log inside --out")->capture_default_str();
  train_args.flags.add_to(train);
  train->footer("Bracketed training defaults are the reference recipe. --preset desk starts from 60 epochs, "
                "batch 64, milestones 30,45 and fgsm-eps 4 instead.");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score in-distribution and OOD sets and write a detection report");
  eval->add_option("--checkpoint", eval_args.checkpoint, "Trained checkpoint")->required();
  eval->add_option("--in", eval_args.in_csv, "In-distribution CSV")->required();
  eval->add_option("--ood", eval_args.ood_csv, "Out-of-distribution CSV")->required();
  eval->add_option("--smooth", eval_args.smooth, "Concentration smoothing before scoring")
      ->check(CLI::IsMember({"none", "log1p", "sqrt", "cbrt", "identity", "square", "sigmoid", "softsign"}))
      ->capture_default_str();
  eval->add_flag("--perturb-eps{0.01}", eval_args.perturb_eps,
                 "Input perturbation step; bare flag uses 0.01, off when absent");
  eval->add_option("--report", eval_args.report, "Report file name inside --out")->capture_default_str();
  eval->add_option("--scores", eval_args.scores, "Also write per-sample scores to this CSV inside --out");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Train and evaluate one run per value of a setting");
  sweep->add_option("--sweep", sweep_args.sweep, "key=v1,v2,... with key lambda, prior or smooth")->required();
  sweep->add_option("--train", sweep_args.train_csv, "Training CSV (default: synthetic benchmark)");
  sweep->add_option("--test", sweep_args.test_csv, "Test CSV");
  sweep->add_option("--ood", sweep_args.ood_csv, "OOD CSV");
  sweep_args.bench.add_to(sweep->add_option_group("benchmark", "Synthetic benchmark used when no CSVs are given"));
  sweep_args.flags.add_to(sweep);
  sweep->footer("Every cell shares the seed and data. Results go to <out>/runs/<config hash>/ and "
                "<out>/sweep_<key>.csv; the default setting is starred.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    load_config_file(g);
    if (*gen) return cmd_gen(g, gen_args);
    if (*train) return cmd_train(g, train_args);
    if (*eval) return cmd_eval(g, eval_args);
    if (*sweep) return cmd_sweep(g, sweep_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

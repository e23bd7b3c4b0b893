#include "texbench/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "texbench/classifier.hpp"
#include "texbench/dataset.hpp"
#include "texbench/errors.hpp"
#include "texbench/eval.hpp"
#include "texbench/features.hpp"
#include "texbench/featstore.hpp"
#include "texbench/report.hpp"
#include "texbench/rng.hpp"

using nlohmann::json;

namespace texbench {
namespace {

namespace fs = std::filesystem;

// Deep-feature files looked up by `grid --deep-dir`, one per exported layer.
const std::vector<std::string> kDeepLayers = {"fc1", "block5_pool", "block4_pool", "block3_pool"};

struct DataFlags {
  std::string root;
  std::string layout = "prefix";
  std::string resize;
};

struct LbpFlags {
  int points = 14;
  double radius = 4.0;
  bool normalize = false;
};

struct HogFlags {
  int cell = 18;
  int block = 1;
  int bins = 8;
  bool signed_orientation = false;
};

struct ClfFlags {
  std::string clf = "svm";
  std::optional<double> svm_c;
  std::optional<double> svm_gamma;
  std::optional<double> mlp_lr;
  std::string mlp_hidden;
  std::optional<int> tree_max_depth;
  bool standardize = false;
};

struct EvalFlags {
  int k = 3;
  std::uint64_t seed = 42;
  bool no_stratify = false;
};

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParameterError("invalid " + what + " '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParameterError("invalid " + what + " '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw ParameterError("--resize expects WxH, got '" + text + "'");
  const int w = parse_int(text.substr(0, x), "width");
  const int h = parse_int(text.substr(x + 1), "height");
  if (w < 1 || h < 1) throw ParameterError("--resize needs positive dimensions");
  return {w, h};
}

fs::path dataset_root(const DataFlags& flags) {
  if (!flags.root.empty()) return flags.root;
  if (const char* env = std::getenv("TEXTUREBENCH_DATA"); env && *env) return env;
  throw ParameterError("no dataset given: pass --data or set TEXTUREBENCH_DATA");
}

LabeledImageSet load(const DataFlags& flags) {
  LoadOptions options;
  options.layout = parse_layout(flags.layout);
  if (!flags.resize.empty()) options.resize = parse_size(flags.resize);
  return load_dataset(dataset_root(flags), options);
}

ExtractorSpec extractor_spec(ExtractorKind kind, const LbpFlags& lbp, const HogFlags& hog) {
  ExtractorSpec spec;
  spec.kind = kind;
  spec.lbp.points = lbp.points;
  spec.lbp.radius = lbp.radius;
  spec.lbp_normalize = lbp.normalize;
  spec.hog.cell_size = hog.cell;
  spec.hog.block_size = hog.block;
  spec.hog.orientation_bins = hog.bins;
  spec.hog.signed_orientation = hog.signed_orientation;
  return spec;
}

ClassifierSpec classifier_spec(const ClfFlags& flags) {
  ClassifierSpec spec = reference_spec(parse_classifier(flags.clf));
  if (flags.svm_c) spec.svm.c = *flags.svm_c;
  if (flags.svm_gamma) spec.svm.gamma = *flags.svm_gamma;
  if (flags.mlp_lr) spec.mlp.learning_rate = *flags.mlp_lr;
  if (!flags.mlp_hidden.empty()) {
    spec.mlp.hidden_layers.clear();
    for (const auto& part : split(flags.mlp_hidden, ',')) {
      spec.mlp.hidden_layers.push_back(parse_int(part, "--mlp-hidden entry"));
    }
  }
  if (flags.tree_max_depth) {
    if (*flags.tree_max_depth > 0) {
      spec.tree.max_depth = *flags.tree_max_depth;
    } else {
      spec.tree.max_depth.reset();
    }
  }
  spec.standardize = flags.standardize;
  spec.svm.validate();
  spec.tree.validate();
  spec.mlp.validate();
  return spec;
}

EvalConfig eval_config(const ClassifierSpec& spec, const EvalFlags& flags) {
  EvalConfig config;
  config.classifier = spec;
  config.k = flags.k;
  config.seed = flags.seed;
  config.stratified = !flags.no_stratify;
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string summary_line(const EvalReport& r) {
  return r.info.extractor + " + " + r.info.classifier + ": " + format_percent(r.mean) + " ± " +
         format_percent(r.std) + " % over " + std::to_string(r.k) + " folds";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void add_data_flags(CLI::App& cmd, DataFlags& flags) {
  cmd.add_option("--data", flags.root, "Dataset root (default: $TEXTUREBENCH_DATA)");
  cmd.add_option("--layout", flags.layout, "Label layout")
      ->check(CLI::IsMember({"subdirs", "prefix"}))
      ->capture_default_str();
  cmd.add_option("--resize", flags.resize, "Area-resample every image to WxH");
}

void add_eval_flags(CLI::App& cmd, EvalFlags& flags) {
  cmd.add_option("--k", flags.k, "Number of folds")->capture_default_str();
  cmd.add_option("--seed", flags.seed, "Seed for every random phase")->capture_default_str();
  cmd.add_flag("--no-stratify", flags.no_stratify, "Plain shuffled folds");
}

void add_clf_flags(CLI::App& cmd, ClfFlags& flags) {
  cmd.add_option("--clf", flags.clf, "Classifier: svm, tree or mlp")->capture_default_str();
  cmd.add_option("--svm-c", flags.svm_c, "SVM box constraint C");
  cmd.add_option("--svm-gamma", flags.svm_gamma, "RBF gamma");
  cmd.add_option("--mlp-lr", flags.mlp_lr, "Adam learning rate");
  cmd.add_option("--mlp-hidden", flags.mlp_hidden, "Hidden widths, comma-separated");
  cmd.add_option("--tree-max-depth", flags.tree_max_depth, "Depth limit, 0 for none");
  cmd.add_flag("--standardize", flags.standardize, "Z-score features with training statistics");
}

// Trains on every fold of one feature set; shared by eval and grid.
EvalReport evaluate(const FeatureMatrix& features, const ClassifierSpec& spec,
                    const EvalFlags& flags) {
  return run_evaluation(features, eval_config(spec, flags));
}

LearningCurve run_curve(const FeatureMatrix& features, const ClassifierSpec& spec,
                        const EvalFlags& flags, std::span<const double> fractions) {
  const auto encoded = encode_labels(features.labels);
  const auto plan = kfold_split(features.size(), encoded.ids, flags.k,
                                derive_seed(flags.seed, "folds"), !flags.no_stratify);
  return learning_curve(features.values, encoded.ids, make_trainer(spec), plan, fractions,
                        flags.seed);
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part, "fraction"));
  if (out.empty()) throw ParameterError("--fractions is empty");
  return out;
}

const char* kDefaultFractions = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";

int cmd_extract(const std::string& kind, const DataFlags& data, const LbpFlags& lbp,
                const HogFlags& hog, const std::string& out_path, std::ostream& out) {
  const auto spec = extractor_spec(parse_extractor(kind), lbp, hog);
  if (out_path.empty()) throw ParameterError("--out is required");
  const auto set = load(data);
  const auto start = std::chrono::steady_clock::now();
  const auto features = extract_features(set, spec);
  const double secs = seconds_since(start);
  write_features(out_path, features);
  char line[160];
  std::snprintf(line, sizeof line, "n=%zu d=%zu wall=%.2fs (%.1f ms/image)", features.size(),
                features.dim(), secs, 1000.0 * secs / static_cast<double>(features.size()));
  out << line << '\n';
  return 0;
}

int cmd_eval(const std::string& features_path, const ClfFlags& clf, const EvalFlags& flags,
             const std::string& out_dir, const std::string& save_model_path,
             const std::string& model_path, const std::string& replay_path, std::ostream& out) {
  if (features_path.empty()) throw ParameterError("--features is required");
  const auto features = read_features(features_path);

  if (!model_path.empty()) {
    const json j = read_json(model_path);
    const auto model = model_from_json(j);
    if (model->input_dim() != features.dim()) {
      throw ParameterError("model expects " + std::to_string(model->input_dim()) +
                           " features but " + features_path + " has " +
                           std::to_string(features.dim()));
    }
    const auto names = j.value("class_names", std::vector<std::string>{});
    const auto predicted = model->predict_batch(features.values);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const auto p = static_cast<std::size_t>(predicted[i]);
      if (p < names.size() && names[p] == features.labels[i]) ++correct;
    }
    out << "accuracy " << format_percent(100.0 * correct / static_cast<double>(features.size()))
        << " % on " << features.size() << " samples\n";
    return 0;
  }

  const auto report = replay_path.empty()
                          ? evaluate(features, classifier_spec(clf), flags)
                          : replay_evaluation(features, read_json(replay_path));
  if (!out_dir.empty()) {
    const EvalReport reports[] = {report};
    write_report(out_dir, render_report(reports));
    write_text(fs::path(out_dir) / "config.json", report.config.dump(2) + "\n");
  }
  if (!save_model_path.empty()) {
    const auto spec = replay_path.empty()
                          ? classifier_spec(clf)
                          : eval_config_from_json(report.config.at("eval")).classifier;
    const auto encoded = encode_labels(features.labels);
    const auto model = train_classifier(spec, features.values, encoded.ids,
                                        derive_seed(flags.seed, "final-model"));
    json j = model->to_json();
    j["class_names"] = encoded.names;
    write_text(save_model_path, j.dump() + "\n");
  }
  out << summary_line(report) << '\n';
  return 0;
}

struct GridCell {
  std::size_t feature_set;
  ClassifierKind classifier;
};

int cmd_grid(const DataFlags& data, const LbpFlags& lbp, const HogFlags& hog,
             const EvalFlags& flags, const std::string& deep_dir, const std::string& out_dir,
             bool curve, const std::string& fractions_text, int jobs, std::ostream& out) {
  if (out_dir.empty()) throw ParameterError("--out-dir is required");
  if (jobs < 1) throw ParameterError("--jobs must be at least 1");
  const auto fractions = parse_fractions(fractions_text);

  std::vector<FeatureMatrix> sets;
  std::vector<std::string> absent;
  {
    const auto images = load(data);
    for (const auto kind : {ExtractorKind::lbp, ExtractorKind::hog}) {
      auto features = extract_features(images, extractor_spec(kind, lbp, hog));
      write_features(fs::path(out_dir) / (features.meta.extractor + ".csv"), features);
      sets.push_back(std::move(features));
    }
  }
  for (const auto& layer : kDeepLayers) {
    const fs::path path = deep_dir.empty() ? fs::path() : fs::path(deep_dir) / (layer + ".csv");
    if (!deep_dir.empty() && fs::exists(path)) {
      sets.push_back(read_features(path));
    } else {
      absent.push_back("vgg19_" + layer);
    }
  }

  std::vector<GridCell> cells;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (const auto c : {ClassifierKind::svm, ClassifierKind::tree, ClassifierKind::mlp}) {
      cells.push_back({s, c});
    }
  }

  // Workers only fill their own slot; the coordinator writes every file afterwards.
  std::vector<std::optional<EvalReport>> reports(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        reports[i] = evaluate(sets[cells[i].feature_set], reference_spec(cells[i].classifier),
                              flags);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<EvalReport> done;
  json echoes = json::array();
  for (auto& r : reports) {
    out << summary_line(*r) << '\n';
    echoes.push_back(r->config);
    done.push_back(std::move(*r));
  }
  write_report(out_dir, render_report(done, absent));
  write_text(fs::path(out_dir) / "config.json", echoes.dump(2) + "\n");

  if (curve) {
    for (const auto& features : sets) {
      const auto c = run_curve(features, reference_spec(ClassifierKind::svm), flags, fractions);
      write_text(fs::path(out_dir) / ("curve_" + features.meta.extractor + "_svm.csv"),
                 curve_csv(c));
    }
  }
  for (const auto& a : absent) out << a << ": absent\n";
  return 0;
}

int cmd_curve(const std::string& features_path, const ClfFlags& clf, const EvalFlags& flags,
              const std::string& fractions_text, const std::string& out_path, std::ostream& out) {
  if (features_path.empty()) throw ParameterError("--features is required");
  if (out_path.empty()) throw ParameterError("--out is required");
  const auto features = read_features(features_path);
  const auto fractions = parse_fractions(fractions_text);
  const auto c = run_curve(features, classifier_spec(clf), flags, fractions);
  write_text(out_path, curve_csv(c));
  out << "wrote " << c.fractions.size() << " points to " << out_path << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Texture-feature classification benchmark", "texbench"};
  app.require_subcommand(1);

  DataFlags data;
  LbpFlags lbp;
  HogFlags hog;
  ClfFlags clf;
  EvalFlags eval_flags;
  std::string kind;
  std::string out_path;
  std::string out_dir;
  std::string features_path;
  std::string save_model_path;
  std::string model_path;
  std::string replay_path;
  std::string deep_dir;
  std::string fractions = kDefaultFractions;
  bool curve = false;
  int jobs = 1;

  auto* extract = app.add_subcommand("extract", "Extract LBP or HOG features to a feature file");
  extract->add_option("extractor", kind, "lbp or hog")
      ->required()
      ->check(CLI::IsMember({"lbp", "hog"}));
  add_data_flags(*extract, data);
  extract->add_option("--points", lbp.points, "LBP neighbors")->capture_default_str();
  extract->add_option("--radius", lbp.radius, "LBP radius")->capture_default_str();
  extract->add_flag("--normalize,!--no-normalize", lbp.normalize,
                    "L1-normalize LBP histograms (default: raw counts)");
  extract->add_option("--cell", hog.cell, "HOG cell size")->capture_default_str();
  extract->add_option("--block", hog.block, "HOG block size in cells")->capture_default_str();
  extract->add_option("--bins", hog.bins, "HOG orientation bins")->capture_default_str();
  extract->add_flag("--signed", hog.signed_orientation, "Signed HOG orientations");
  extract->add_option("--out", out_path, "Output feature file")->required();

  auto* eval = app.add_subcommand("eval", "Cross-validate one classifier on a feature file");
  eval->add_option("--features", features_path, "Feature file")->required();
  add_clf_flags(*eval, clf);
  add_eval_flags(*eval, eval_flags);
  eval->add_option("--out-dir", out_dir, "Directory for results, summary, table and config echo");
  eval->add_option("--save-model", save_model_path, "Also train on all samples and save the model");
  eval->add_option("--model", model_path, "Score a saved model on the feature file instead");
  eval->add_option("--replay", replay_path, "Rerun the configuration in a config echo");

  auto* grid = app.add_subcommand("grid", "Every feature set x classifier with reference settings");
  add_data_flags(*grid, data);
  add_eval_flags(*grid, eval_flags);
  grid->add_option("--points", lbp.points, "LBP neighbors")->capture_default_str();
  grid->add_option("--radius", lbp.radius, "LBP radius")->capture_default_str();
  grid->add_flag("--normalize,!--no-normalize", lbp.normalize, "L1-normalize LBP histograms");
  grid->add_option("--deep-dir", deep_dir, "Directory holding fc1.csv, block5_pool.csv, ...");
  grid->add_option("--out-dir", out_dir, "Output directory")->required();
  grid->add_flag("--curve", curve, "Also write SVM learning curves");
  grid->add_option("--fractions", fractions, "Learning-curve training fractions");
  grid->add_option("--jobs", jobs, "Grid cells run in parallel")->capture_default_str();

  auto* curve_cmd = app.add_subcommand("curve", "Learning curve for one classifier");
  curve_cmd->add_option("--features", features_path, "Feature file")->required();
  add_clf_flags(*curve_cmd, clf);
  add_eval_flags(*curve_cmd, eval_flags);
  curve_cmd->add_option("--fractions", fractions, "Training fractions")->capture_default_str();
  curve_cmd->add_option("--out", out_path, "Output CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*extract) return cmd_extract(kind, data, lbp, hog, out_path, out);
    if (*eval) {
      return cmd_eval(features_path, clf, eval_flags, out_dir, save_model_path, model_path,
                      replay_path, out);
    }
    if (*grid) {
      return cmd_grid(data, lbp, hog, eval_flags, deep_dir, out_dir, curve, fractions, jobs, out);
    }
    return cmd_curve(features_path, clf, eval_flags, fractions, out_path, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace texbench

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsir/classify.hpp"
#include "hsir/dataset_io.hpp"
#include "hsir/guided_filter.hpp"
#include "hsir/manifold.hpp"
#include "hsir/metrics.hpp"
#include "hsir/preprocess.hpp"
#include "hsir/scatter.hpp"
#include "hsir/semisup.hpp"
#include "hsir/trace_ratio.hpp"
#include "hsir/types.hpp"

namespace hsir {

enum class ClassifierKind { svm, nearest_neighbor };

inline std::string to_string(ClassifierKind k) { return k == ClassifierKind::svm ? "svm" : "1nn"; }
inline ClassifierKind parse_classifier(const std::string& s) {
  if (s == "svm") return ClassifierKind::svm;
  if (s == "1nn") return ClassifierKind::nearest_neighbor;
  throw FormatError("config: classifier must be \"svm\" or \"1nn\", got \"" + s + "\"");
}

inline std::string to_string(EdgeWeighting w) { return w == EdgeWeighting::binary ? "binary" : "heat"; }
inline EdgeWeighting parse_weighting(const std::string& s) {
  if (s == "binary") return EdgeWeighting::binary;
  if (s == "heat") return EdgeWeighting::heat;
  throw FormatError("config: semisup.weights must be \"binary\" or \"heat\", got \"" + s + "\"");
}

struct PipelineConfig {
  std::string dataset;
  bool normalize = true;

  struct Filter {
    bool enabled = true;
    FilterParams params;
  } filter;

  LinearityParams manifold;

  struct Scatter {
    double alpha = 0.4;
    double beta = 0.3;
    SpatialContext spatial;
  } scatter;

  struct Semisup {
    int k = 5;
    double gamma = 0.5;
    Index n_unlabeled = 2000;
    EdgeWeighting weights = EdgeWeighting::binary;
  } semisup;

  TraceRatioParams solver{30, 1e-8, 100};

  struct Eval {
    ClassifierKind classifier = ClassifierKind::svm;
    double reg = 1e-3;
    int epochs = 50;
  } eval;

  struct SplitCfg {
    double fraction = 0.10;
    Index min_per_class = 10;
    std::uint64_t seed = 0;
  } split;

  int runs = 5;

  void validate() const {
    filter.params.validate();
    manifold.validate();
    scatter.spatial.validate();
    if (!(scatter.alpha >= 0.0 && scatter.alpha <= 1.0)) throw ParameterError("config: alpha must lie in [0, 1]");
    if (!(scatter.beta >= 0.0 && scatter.beta <= 1.0)) throw ParameterError("config: beta must lie in [0, 1]");
    if (!(semisup.gamma >= 0.0 && semisup.gamma <= 1.0)) throw ParameterError("config: gamma must lie in [0, 1]");
    if (semisup.k < 1) throw ParameterError("config: knn must be >= 1");
    if (solver.dims < 1) throw ParameterError("config: dims must be >= 1");
    if (!(solver.tol > 0.0) || solver.max_iter < 1) throw ParameterError("config: bad solver tol/max_iter");
    if (!(eval.reg > 0.0) || eval.epochs < 1) throw ParameterError("config: bad classifier reg/epochs");
    if (!(split.fraction > 0.0 && split.fraction <= 1.0)) throw ParameterError("config: fraction must lie in (0, 1]");
    if (split.min_per_class < 1) throw ParameterError("config: min_per_class must be >= 1");
    if (runs < 1) throw ParameterError("config: runs must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Config (de)serialization

inline nlohmann::ordered_json to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["dataset"] = c.dataset;
  j["normalize"] = c.normalize;
  j["filter"] = {{"enabled", c.filter.enabled},
                 {"radius", c.filter.params.radius},
                 {"epsilon", c.filter.params.epsilon},
                 {"levels", c.filter.params.levels}};
  j["manifold"] = {{"theta", c.manifold.theta}, {"k_graph", c.manifold.k_graph}, {"min_patch", c.manifold.min_patch}};
  j["scatter"] = {{"alpha", c.scatter.alpha},
                  {"beta", c.scatter.beta},
                  {"window", c.scatter.spatial.window},
                  {"kernel_width", c.scatter.spatial.kernel_width ? nlohmann::ordered_json(*c.scatter.spatial.kernel_width)
                                                                  : nlohmann::ordered_json(nullptr)}};
  j["semisup"] = {{"k", c.semisup.k},
                  {"gamma", c.semisup.gamma},
                  {"n_unlabeled", c.semisup.n_unlabeled},
                  {"weights", to_string(c.semisup.weights)}};
  j["solver"] = {{"dims", c.solver.dims}, {"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}};
  j["eval"] = {{"classifier", to_string(c.eval.classifier)}, {"reg", c.eval.reg}, {"epochs", c.eval.epochs}};
  j["split"] = {{"fraction", c.split.fraction}, {"min_per_class", c.split.min_per_class}, {"seed", c.split.seed}};
  j["runs"] = c.runs;
  return j;
}

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(const nlohmann::json& root) : root_(root) {
    if (!root_.is_object()) throw FormatError("config: top level must be an object");
  }

  const nlohmann::json* section(const char* name) {
    if (!root_.contains(name)) return nullptr;
    const auto& s = root_.at(name);
    if (!s.is_object()) throw FormatError(std::string("config: '") + name + "' must be an object");
    return &s;
  }

  template <class T>
  static void get(const nlohmann::json* obj, const char* section, const char* key, T& out) {
    if (obj == nullptr || !obj->contains(key)) return;
    try {
      out = obj->at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw FormatError(std::string("config: bad value for '") + section + "." + key + "'");
    }
  }

  static void reject_unknown(const nlohmann::json* obj, const char* section, std::initializer_list<const char*> keys) {
    if (obj == nullptr) return;
    for (const auto& [k, v] : obj->items()) {
      bool known = false;
      for (const char* key : keys) known = known || k == key;
      if (!known) throw FormatError(std::string("config: unknown key '") + section + "." + k + "'");
    }
  }

  const nlohmann::json& root() const { return root_; }

 private:
  const nlohmann::json& root_;
};

}  // namespace detail

/// Missing keys keep their defaults; unknown keys are rejected.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  using R = detail::ConfigReader;
  PipelineConfig c;
  R reader(j);
  R::reject_unknown(&j, "", {"dataset", "normalize", "filter", "manifold", "scatter", "semisup", "solver", "eval",
                             "split", "runs"});
  R::get(&j, "", "dataset", c.dataset);
  R::get(&j, "", "normalize", c.normalize);
  R::get(&j, "", "runs", c.runs);

  const auto* f = reader.section("filter");
  R::reject_unknown(f, "filter", {"enabled", "radius", "epsilon", "levels"});
  R::get(f, "filter", "enabled", c.filter.enabled);
  R::get(f, "filter", "radius", c.filter.params.radius);
  R::get(f, "filter", "epsilon", c.filter.params.epsilon);
  R::get(f, "filter", "levels", c.filter.params.levels);

  const auto* m = reader.section("manifold");
  R::reject_unknown(m, "manifold", {"theta", "k_graph", "min_patch"});
  R::get(m, "manifold", "theta", c.manifold.theta);
  R::get(m, "manifold", "k_graph", c.manifold.k_graph);
  R::get(m, "manifold", "min_patch", c.manifold.min_patch);

  const auto* s = reader.section("scatter");
  R::reject_unknown(s, "scatter", {"alpha", "beta", "window", "kernel_width"});
  R::get(s, "scatter", "alpha", c.scatter.alpha);
  R::get(s, "scatter", "beta", c.scatter.beta);
  R::get(s, "scatter", "window", c.scatter.spatial.window);
  if (s != nullptr && s->contains("kernel_width") && !s->at("kernel_width").is_null()) {
    double kw = 0.0;
    R::get(s, "scatter", "kernel_width", kw);
    c.scatter.spatial.kernel_width = kw;
  }

  const auto* u = reader.section("semisup");
  R::reject_unknown(u, "semisup", {"k", "gamma", "n_unlabeled", "weights"});
  R::get(u, "semisup", "k", c.semisup.k);
  R::get(u, "semisup", "gamma", c.semisup.gamma);
  R::get(u, "semisup", "n_unlabeled", c.semisup.n_unlabeled);
  std::string weights = to_string(c.semisup.weights);
  R::get(u, "semisup", "weights", weights);
  c.semisup.weights = parse_weighting(weights);

  const auto* v = reader.section("solver");
  R::reject_unknown(v, "solver", {"dims", "tol", "max_iter"});
  R::get(v, "solver", "dims", c.solver.dims);
  R::get(v, "solver", "tol", c.solver.tol);
  R::get(v, "solver", "max_iter", c.solver.max_iter);

  const auto* e = reader.section("eval");
  R::reject_unknown(e, "eval", {"classifier", "reg", "epochs"});
  std::string classifier = to_string(c.eval.classifier);
  R::get(e, "eval", "classifier", classifier);
  c.eval.classifier = parse_classifier(classifier);
  R::get(e, "eval", "reg", c.eval.reg);
  R::get(e, "eval", "epochs", c.eval.epochs);

  const auto* p = reader.section("split");
  R::reject_unknown(p, "split", {"fraction", "min_per_class", "seed"});
  R::get(p, "split", "fraction", c.split.fraction);
  R::get(p, "split", "min_per_class", c.split.min_per_class);
  R::get(p, "split", "seed", c.split.seed);
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  const auto raw = detail::read_file(path);
  auto j = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
  if (j.is_discarded()) throw FormatError("config: " + path.string() + " is not valid JSON");
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Projection file: one line of JSON header, then rows*cols little-endian
// float64 in column-major order.

inline std::string encode_projection(const Projection& p) {
  nlohmann::ordered_json h;
  h["format"] = "hsir-projection";
  h["rows"] = p.matrix.rows();
  h["cols"] = p.matrix.cols();
  h["dtype"] = "f64le";
  h["order"] = "column-major";
  h["lambda_star"] = p.lambda_star;
  h["iterations"] = p.iterations;
  h["residual"] = p.residual;
  const std::span<const double> data(p.matrix.data(), static_cast<std::size_t>(p.matrix.size()));
  return h.dump() + "\n" + detail::encode_f64le(data);
}

inline Projection decode_projection(const std::vector<char>& bytes) {
  const auto nl = std::find(bytes.begin(), bytes.end(), '\n');
  if (nl == bytes.end()) throw FormatError("projection: missing header line");
  auto h = nlohmann::json::parse(bytes.begin(), nl, nullptr, false);
  if (h.is_discarded() || !h.is_object()) throw FormatError("projection: header is not a JSON object");
  for (const char* key : {"rows", "cols"})
    if (!h.contains(key) || !h[key].is_number_integer() || h[key].get<long long>() <= 0)
      throw FormatError(std::string("projection: bad or missing field '") + key + "'");
  if (h.value("dtype", "") != "f64le") throw FormatError("projection: field 'dtype' must be \"f64le\"");
  if (h.value("order", "") != "column-major") throw FormatError("projection: field 'order' must be \"column-major\"");
  const auto rows = h["rows"].get<Eigen::Index>(), cols = h["cols"].get<Eigen::Index>();
  const std::vector<char> payload(nl + 1, bytes.end());
  if (payload.size() != static_cast<std::size_t>(rows * cols * 8))
    throw IntegrityError("projection: header declares " + std::to_string(rows * cols) + " values, payload has " +
                         std::to_string(payload.size()) + " bytes");
  const auto values = detail::decode_f64le(payload);
  Projection p;
  p.matrix = Eigen::Map<const Matrix>(values.data(), rows, cols);
  p.lambda_star = h.value("lambda_star", 0.0);
  p.iterations = h.value("iterations", 0);
  p.residual = h.value("residual", 0.0);
  return p;
}

inline void save_projection(const std::filesystem::path& path, const Projection& p) {
  detail::write_file(path, encode_projection(p));
}

inline Projection load_projection(const std::filesystem::path& path) {
  return decode_projection(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// Pipeline

namespace detail {

template <class F>
auto run_stage(const std::string& name, const std::string& params, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, std::string(e.what()) + (params.empty() ? "" : " [" + params + "]"));
  }
}

inline std::string kv(const std::string& k, double v) {
  std::ostringstream os;
  os << k << "=" << v;
  return os.str();
}

}  // namespace detail

/// Loaded, normalized, filtered scene with its labeled samples.
struct PreparedScene {
  HsiCube cube;  // after normalization and filtering
  LabelMap labels;
  SampleSet samples;
};

inline PreparedScene prepare_scene(const Dataset& ds, const PipelineConfig& cfg) {
  if (!ds.labels) throw StageError("load", "dataset has no labels.bin");
  HsiCube cube = ds.cube;
  if (cfg.normalize) cube = detail::run_stage("normalize", "", [&] { return minmax_normalize(cube); });
  if (cfg.filter.enabled) {
    const auto& fp = cfg.filter.params;
    cube = detail::run_stage("hgf",
                             detail::kv("radius", fp.radius) + " " + detail::kv("epsilon", fp.epsilon) + " " +
                                 detail::kv("levels", fp.levels),
                             [&] { return hgf(cube, fp); });
  }
  SampleSet samples = detail::run_stage("flatten", "", [&] { return flatten(cube, *ds.labels); });
  return PreparedScene{std::move(cube), *ds.labels, std::move(samples)};
}

inline PreparedScene prepare_scene(const PipelineConfig& cfg) {
  const Dataset ds = detail::run_stage("load", "dataset=" + cfg.dataset, [&] { return load_cube(cfg.dataset); });
  return prepare_scene(ds, cfg);
}

inline Split make_split(const PreparedScene& scene, const PipelineConfig& cfg, std::uint64_t seed) {
  return detail::run_stage("split",
                           detail::kv("fraction", cfg.split.fraction) + " " +
                               detail::kv("n_unlabeled", static_cast<double>(cfg.semisup.n_unlabeled)) + " " +
                               detail::kv("seed", static_cast<double>(seed)),
                           [&] {
                             return stratified_split(scene.samples, SplitParams{cfg.split.fraction, cfg.split.min_per_class,
                                                                                cfg.semisup.n_unlabeled, seed});
                           });
}

struct FitResult {
  std::vector<Patch> patches;
  Projection projection;
};

/// Patches, scatters, Laplacian penalty and trace-ratio projection for one split.
inline FitResult fit_projection(const PreparedScene& scene, const Split& split, const PipelineConfig& cfg) {
  const SampleSet labeled = scene.samples.subset(split.labeled_idx);
  FitResult out;
  out.patches = detail::run_stage(
      "patches",
      detail::kv("theta", cfg.manifold.theta) + " " + detail::kv("k_graph", cfg.manifold.k_graph) + " " +
          detail::kv("min_patch", static_cast<double>(cfg.manifold.min_patch)),
      [&] { return build_patches(labeled, cfg.manifold); });
  const PatchPairing pairing = detail::run_stage("pairing", "", [&] { return pair_patches(out.patches); });
  const ScatterPair spectral = detail::run_stage("mlsc", "", [&] { return mlsc_scatter(labeled, out.patches, pairing); });
  const ScatterPair regularized = detail::run_stage("rmlsc", detail::kv("alpha", cfg.scatter.alpha), [&] {
    return regularize_spectral(spectral, labeled, cfg.scatter.alpha);
  });
  const ScatterPair fused = detail::run_stage("npmlsc+fuse",
                                              detail::kv("window", cfg.scatter.spatial.window) + " " +
                                                  detail::kv("beta", cfg.scatter.beta),
                                              [&] {
                                                if (cfg.scatter.beta == 1.0) return regularized;
                                                const ScatterPair spatial = npmlsc_scatter(
                                                    out.patches, pairing, labeled, scene.cube, cfg.scatter.spatial);
                                                return fuse(regularized, spatial, cfg.scatter.beta);
                                              });

  std::vector<Index> train_idx = split.labeled_idx;
  train_idx.insert(train_idx.end(), split.unlabeled_idx.begin(), split.unlabeled_idx.end());
  const Objective objective = detail::run_stage(
      "semisup", detail::kv("k", cfg.semisup.k) + " " + detail::kv("gamma", cfg.semisup.gamma), [&] {
        const auto dim = fused.total.rows();
        if (cfg.semisup.gamma == 0.0) return assemble_objective(fused, Matrix::Zero(dim, dim), 0.0);
        const SampleSet all_train = scene.samples.subset(train_idx);
        const Graph g = knn_adjacency(all_train.spectra, cfg.semisup.k, cfg.semisup.weights);
        const Matrix penalty = semisup_penalty(all_train.spectra, laplacian(g));
        return assemble_objective(fused, penalty, cfg.semisup.gamma);
      });
  out.projection = detail::run_stage(
      "trace_ratio",
      detail::kv("dims", static_cast<double>(cfg.solver.dims)) + " " + detail::kv("tol", cfg.solver.tol) + " " +
          detail::kv("max_iter", cfg.solver.max_iter),
      [&] { return trace_ratio_dnm(objective, cfg.solver); });
  return out;
}

/// Trains the configured classifier on `train` and labels `query`.
inline std::vector<int> classify(const SampleSet& train, const Matrix& query, const PipelineConfig& cfg,
                                 std::uint64_t seed) {
  return detail::run_stage("classify", "classifier=" + to_string(cfg.eval.classifier), [&] {
    if (cfg.eval.classifier == ClassifierKind::nearest_neighbor) return predict_1nn(train, query);
    const LinearModel model = train_linear_ovr(train, LinearTrainParams{cfg.eval.reg, cfg.eval.epochs, seed});
    return predict(model, query);
  });
}

struct RunResult {
  std::uint64_t seed = 0;
  Index train_size = 0;
  Index test_size = 0;
  Index unlabeled_size = 0;
  std::vector<Index> train_per_class;
  std::vector<Index> test_per_class;
  Index patch_count = 0;
  Projection projection;
  Metrics metrics;
  std::vector<int> map;  // predicted class per pixel, 0 off ground truth
};

/// One seed end to end. A supplied projection replaces the fitted one.
inline RunResult run_once(const PreparedScene& scene, const PipelineConfig& cfg, std::uint64_t seed,
                          const std::optional<Projection>& fixed = std::nullopt) {
  const Split split = make_split(scene, cfg, seed);
  FitResult fit;
  if (fixed) {
    if (fixed->input_dim() != scene.samples.dim())
      throw StageError("project", "projection expects dim " + std::to_string(fixed->input_dim()) + ", scene has " +
                                      std::to_string(scene.samples.dim()));
    fit.projection = *fixed;
  } else {
    fit = fit_projection(scene, split, cfg);
  }

  const SampleSet train = project(scene.samples.subset(split.labeled_idx), fit.projection);
  const SampleSet all = project(scene.samples, fit.projection);
  const std::vector<int> predicted_all = classify(train, all.spectra, cfg, seed);

  const int k = scene.labels.classes();
  RunResult r;
  r.seed = seed;
  r.train_size = split.labeled_idx.size();
  r.test_size = split.test_idx.size();
  r.unlabeled_size = split.unlabeled_idx.size();
  r.train_per_class.assign(static_cast<std::size_t>(k), 0);
  r.test_per_class.assign(static_cast<std::size_t>(k), 0);
  for (Index i : split.labeled_idx) ++r.train_per_class[static_cast<std::size_t>(scene.samples.label(i) - 1)];
  std::vector<int> truth, predicted;
  for (Index i : split.test_idx) {
    ++r.test_per_class[static_cast<std::size_t>(scene.samples.label(i) - 1)];
    truth.push_back(scene.samples.label(i));
    predicted.push_back(predicted_all[i]);
  }
  r.patch_count = fit.patches.size();
  r.metrics = detail::run_stage("evaluate", "", [&] { return evaluate(truth, predicted, k); });
  r.map.assign(scene.labels.rows() * scene.labels.cols(), 0);
  for (Index i = 0; i < scene.samples.size(); ++i) {
    const auto& c = scene.samples.coords[i];
    r.map[c.row * scene.labels.cols() + c.col] = predicted_all[i];
  }
  r.projection = std::move(fit.projection);
  return r;
}

struct RunReport {
  PipelineConfig config;
  int classes = 0;
  Index rows = 0, cols = 0;
  std::vector<RunResult> runs;  // in seed order
};

inline std::vector<std::uint64_t> run_seeds(const PipelineConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < cfg.runs; ++r) seeds.push_back(cfg.split.seed + static_cast<std::uint64_t>(r));
  return seeds;
}

/// Runs every seed (concurrently, up to the hardware thread count) and
/// assembles results in seed order.
inline RunReport run_pipeline(const PreparedScene& scene, const PipelineConfig& cfg,
                              const std::optional<Projection>& fixed = std::nullopt) {
  cfg.validate();
  RunReport report{cfg, scene.labels.classes(), scene.labels.rows(), scene.labels.cols(), {}};
  const auto seeds = run_seeds(cfg);
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < seeds.size(); start += width) {
    std::vector<std::future<RunResult>> batch;
    for (std::size_t i = start; i < std::min(seeds.size(), start + width); ++i)
      batch.push_back(std::async(std::launch::async, [&scene, &cfg, &fixed, seed = seeds[i]] {
        return run_once(scene, cfg, seed, fixed);
      }));
    for (auto& f : batch) report.runs.push_back(f.get());
  }
  return report;
}

inline RunReport run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  return run_pipeline(prepare_scene(cfg), cfg);
}

// ---------------------------------------------------------------------------
// Report artifacts

namespace detail {

inline nlohmann::ordered_json nullable(double v) {
  return std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v);
}

inline nlohmann::ordered_json accuracy_list(const std::vector<double>& v) {
  auto a = nlohmann::ordered_json::array();
  for (double x : v) a.push_back(nullable(x));
  return a;
}

// Mean over runs, skipping NaN entries.
inline double nan_mean(const std::vector<double>& v) {
  double s = 0.0;
  int n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      s += x;
      ++n;
    }
  return n > 0 ? s / n : std::nan("");
}

inline std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace detail

struct MeanMetrics {
  double overall_accuracy = 0.0;
  double average_accuracy = 0.0;
  double kappa = 0.0;
  std::vector<double> per_class_accuracy;
};

inline MeanMetrics mean_metrics(const RunReport& report) {
  MeanMetrics m;
  std::vector<double> oa, aa, ka;
  for (const auto& r : report.runs) {
    oa.push_back(r.metrics.overall_accuracy);
    aa.push_back(r.metrics.average_accuracy);
    ka.push_back(r.metrics.kappa);
  }
  m.overall_accuracy = detail::nan_mean(oa);
  m.average_accuracy = detail::nan_mean(aa);
  m.kappa = detail::nan_mean(ka);
  for (int c = 0; c < report.classes; ++c) {
    std::vector<double> ca;
    for (const auto& r : report.runs) ca.push_back(r.metrics.per_class_accuracy[static_cast<std::size_t>(c)]);
    m.per_class_accuracy.push_back(detail::nan_mean(ca));
  }
  return m;
}

inline nlohmann::ordered_json report_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["config"] = to_json(report.config);
  auto seeds = nlohmann::ordered_json::array();
  for (const auto& r : report.runs) seeds.push_back(r.seed);
  j["seeds"] = seeds;
  j["classes"] = report.classes;
  auto runs = nlohmann::ordered_json::array();
  for (const auto& r : report.runs) {
    nlohmann::ordered_json o;
    o["seed"] = r.seed;
    o["train_size"] = r.train_size;
    o["test_size"] = r.test_size;
    o["unlabeled_size"] = r.unlabeled_size;
    o["patches"] = r.patch_count;
    o["lambda_star"] = r.projection.lambda_star;
    o["solver_iterations"] = r.projection.iterations;
    o["overall_accuracy"] = r.metrics.overall_accuracy;
    o["average_accuracy"] = r.metrics.average_accuracy;
    o["kappa"] = r.metrics.kappa;
    o["per_class_accuracy"] = detail::accuracy_list(r.metrics.per_class_accuracy);
    o["confusion"] = r.metrics.confusion;
    runs.push_back(std::move(o));
  }
  j["runs"] = runs;
  const MeanMetrics m = mean_metrics(report);
  j["mean"] = {{"overall_accuracy", m.overall_accuracy},
               {"average_accuracy", m.average_accuracy},
               {"kappa", m.kappa},
               {"per_class_accuracy", detail::accuracy_list(m.per_class_accuracy)}};
  return j;
}

/// Per-class table in percent: class, train size, test size, one column per run, mean.
inline std::string report_csv(const RunReport& report) {
  std::ostringstream os;
  os << "class,train_size,test_size";
  for (const auto& r : report.runs) os << ",seed_" << r.seed;
  os << ",mean\n";
  const MeanMetrics m = mean_metrics(report);
  for (int c = 0; c < report.classes; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    os << c + 1 << "," << report.runs.front().train_per_class[ci] << "," << report.runs.front().test_per_class[ci];
    for (const auto& r : report.runs) os << "," << detail::fixed(100.0 * r.metrics.per_class_accuracy[ci]);
    os << "," << detail::fixed(100.0 * m.per_class_accuracy[ci]) << "\n";
  }
  const auto summary = [&](const char* name, auto get, double mean) {
    os << name << ",,";
    for (const auto& r : report.runs) os << "," << detail::fixed(100.0 * get(r.metrics));
    os << "," << detail::fixed(100.0 * mean) << "\n";
  };
  summary("OA", [](const Metrics& x) { return x.overall_accuracy; }, m.overall_accuracy);
  summary("AA", [](const Metrics& x) { return x.average_accuracy; }, m.average_accuracy);
  summary("kappa", [](const Metrics& x) { return x.kappa; }, m.kappa);
  return os.str();
}

/// metrics.json, metrics.csv, map.ppm and projection.bin (the latter two from the first run).
inline void write_report(const std::filesystem::path& out_dir, const RunReport& report) {
  std::filesystem::create_directories(out_dir);
  detail::write_file(out_dir / "metrics.json", report_json(report).dump(2) + "\n");
  detail::write_file(out_dir / "metrics.csv", report_csv(report));
  const auto& first = report.runs.front();
  detail::write_file(out_dir / "map.ppm", render_map(first.map, report.rows, report.cols, report.classes));
  save_projection(out_dir / "projection.bin", first.projection);
}

}  // namespace hsir

// Command-line front end: synth, filter, patches, reduce, classify, run.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hsir/hsir.hpp"

namespace {

namespace fs = std::filesystem;

/// Flags that override config-file values when given.
struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> dataset;
  std::optional<double> alpha, beta, gamma, epsilon, theta, kernel_width, fraction, tol, reg;
  std::optional<int> knn, window, radius, levels, k_graph, max_iter, epochs, runs;
  std::optional<hsir::Index> dims, min_patch, n_unlabeled, min_per_class;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> classifier, weights;
  bool no_filter = false;
  bool no_normalize = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--dataset", dataset, "dataset container directory");
    app->add_option("--alpha", alpha, "spectral regularization weight");
    app->add_option("--beta", beta, "spectral vs spatial fusion weight");
    app->add_option("--gamma", gamma, "Laplacian penalty weight");
    app->add_option("--knn", knn, "neighbours in the semi-supervised graph");
    app->add_option("--window", window, "spatial window side (odd)");
    app->add_option("--dims", dims, "output dimension");
    app->add_option("--seed", seed, "base seed; run r uses seed + r");
    app->add_option("--runs", runs, "number of seeds");
    app->add_flag("--no-filter", no_filter, "skip hierarchical guided filtering");
    app->add_flag("--no-normalize", no_normalize, "skip per-band min-max scaling");
    app->add_option("--classifier", classifier, "svm or 1nn")->check(CLI::IsMember({"svm", "1nn"}));
    app->add_option("--radius", radius, "guided filter radius");
    app->add_option("--epsilon", epsilon, "guided filter regularizer");
    app->add_option("--levels", levels, "guided filter hierarchy depth");
    app->add_option("--theta", theta, "linear patch tolerance");
    app->add_option("--k-graph", k_graph, "neighbours in the geodesic graph");
    app->add_option("--min-patch", min_patch, "patch size below which no split happens");
    app->add_option("--kernel-width", kernel_width, "spatial weight kernel width override");
    app->add_option("--unlabeled", n_unlabeled, "unlabeled samples drawn from the test set");
    app->add_option("--graph-weights", weights, "binary or heat")->check(CLI::IsMember({"binary", "heat"}));
    app->add_option("--fraction", fraction, "labeled fraction per class");
    app->add_option("--min-per-class", min_per_class, "labeled floor per class");
    app->add_option("--tol", tol, "trace-ratio tolerance relative to tr(T)");
    app->add_option("--max-iter", max_iter, "trace-ratio iteration cap");
    app->add_option("--reg", reg, "linear classifier L2 strength");
    app->add_option("--epochs", epochs, "linear classifier epochs");
  }

  hsir::PipelineConfig resolve() const {
    hsir::PipelineConfig c = config_path ? hsir::load_config(*config_path) : hsir::PipelineConfig{};
    if (dataset) c.dataset = *dataset;
    if (alpha) c.scatter.alpha = *alpha;
    if (beta) c.scatter.beta = *beta;
    if (gamma) c.semisup.gamma = *gamma;
    if (knn) c.semisup.k = *knn;
    if (window) c.scatter.spatial.window = *window;
    if (dims) c.solver.dims = *dims;
    if (seed) c.split.seed = *seed;
    if (runs) c.runs = *runs;
    if (no_filter) c.filter.enabled = false;
    if (no_normalize) c.normalize = false;
    if (classifier) c.eval.classifier = hsir::parse_classifier(*classifier);
    if (radius) c.filter.params.radius = *radius;
    if (epsilon) c.filter.params.epsilon = *epsilon;
    if (levels) c.filter.params.levels = *levels;
    if (theta) c.manifold.theta = *theta;
    if (k_graph) c.manifold.k_graph = *k_graph;
    if (min_patch) c.manifold.min_patch = *min_patch;
    if (kernel_width) c.scatter.spatial.kernel_width = *kernel_width;
    if (n_unlabeled) c.semisup.n_unlabeled = *n_unlabeled;
    if (weights) c.semisup.weights = hsir::parse_weighting(*weights);
    if (fraction) c.split.fraction = *fraction;
    if (min_per_class) c.split.min_per_class = *min_per_class;
    if (tol) c.solver.tol = *tol;
    if (max_iter) c.solver.max_iter = *max_iter;
    if (reg) c.eval.reg = *reg;
    if (epochs) c.eval.epochs = *epochs;
    if (c.dataset.empty()) throw hsir::FormatError("no dataset given (--dataset or config 'dataset')");
    c.validate();
    return c;
  }
};

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  hsir::detail::write_file(path, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral dimensionality reduction with patch scaling cuts"};
  app.require_subcommand(1);

  std::string out_dir = "out";

  hsir::SynthParams synth;
  std::string synth_kind = "two_moons_cube";
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic labeled dataset");
  synth_cmd->add_option("--kind", synth_kind, "two_moons_cube | swiss_patch_cube | gaussian_blobs_cube")
      ->check(CLI::IsMember({"two_moons_cube", "swiss_patch_cube", "gaussian_blobs_cube"}));
  synth_cmd->add_option("--rows", synth.rows);
  synth_cmd->add_option("--cols", synth.cols);
  synth_cmd->add_option("--bands", synth.bands);
  synth_cmd->add_option("--noise", synth.noise);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--classes", synth.classes, "classes (gaussian_blobs_cube only)");
  synth_cmd->add_option("--regions", synth.regions, "Voronoi regions in the class layout");
  synth_cmd->add_option("--out", out_dir, "output dataset directory")->required();

  Overrides filter_o, patches_o, reduce_o, classify_o, run_o;
  std::string projection_path;
  auto* filter_cmd = app.add_subcommand("filter", "normalize + hierarchical guided filter, written as a dataset");
  auto* patches_cmd = app.add_subcommand("patches", "maximal linear patches and pairing for the first seed");
  auto* reduce_cmd = app.add_subcommand("reduce", "learn the projection for the first seed");
  auto* classify_cmd = app.add_subcommand("classify", "classify with a saved projection over all seeds");
  auto* run_cmd = app.add_subcommand("run", "full pipeline over all seeds");
  for (auto [cmd, o] : {std::pair{filter_cmd, &filter_o}, std::pair{patches_cmd, &patches_o},
                        std::pair{reduce_cmd, &reduce_o}, std::pair{classify_cmd, &classify_o},
                        std::pair{run_cmd, &run_o}}) {
    o->attach(cmd);
    cmd->add_option("--out", out_dir, "output directory");
  }
  classify_cmd->add_option("--projection", projection_path, "projection.bin from reduce or run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) {
      synth.kind = hsir::parse_synth_kind(synth_kind);
      const auto ds = hsir::synth_dataset(synth);
      hsir::save_cube(out_dir, ds.cube, ds.labels);
      std::cout << "wrote " << synth_kind << " " << ds.cube.rows() << "x" << ds.cube.cols() << "x" << ds.cube.bands()
                << " to " << out_dir << "\n";
    } else if (*filter_cmd) {
      const auto cfg = filter_o.resolve();
      const auto scene = hsir::prepare_scene(cfg);
      hsir::save_cube(out_dir, scene.cube, scene.labels);
      std::cout << "wrote filtered cube to " << out_dir << "\n";
    } else if (*patches_cmd) {
      const auto cfg = patches_o.resolve();
      const auto scene = hsir::prepare_scene(cfg);
      const auto split = hsir::make_split(scene, cfg, cfg.split.seed);
      const auto labeled = scene.samples.subset(split.labeled_idx);
      const auto patches = hsir::build_patches(labeled, cfg.manifold);
      const auto pairing = hsir::pair_patches(patches);
      nlohmann::ordered_json j;
      j["config"] = hsir::to_json(cfg);
      j["seed"] = cfg.split.seed;
      auto arr = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k < patches.size(); ++k) {
        nlohmann::ordered_json p;
        p["class"] = patches[k].class_id;
        p["partner"] = pairing[k];
        auto px = nlohmann::ordered_json::array();
        for (auto m : patches[k].members) px.push_back({labeled.coords[m].row, labeled.coords[m].col});
        p["pixels"] = px;
        arr.push_back(std::move(p));
      }
      j["patches"] = arr;
      fs::create_directories(out_dir);
      write_json(fs::path(out_dir) / "patches.json", j);
      std::cout << patches.size() << " patches written to " << out_dir << "/patches.json\n";
    } else if (*reduce_cmd) {
      const auto cfg = reduce_o.resolve();
      const auto scene = hsir::prepare_scene(cfg);
      const auto split = hsir::make_split(scene, cfg, cfg.split.seed);
      const auto fit = hsir::fit_projection(scene, split, cfg);
      fs::create_directories(out_dir);
      hsir::save_projection(fs::path(out_dir) / "projection.bin", fit.projection);
      nlohmann::ordered_json j;
      j["config"] = hsir::to_json(cfg);
      j["seed"] = cfg.split.seed;
      j["patches"] = fit.patches.size();
      j["lambda_star"] = fit.projection.lambda_star;
      j["iterations"] = fit.projection.iterations;
      j["residual"] = fit.projection.residual;
      j["lambda_history"] = fit.projection.lambda_history;
      write_json(fs::path(out_dir) / "reduce.json", j);
      std::cout << "lambda* = " << fit.projection.lambda_star << " after " << fit.projection.iterations
                << " iterations; projection written to " << out_dir << "/projection.bin\n";
    } else if (*classify_cmd || *run_cmd) {
      const auto cfg = (*run_cmd ? run_o : classify_o).resolve();
      std::optional<hsir::Projection> fixed;
      if (*classify_cmd) fixed = hsir::load_projection(projection_path);
      const auto scene = hsir::prepare_scene(cfg);
      const auto report = hsir::run_pipeline(scene, cfg, fixed);
      hsir::write_report(out_dir, report);
      const auto m = hsir::mean_metrics(report);
      std::cout << "OA " << 100.0 * m.overall_accuracy << "  AA " << 100.0 * m.average_accuracy << "  kappa "
                << m.kappa << " over " << report.runs.size() << " runs; report in " << out_dir << "\n";
    }
  } catch (const hsir::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

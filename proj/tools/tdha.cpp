// tdha: command-line harness for few-shot evaluation on embedding bundles.
//
//   tdha eval            --bundle DIR [--shots 1,2,4,8,16] [--episodes 3] ...
//   tdha ablate          --bundle DIR [--rows components|polarity] ...
//   tdha sweep           --bundle DIR --param alpha [--grid 0:2:0.4] ...
//   tdha compare-metric  --bundle DIR ...
//   tdha synth           --output DIR [--dim 32] [--noise 0.35] ...
//   tdha geom-check      [--inject-fault negate-distance]
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant
// violation (including a failing geom-check).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tdha/data.hpp"
#include "tdha/error.hpp"
#include "tdha/geometry_check.hpp"
#include "tdha/harness.hpp"
#include "tdha/report.hpp"

namespace {

using namespace tdha;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalFlags {
  std::string bundle;
  std::string test_bundle;
  std::vector<std::size_t> shots{1, 2, 4, 8, 16};
  std::size_t episodes = 3;
  std::uint64_t seed = 1;
  double alpha = 1.2;
  double epsilon = 5.0;
  double tau = 0.01;
  double scale = 0.5;
  std::string components = "iip+,iip-,itp+,itp-";
  std::string neg_mean = "ambient";
  std::string metric = "hd";
  std::string text_aggregation = "normalized";
  std::string output;
  std::string format = "json";
  unsigned threads = 0;
};

void add_eval_flags(CLI::App& cmd, EvalFlags& f) {
  cmd.add_option("--bundle", f.bundle, "Embedding bundle directory")->required();
  cmd.add_option("--test-bundle", f.test_bundle, "Evaluate on this bundle's test split instead");
  cmd.add_option("--shots", f.shots, "Shot counts, comma separated")->delimiter(',');
  cmd.add_option("--episodes", f.episodes, "Episodes per shot count");
  cmd.add_option("--seed", f.seed, "Base seed for episode sampling");
  cmd.add_option("--alpha", f.alpha, "Weight of the image-image branch");
  cmd.add_option("--epsilon", f.epsilon, "Image-image temperature");
  cmd.add_option("--tau", f.tau, "Text softmax temperature");
  cmd.add_option("--scale", f.scale, "Norm of preprocessed image features");
  cmd.add_option("--components", f.components, "Comma list of iip+,iip-,itp+,itp-");
  cmd.add_option("--neg-mean", f.neg_mean, "Negative prototype mean")
      ->check(CLI::IsMember({"ambient", "tangent"}));
  cmd.add_option("--metric", f.metric, "Image-image similarity")->check(CLI::IsMember({"hd", "ecs"}));
  cmd.add_option("--text-aggregation", f.text_aggregation, "Prompt ensembling")
      ->check(CLI::IsMember({"normalized", "raw"}));
  cmd.add_option("--output", f.output, "Report file");
  cmd.add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv", "md"}));
  cmd.add_option("--threads", f.threads, "Worker threads (default: $TDHA_THREADS or 1)");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TDHA_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("TDHA_THREADS must be a positive integer");
  }
  return 1;
}

harness::EvalOptions to_options(const EvalFlags& f) {
  harness::EvalOptions o;
  try {
    o.shots = f.shots;
    o.episodes = f.episodes;
    o.seed = f.seed;
    o.fusion.alpha = f.alpha;
    o.fusion.epsilon = f.epsilon;
    o.fusion.tau = f.tau;
    o.fusion.components = ComponentSet::parse(f.components);
    o.fusion.metric = parse_image_metric(f.metric);
    o.scale = f.scale;
    o.neg_mean = parse_mean_mode(f.neg_mean);
    o.text_aggregation =
        f.text_aggregation == "raw" ? AggregateMode::raw : AggregateMode::normalized;
    o.threads = resolve_threads(f.threads);
    o.validate();
  } catch (const InvalidInputError& e) {
    throw UsageError(e.what());
  }
  return o;
}

harness::Evaluator load_evaluator(const EvalFlags& f) {
  EmbeddingBundle source = read_bundle(f.bundle);
  for (const auto& w : source.warnings()) std::cerr << "warning: " << w << '\n';
  std::optional<EmbeddingBundle> target;
  if (!f.test_bundle.empty()) target = read_bundle(f.test_bundle);
  return harness::Evaluator(std::move(source), std::move(target));
}

void emit(const report::Document& doc, const EvalFlags& f) {
  std::cout << report::to_markdown(doc);
  if (f.output.empty()) return;
  std::ofstream out(f.output, std::ios::trunc);
  if (!out) throw IoError("cannot write " + f.output);
  out << report::render(doc, report::parse_format(f.format));
  if (!out) throw IoError("write failed: " + f.output);
}

report::Document make_doc(std::string command, const EvalFlags& f) {
  report::Document doc;
  doc.command = std::move(command);
  doc.bundle = f.bundle;
  doc.test_bundle = f.test_bundle;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training-free dual hyperbolic adapter: few-shot evaluation harness"};
  app.require_subcommand(1);

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Few-shot evaluation over seeded episodes");
  add_eval_flags(*eval, eval_flags);

  EvalFlags ablate_flags;
  std::string ablate_rows = "components";
  auto* ablate = app.add_subcommand("ablate", "Cumulative stream ablation with paired episodes");
  add_eval_flags(*ablate, ablate_flags);
  ablate->add_option("--rows", ablate_rows, "Row set")
      ->check(CLI::IsMember({"components", "polarity"}));

  EvalFlags sweep_flags;
  std::string sweep_param = "alpha";
  std::string sweep_grid;
  auto* sweep = app.add_subcommand("sweep", "Accuracy versus alpha, epsilon or scale");
  add_eval_flags(*sweep, sweep_flags);
  sweep->add_option("--param", sweep_param, "Parameter to sweep")
      ->check(CLI::IsMember({"alpha", "epsilon", "scale"}));
  sweep->add_option("--grid", sweep_grid, "start:stop:step (default grid per parameter)");

  EvalFlags compare_flags;
  auto* compare = app.add_subcommand("compare-metric",
                                     "Hyperbolic distance vs cosine similarity in image streams");
  add_eval_flags(*compare, compare_flags);

  SyntheticSpec synth_spec;
  std::string synth_output;
  auto* synth = app.add_subcommand("synth", "Write a synthetic hierarchical bundle");
  synth->add_option("--output", synth_output, "Bundle directory")->required();
  synth->add_option("--supers", synth_spec.super_count, "Superclass count");
  synth->add_option("--classes-per-super", synth_spec.classes_per_super, "Subclasses per superclass");
  synth->add_option("--dim", synth_spec.dim, "Embedding dimension (>= 2)");
  synth->add_option("--noise", synth_spec.noise_sigma, "Image noise RMS norm (relative to unit class means)");
  synth->add_option("--modality-gap", synth_spec.modality_gap, "Text offset RMS norm (relative to unit class means)");
  synth->add_option("--branch-spread", synth_spec.branch_spread,
                    "Sibling offset as a fraction of superclass separation, in [0, 1)");
  synth->add_option("--train-per-class", synth_spec.train_per_class, "Train samples per class");
  synth->add_option("--test-per-class", synth_spec.test_per_class, "Test samples per class");
  synth->add_option("--seed", synth_spec.seed, "Generator seed");

  std::string geom_fault = "none";
  std::string geom_output;
  std::string geom_format = "md";
  auto* geom = app.add_subcommand("geom-check", "Run the Poincare ball invariant suite");
  geom->add_option("--inject-fault", geom_fault, "Self-test: corrupt the distance under test")
      ->check(CLI::IsMember({"none", "negate-distance"}));
  geom->add_option("--output", geom_output, "Report file");
  geom->add_option("--format", geom_format, "Report format")->check(CLI::IsMember({"json", "md"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (eval->parsed()) {
      const auto options = to_options(eval_flags);
      const auto evaluator = load_evaluator(eval_flags);
      const auto result = evaluator.run(options);
      auto doc = make_doc("eval", eval_flags);
      doc.rows.push_back({options.fusion.components.to_string(), std::nullopt, &result});
      emit(doc, eval_flags);
    } else if (ablate->parsed()) {
      const auto options = to_options(ablate_flags);
      const auto evaluator = load_evaluator(ablate_flags);
      const auto rows = harness::run_ablation(evaluator, options,
                                              ablate_rows == "polarity"
                                                  ? harness::polarity_ablation_rows()
                                                  : harness::component_ablation_rows());
      auto doc = make_doc("ablate", ablate_flags);
      for (const auto& r : rows) doc.rows.push_back({r.label, std::nullopt, &r.report});
      emit(doc, ablate_flags);
    } else if (sweep->parsed()) {
      const auto options = to_options(sweep_flags);
      harness::SweepParameter param{};
      std::vector<double> grid;
      try {
        param = harness::parse_sweep_parameter(sweep_param);
        grid = sweep_grid.empty() ? harness::default_grid(param) : harness::parse_grid(sweep_grid);
      } catch (const InvalidInputError& e) {
        throw UsageError(e.what());
      }
      const auto evaluator = load_evaluator(sweep_flags);
      const auto points = harness::run_sweep(evaluator, options, param, grid);
      auto doc = make_doc("sweep", sweep_flags);
      doc.parameter = harness::to_string(param);
      for (const auto& p : points) {
        doc.rows.push_back({doc.parameter + "=" + std::to_string(p.value), p.value, &p.report});
      }
      emit(doc, sweep_flags);
    } else if (compare->parsed()) {
      const auto options = to_options(compare_flags);
      const auto evaluator = load_evaluator(compare_flags);
      const auto cmp = harness::run_compare_metric(evaluator, options);
      auto doc = make_doc("compare-metric", compare_flags);
      doc.rows.push_back({"hd", std::nullopt, &cmp.hyperbolic});
      doc.rows.push_back({"ecs", std::nullopt, &cmp.cosine});
      emit(doc, compare_flags);
    } else if (synth->parsed()) {
      EmbeddingBundle bundle;
      try {
        bundle = generate_synthetic(synth_spec);
      } catch (const InvalidInputError& e) {
        throw UsageError(e.what());
      }
      write_bundle(bundle, synth_output);
      std::cout << "wrote " << bundle.class_count() << " classes, dim " << bundle.dim << ", "
                << bundle.train.features.rows << " train / " << bundle.test.features.rows
                << " test rows to " << synth_output << '\n';
    } else if (geom->parsed()) {
      GeometryCheckOptions options;
      if (geom_fault == "negate-distance") {
        options.distance = [](const BallPoint& a, const BallPoint& b) { return -distance(a, b); };
      }
      const auto result = run_geometry_checks(options);
      std::cout << report::to_markdown(result);
      if (!geom_output.empty()) {
        std::ofstream out(geom_output, std::ios::trunc);
        if (!out) throw IoError("cannot write " + geom_output);
        out << (geom_format == "json" ? report::to_json(result).dump(2) + "\n"
                                      : report::to_markdown(result));
      }
      if (!result.passed()) {
        std::cerr << "geom-check: FAILED\n";
        return kExitInternal;
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvariantViolation& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return kExitInternal;
  } catch (const ConvergenceError& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return kExitInternal;
  } catch (const DomainError& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}

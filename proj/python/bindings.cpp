#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tdha/data.hpp"
#include "tdha/error.hpp"
#include "tdha/geometry_check.hpp"
#include "tdha/harness.hpp"
#include "tdha/inference.hpp"
#include "tdha/poincare.hpp"
#include "tdha/prototype.hpp"
#include "tdha/report.hpp"
#include "tdha/textbank.hpp"

namespace py = pybind11;
using namespace tdha;

namespace {

Vector coords(const BallPoint& p) { return {p.coords().begin(), p.coords().end()}; }

std::vector<BallPoint> to_points(const std::vector<Vector>& rows) {
  std::vector<BallPoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(BallPoint::from_coords(r));
  return out;
}

std::vector<Vector> to_rows(const std::vector<BallPoint>& points) {
  std::vector<Vector> out;
  for (const auto& p : points) out.push_back(coords(p));
  return out;
}

// nlohmann::json -> Python object through the json module; reports are small.
py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

harness::EvalOptions make_options(const std::vector<std::size_t>& shots, std::size_t episodes,
                                  std::uint64_t seed, double alpha, double epsilon, double tau,
                                  double scale, const std::string& components,
                                  const std::string& neg_mean, const std::string& metric,
                                  const std::string& text_aggregation, unsigned threads) {
  harness::EvalOptions o;
  o.shots = shots;
  o.episodes = episodes;
  o.seed = seed;
  o.fusion.alpha = alpha;
  o.fusion.epsilon = epsilon;
  o.fusion.tau = tau;
  o.fusion.components = ComponentSet::parse(components);
  o.fusion.metric = parse_image_metric(metric);
  o.scale = scale;
  o.neg_mean = parse_mean_mode(neg_mean);
  if (text_aggregation != "normalized" && text_aggregation != "raw") {
    throw InvalidInputError("text_aggregation must be normalized or raw");
  }
  o.text_aggregation = text_aggregation == "raw" ? AggregateMode::raw : AggregateMode::normalized;
  o.threads = threads;
  o.validate();
  return o;
}

// Shared keyword arguments of every evaluation entry point.
#define TDHA_EVAL_ARGS                                                                        \
  py::arg("shots") = std::vector<std::size_t>{1, 2, 4, 8, 16}, py::arg("episodes") = 3,       \
  py::arg("seed") = 1, py::arg("alpha") = 1.2, py::arg("epsilon") = 5.0,                      \
  py::arg("tau") = 0.01, py::arg("scale") = 0.5, py::arg("components") = "iip+,iip-,itp+,itp-", \
  py::arg("neg_mean") = "ambient", py::arg("metric") = "hd",                                  \
  py::arg("text_aggregation") = "normalized", py::arg("threads") = 1

harness::Evaluator make_evaluator(const std::filesystem::path& bundle,
                                  const std::optional<std::filesystem::path>& test_bundle) {
  std::optional<EmbeddingBundle> target;
  if (test_bundle) target = read_bundle(*test_bundle);
  return harness::Evaluator(read_bundle(bundle), std::move(target));
}

std::string path_string(const std::optional<std::filesystem::path>& p) {
  return p ? p->string() : std::string();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hyperbolic few-shot adapter over CLIP-style embeddings";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto invalid = py::register_exception<InvalidInputError>(m, "InvalidInputError", error.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", invalid.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", error.ptr());
  auto data = py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<IoError>(m, "IoError", data.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", data.ptr());
  py::register_exception<ManifestError>(m, "ManifestError", data.ptr());
  py::register_exception<BadMagicError>(m, "BadMagicError", data.ptr());
  py::register_exception<UnsupportedVersionError>(m, "UnsupportedVersionError", data.ptr());
  py::register_exception<TruncatedPayloadError>(m, "TruncatedPayloadError", data.ptr());
  py::register_exception<LabelOutOfRangeError>(m, "LabelOutOfRangeError", data.ptr());

  // geometry
  m.def("exp_map_origin", [](const Vector& w) { return coords(exp_map_origin(w)); }, py::arg("w"));
  m.def("log_map_origin", [](const Vector& y) { return log_map_origin(BallPoint::from_coords(y)); },
        py::arg("y"));
  m.def("distance",
        [](const Vector& a, const Vector& b) {
          return distance(BallPoint::from_coords(a), BallPoint::from_coords(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("conformal_factor", [](const Vector& a) { return conformal_factor(a); }, py::arg("a"));
  m.def("ambient_mean", [](const std::vector<Vector>& pts) { return coords(ambient_mean(to_points(pts))); },
        py::arg("points"));
  m.def("tangent_mean", [](const std::vector<Vector>& pts) { return coords(tangent_mean(to_points(pts))); },
        py::arg("points"));
  m.def("frechet_mean",
        [](const std::vector<Vector>& pts, double tolerance, int max_iterations) {
          return coords(frechet_mean_oracle(to_points(pts), {tolerance, max_iterations}));
        },
        py::arg("points"), py::arg("tolerance") = 1e-10, py::arg("max_iterations") = 10000);

  // prototypes, text and inference on in-memory arrays
  m.def("preprocess_feature", [](const Vector& v, double scale) { return preprocess_feature(v, scale); },
        py::arg("v"), py::arg("scale") = 0.5);
  m.def("build_prototypes",
        [](const std::vector<Vector>& features, const std::vector<std::size_t>& labels,
           std::size_t class_count, std::uint64_t seed, const std::string& mean_mode, double scale) {
          SupportSet s;
          s.features = features;
          s.labels = labels;
          s.class_count = class_count;
          s.shots = class_count == 0 ? 0 : features.size() / class_count;
          const auto set = build_prototypes(preprocess_support(std::move(s), scale),
                                            {seed, parse_mean_mode(mean_mode), class_count > 1});
          py::dict out;
          out["positive"] = to_rows(set.positive);
          out["negative"] = to_rows(set.negative);
          out["diagnostics"] = set.diagnostics;
          return out;
        },
        py::arg("features"), py::arg("labels"), py::arg("class_count"), py::arg("seed") = 0,
        py::arg("mean_mode") = "ambient", py::arg("scale") = 0.5,
        "Positive and negative prototypes (ball coordinates) from raw support features.");
  m.def("aggregate_prompts",
        [](const std::vector<std::vector<Vector>>& prompts, const std::string& mode) {
          PromptBank bank;
          bank.positive = prompts;
          bank.negative = prompts;
          const auto tb = aggregate(bank, mode == "raw" ? AggregateMode::raw : AggregateMode::normalized);
          return tb.positive;
        },
        py::arg("prompts"), py::arg("mode") = "normalized");
  m.def("negate_prompt_text", &negate_prompt_text, py::arg("template"), py::arg("class_name"));
  m.def("softmax", [](const std::vector<double>& l) { return softmax(l).scores; }, py::arg("logits"));
  m.def("fuse_final",
        [](std::optional<std::vector<double>> ii, std::optional<std::vector<double>> it, double alpha) {
          auto wrap = [](std::optional<std::vector<double>>& v) -> std::optional<PredictionVector> {
            if (!v) return std::nullopt;
            return PredictionVector{std::move(*v), false};
          };
          return fuse_final(wrap(ii), wrap(it), alpha).scores;
        },
        py::arg("image_image"), py::arg("image_text"), py::arg("alpha") = 1.2);

  // bundles
  m.def("generate_synthetic",
        [](const std::filesystem::path& output, std::size_t super_count,
           std::size_t classes_per_super, std::size_t dim, double noise_sigma, double modality_gap,
           double branch_spread, std::size_t train_per_class, std::size_t test_per_class,
           std::uint64_t seed) {
          SyntheticSpec s;
          s.super_count = super_count;
          s.classes_per_super = classes_per_super;
          s.dim = dim;
          s.noise_sigma = noise_sigma;
          s.modality_gap = modality_gap;
          s.branch_spread = branch_spread;
          s.train_per_class = train_per_class;
          s.test_per_class = test_per_class;
          s.seed = seed;
          write_bundle(generate_synthetic(s), output);
        },
        py::arg("output"), py::arg("super_count") = 4, py::arg("classes_per_super") = 4,
        py::arg("dim") = 32, py::arg("noise_sigma") = 0.35, py::arg("modality_gap") = 0.5,
        py::arg("branch_spread") = 0.2, py::arg("train_per_class") = 64,
        py::arg("test_per_class") = 100, py::arg("seed") = 0,
        "Writes a synthetic hierarchical bundle to `output`.");
  m.def("read_bundle_info",
        [](const std::filesystem::path& dir) {
          const auto b = read_bundle(dir);
          py::dict out;
          out["dim"] = b.dim;
          out["class_names"] = b.class_names;
          out["train_rows"] = b.train.features.rows;
          out["test_rows"] = b.test.features.rows;
          out["metadata"] = b.metadata;
          out["warnings"] = b.warnings();
          return out;
        },
        py::arg("bundle"));
  m.def("read_emb1",
        [](const std::filesystem::path& path) {
          const auto f = read_emb1(path);
          std::vector<Vector> rows;
          for (std::size_t i = 0; i < f.rows; ++i) rows.push_back(f.row_as_double(i));
          return rows;
        },
        py::arg("path"));
  m.def("write_emb1",
        [](const std::filesystem::path& path, const std::vector<Vector>& rows, std::size_t cols) {
          write_emb1(path, FloatMatrix::from_rows(rows, cols));
        },
        py::arg("path"), py::arg("rows"), py::arg("cols"));

  // protocol runs, returning the same JSON documents as the command-line tool
  m.def("evaluate",
        [](const std::filesystem::path& bundle, std::optional<std::filesystem::path> test_bundle,
           std::vector<std::size_t> shots, std::size_t episodes, std::uint64_t seed, double alpha,
           double epsilon, double tau, double scale, std::string components, std::string neg_mean,
           std::string metric, std::string text_aggregation, unsigned threads) {
          const auto o = make_options(shots, episodes, seed, alpha, epsilon, tau, scale, components,
                                      neg_mean, metric, text_aggregation, threads);
          harness::EvalReport r;
          {
            py::gil_scoped_release release;
            r = make_evaluator(bundle, test_bundle).run(o);
          }
          report::Document doc{"eval", bundle.string(), path_string(test_bundle), "", {}};
          doc.rows.push_back({o.fusion.components.to_string(), std::nullopt, &r});
          return to_python(report::to_json(doc));
        },
        py::arg("bundle"), py::arg("test_bundle") = py::none(), TDHA_EVAL_ARGS);
  m.def("ablate",
        [](const std::filesystem::path& bundle, const std::string& rows,
           std::vector<std::size_t> shots, std::size_t episodes, std::uint64_t seed, double alpha,
           double epsilon, double tau, double scale, std::string components, std::string neg_mean,
           std::string metric, std::string text_aggregation, unsigned threads) {
          if (rows != "components" && rows != "polarity") {
            throw InvalidInputError("rows must be components or polarity");
          }
          const auto o = make_options(shots, episodes, seed, alpha, epsilon, tau, scale, components,
                                      neg_mean, metric, text_aggregation, threads);
          std::vector<harness::AblationRow> result;
          {
            py::gil_scoped_release release;
            result = harness::run_ablation(make_evaluator(bundle, std::nullopt), o,
                                           rows == "polarity" ? harness::polarity_ablation_rows()
                                                              : harness::component_ablation_rows());
          }
          report::Document doc{"ablate", bundle.string(), "", "", {}};
          for (const auto& r : result) doc.rows.push_back({r.label, std::nullopt, &r.report});
          return to_python(report::to_json(doc));
        },
        py::arg("bundle"), py::arg("rows") = "components", TDHA_EVAL_ARGS);
  m.def("sweep",
        [](const std::filesystem::path& bundle, const std::string& param,
           std::optional<std::string> grid, std::vector<std::size_t> shots, std::size_t episodes,
           std::uint64_t seed, double alpha, double epsilon, double tau, double scale,
           std::string components, std::string neg_mean, std::string metric,
           std::string text_aggregation, unsigned threads) {
          const auto o = make_options(shots, episodes, seed, alpha, epsilon, tau, scale, components,
                                      neg_mean, metric, text_aggregation, threads);
          const auto p = harness::parse_sweep_parameter(param);
          const auto values = grid ? harness::parse_grid(*grid) : harness::default_grid(p);
          std::vector<harness::SweepPoint> points;
          {
            py::gil_scoped_release release;
            points = harness::run_sweep(make_evaluator(bundle, std::nullopt), o, p, values);
          }
          report::Document doc{"sweep", bundle.string(), "", harness::to_string(p), {}};
          for (const auto& pt : points) {
            doc.rows.push_back({doc.parameter + "=" + std::to_string(pt.value), pt.value, &pt.report});
          }
          return to_python(report::to_json(doc));
        },
        py::arg("bundle"), py::arg("param") = "alpha", py::arg("grid") = py::none(), TDHA_EVAL_ARGS);
  m.def("compare_metric",
        [](const std::filesystem::path& bundle, std::vector<std::size_t> shots,
           std::size_t episodes, std::uint64_t seed, double alpha, double epsilon, double tau,
           double scale, std::string components, std::string neg_mean, std::string metric,
           std::string text_aggregation, unsigned threads) {
          const auto o = make_options(shots, episodes, seed, alpha, epsilon, tau, scale, components,
                                      neg_mean, metric, text_aggregation, threads);
          harness::MetricComparison cmp;
          {
            py::gil_scoped_release release;
            cmp = harness::run_compare_metric(make_evaluator(bundle, std::nullopt), o);
          }
          report::Document doc{"compare-metric", bundle.string(), "", "", {}};
          doc.rows.push_back({"hd", std::nullopt, &cmp.hyperbolic});
          doc.rows.push_back({"ecs", std::nullopt, &cmp.cosine});
          return to_python(report::to_json(doc));
        },
        py::arg("bundle"), TDHA_EVAL_ARGS);
  m.def("geometry_check",
        [](std::uint64_t seed) {
          GeometryCheckOptions o;
          o.seed = seed;
          GeometryCheckReport r;
          {
            py::gil_scoped_release release;
            r = run_geometry_checks(o);
          }
          return to_python(report::to_json(r));
        },
        py::arg("seed") = GeometryCheckOptions{}.seed);
  m.def("strip_timing",
        [](py::object doc) {
          auto json_mod = py::module_::import("json");
          const auto j = nlohmann::json::parse(py::str(json_mod.attr("dumps")(doc)).cast<std::string>());
          return to_python(report::strip_timing(j));
        },
        py::arg("report"));
}

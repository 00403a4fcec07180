#include "tdha/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <set>

#include "tdha/error.hpp"
#include "tdha/rng.hpp"

namespace tdha::harness {

namespace {

std::uint64_t hash_indices(const std::vector<std::size_t>& rows) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t r : rows) {
    for (int b = 0; b < 8; ++b) {
      h ^= (static_cast<std::uint64_t>(r) >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw InvalidInputError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

void EvalOptions::validate() const {
  fusion.validate();
  if (shots.empty()) throw InvalidInputError("no shot counts requested");
  for (std::size_t n : shots) {
    if (n == 0) throw InvalidInputError("shot counts must be >= 1");
  }
  if (episodes == 0) throw InvalidInputError("episodes must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInputError("scale must be positive");
}

double EvalReport::mean_accuracy(std::size_t shots) const {
  for (const auto& r : results) {
    if (r.shots == shots) return r.mean;
  }
  throw InvalidInputError("report has no results for " + std::to_string(shots) + " shots");
}

std::vector<double> EvalReport::accuracies(std::size_t shots) const {
  for (const auto& r : results) {
    if (r.shots != shots) continue;
    std::vector<double> out;
    for (const auto& e : r.episodes) out.push_back(e.accuracy);
    return out;
  }
  throw InvalidInputError("report has no results for " + std::to_string(shots) + " shots");
}

std::uint64_t prototype_seed(std::uint64_t seed, std::size_t shots, std::uint64_t episode_index) {
  return mix_keys({seed, episode_index, shots, 0x6e6567ULL});
}

Evaluator::Evaluator(EmbeddingBundle source, std::optional<EmbeddingBundle> target)
    : source_(std::move(source)), target_(std::move(target)) {
  source_.validate();
  if (target_) {
    target_->validate();
    if (target_->class_names != source_.class_names) {
      throw ValidationError("test bundle class names differ from the source bundle");
    }
    if (target_->dim != source_.dim) {
      throw ValidationError("test bundle dimension differs from the source bundle");
    }
  }
  test_features_ = this->target().test_features();
  test_labels_ = this->target().test_labels();
}

EvalReport Evaluator::run(const EvalOptions& options) const {
  options.validate();
  const bool need_negatives = options.fusion.components.has(Stream::iip_negative);
  if (need_negatives && source_.class_count() < 2) {
    throw InvalidInputError("negative image stream needs at least two classes");
  }

  EvalReport report;
  report.options = options;
  report.test_items = test_features_.size();
  std::set<std::string> diagnostics;

  const TextBank bank = aggregate(source_.prompt_bank(), options.text_aggregation);
  diagnostics.insert(bank.diagnostics.begin(), bank.diagnostics.end());

  double classify_seconds = 0.0;
  std::size_t classified = 0;

  for (std::size_t shots : options.shots) {
    ShotResult shot_result;
    shot_result.shots = shots;
    for (std::uint64_t e = 0; e < options.episodes; ++e) {
      const SupportSet support =
          preprocess_support(sample_episode(source_, {shots, options.seed, e}), options.scale);

      EpisodeResult er;
      er.episode_index = e;
      er.prototype_seed = prototype_seed(options.seed, shots, e);
      er.support_hash = hash_indices(support.source_indices);

      const PrototypeSet prototypes = build_prototypes(
          support, {er.prototype_seed, options.neg_mean, need_negatives});
      diagnostics.insert(prototypes.diagnostics.begin(), prototypes.diagnostics.end());

      const auto t0 = std::chrono::steady_clock::now();
      const auto predictions = classify_batch(test_features_, prototypes, bank, options.fusion,
                                              options.scale, options.threads);
      classify_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      classified += predictions.size();

      er.total = predictions.size();
      for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].label == test_labels_[i]) ++er.correct;
      }
      er.accuracy = er.total == 0 ? 0.0
                                  : static_cast<double>(er.correct) / static_cast<double>(er.total);
      if (er.accuracy < 0.0 || er.accuracy > 1.0) {
        throw InvariantViolation("episode accuracy outside [0, 1]");
      }
      shot_result.episodes.push_back(er);
    }

    double sum = 0.0;
    for (const auto& er : shot_result.episodes) sum += er.accuracy;
    const double n = static_cast<double>(shot_result.episodes.size());
    shot_result.mean = sum / n;
    if (shot_result.episodes.size() > 1) {
      double ss = 0.0;
      for (const auto& er : shot_result.episodes) {
        ss += (er.accuracy - shot_result.mean) * (er.accuracy - shot_result.mean);
      }
      shot_result.stddev = std::sqrt(ss / (n - 1.0));
    }
    report.results.push_back(std::move(shot_result));
  }

  report.diagnostics.assign(diagnostics.begin(), diagnostics.end());
  report.seconds_per_item = classified == 0 ? 0.0 : classify_seconds / static_cast<double>(classified);
  return report;
}

std::vector<std::pair<std::string, ComponentSet>> component_ablation_rows() {
  return {
      {"itp+", {Stream::itp_positive}},
      {"itp+,itp-", {Stream::itp_positive, Stream::itp_negative}},
      {"itp+,itp-,iip+", {Stream::itp_positive, Stream::itp_negative, Stream::iip_positive}},
      {"itp+,itp-,iip+,iip-", ComponentSet::all()},
  };
}

std::vector<std::pair<std::string, ComponentSet>> polarity_ablation_rows() {
  return {
      {"neg", {Stream::iip_negative, Stream::itp_negative}},
      {"pos", {Stream::iip_positive, Stream::itp_positive}},
      {"pos+neg", ComponentSet::all()},
  };
}

std::vector<AblationRow> run_ablation(const Evaluator& evaluator, const EvalOptions& base,
                                      const std::vector<std::pair<std::string, ComponentSet>>& rows) {
  std::vector<AblationRow> out;
  for (const auto& [label, components] : rows) {
    EvalOptions options = base;
    options.fusion.components = components;
    out.push_back({label, components, evaluator.run(options)});
  }
  return out;
}

const char* to_string(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::alpha: return "alpha";
    case SweepParameter::epsilon: return "epsilon";
    case SweepParameter::scale: return "scale";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(std::string_view text) {
  if (text == "alpha") return SweepParameter::alpha;
  if (text == "epsilon") return SweepParameter::epsilon;
  if (text == "scale") return SweepParameter::scale;
  throw InvalidInputError("unknown sweep parameter '" + std::string(text) +
                          "' (expected alpha, epsilon or scale)");
}

std::vector<double> parse_grid(std::string_view text) {
  const std::size_t a = text.find(':');
  const std::size_t b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos) {
    return {parse_double(text)};
  }
  if (b == std::string_view::npos) {
    throw InvalidInputError("grid must be start:stop:step, got '" + std::string(text) + "'");
  }
  const double start = parse_double(text.substr(0, a));
  const double stop = parse_double(text.substr(a + 1, b - a - 1));
  const double step = parse_double(text.substr(b + 1));
  if (!(step > 0.0)) throw InvalidInputError("grid step must be positive");
  if (stop < start) throw InvalidInputError("grid is inverted (stop < start)");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  if (count > 100000) throw InvalidInputError("grid has too many points");
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) {
    // round to 12 significant decimals so 0.1 steps print as 0.3, not 0.30000000000000004
    const double v = start + static_cast<double>(i) * step;
    grid.push_back(std::round(v * 1e12) / 1e12);
  }
  return grid;
}

std::vector<double> default_grid(SweepParameter p) {
  switch (p) {
    case SweepParameter::alpha: return {0.0, 0.4, 0.8, 1.2, 1.6, 2.0};
    case SweepParameter::epsilon: return {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    case SweepParameter::scale: return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  }
  return {};
}

std::vector<SweepPoint> run_sweep(const Evaluator& evaluator, const EvalOptions& base,
                                  SweepParameter parameter, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidInputError("sweep grid is empty");
  std::vector<SweepPoint> out;
  for (double value : grid) {
    EvalOptions options = base;
    switch (parameter) {
      case SweepParameter::alpha: options.fusion.alpha = value; break;
      case SweepParameter::epsilon: options.fusion.epsilon = value; break;
      case SweepParameter::scale: options.scale = value; break;
    }
    out.push_back({value, evaluator.run(options)});
  }
  return out;
}

MetricComparison run_compare_metric(const Evaluator& evaluator, const EvalOptions& base) {
  EvalOptions hd = base;
  hd.fusion.metric = ImageMetric::hyperbolic;
  EvalOptions ecs = base;
  ecs.fusion.metric = ImageMetric::cosine;
  return {evaluator.run(hd), evaluator.run(ecs)};
}

}  // namespace tdha::harness

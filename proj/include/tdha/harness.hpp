#pragma once

// Evaluation protocol shared by the CLI, the Python module and the
// acceptance suite: seeded few-shot episodes, ablations, sweeps and the
// hyperbolic-vs-cosine comparison. All runs are paired: every configuration
// evaluated under the same (seed, shots, episode) sees the same support set
// and the same negative draws.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdha/data.hpp"
#include "tdha/inference.hpp"
#include "tdha/prototype.hpp"
#include "tdha/textbank.hpp"

namespace tdha::harness {

struct EvalOptions {
  std::vector<std::size_t> shots{1, 2, 4, 8, 16};
  std::size_t episodes = 3;
  std::uint64_t seed = 1;
  FusionConfig fusion;
  double scale = 0.5;
  MeanMode neg_mean = MeanMode::ambient;
  AggregateMode text_aggregation = AggregateMode::normalized;
  unsigned threads = 1;

  void validate() const;
};

struct EpisodeResult {
  std::uint64_t episode_index = 0;
  std::uint64_t prototype_seed = 0;
  /// FNV-1a over the sampled train rows; equal hashes mean equal supports.
  std::uint64_t support_hash = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

struct ShotResult {
  std::size_t shots = 0;
  std::vector<EpisodeResult> episodes;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for one episode
};

struct EvalReport {
  EvalOptions options;
  std::vector<ShotResult> results;
  std::vector<std::string> diagnostics;
  std::size_t test_items = 0;
  double seconds_per_item = 0.0;  // wall clock, classification only

  /// Mean accuracy for a shot count; throws if absent.
  double mean_accuracy(std::size_t shots) const;
  /// Per-episode accuracies for a shot count, in episode order.
  std::vector<double> accuracies(std::size_t shots) const;
};

/// Holds a source bundle (support + text) and a target bundle (test split).
/// For ordinary runs both are the same bundle; domain-shift runs pass a
/// different target with identical class names.
class Evaluator {
 public:
  explicit Evaluator(EmbeddingBundle source, std::optional<EmbeddingBundle> target = std::nullopt);

  EvalReport run(const EvalOptions& options) const;

  const EmbeddingBundle& source() const noexcept { return source_; }
  const EmbeddingBundle& target() const noexcept { return target_ ? *target_ : source_; }

 private:
  EmbeddingBundle source_;
  std::optional<EmbeddingBundle> target_;
  std::vector<Vector> test_features_;
  std::vector<std::size_t> test_labels_;
};

/// Negative-draw seed for one episode, shared by every paired configuration.
std::uint64_t prototype_seed(std::uint64_t seed, std::size_t shots, std::uint64_t episode_index);

struct AblationRow {
  std::string label;
  ComponentSet components;
  EvalReport report;
};

/// Cumulative stream rows: itp+; +itp-; +iip+; +iip-.
std::vector<std::pair<std::string, ComponentSet>> component_ablation_rows();
/// Polarity rows: negative streams only, positive streams only, both.
std::vector<std::pair<std::string, ComponentSet>> polarity_ablation_rows();

std::vector<AblationRow> run_ablation(
    const Evaluator& evaluator, const EvalOptions& base,
    const std::vector<std::pair<std::string, ComponentSet>>& rows = component_ablation_rows());

enum class SweepParameter { alpha, epsilon, scale };

const char* to_string(SweepParameter p) noexcept;
SweepParameter parse_sweep_parameter(std::string_view text);

/// "start:stop:step", inclusive of stop (within half a step). Throws
/// InvalidInputError for empty, inverted or non-positive-step grids.
std::vector<double> parse_grid(std::string_view text);
/// alpha: 0.0, 0.4, ..., 2.0. epsilon: 1..10. scale: 0.1..0.9.
std::vector<double> default_grid(SweepParameter p);

struct SweepPoint {
  double value = 0.0;
  EvalReport report;
};

std::vector<SweepPoint> run_sweep(const Evaluator& evaluator, const EvalOptions& base,
                                  SweepParameter parameter, const std::vector<double>& grid);

struct MetricComparison {
  EvalReport hyperbolic;
  EvalReport cosine;
};

MetricComparison run_compare_metric(const Evaluator& evaluator, const EvalOptions& base);

}  // namespace tdha::harness

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tdha/poincare.hpp"
#include "tdha/prototype.hpp"
#include "tdha/textbank.hpp"

namespace tdha {

/// Row-major float32 matrix, the in-memory image of one EMB1 file.
struct FloatMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * cols, cols);
  }
  Vector row_as_double(std::size_t i) const;

  static FloatMatrix from_rows(std::span<const Vector> rows, std::size_t cols);
};

// EMB1 layout (all little endian):
//   bytes 0..3   "EMB1"
//   bytes 4..7   u32 version (1)
//   bytes 8..11  u32 row count
//   bytes 12..15 u32 dim
//   then rows*dim IEEE-754 binary32 values, row major.
inline constexpr std::uint32_t kEmb1Version = 1;
inline constexpr std::size_t kEmb1HeaderSize = 16;

std::vector<std::uint8_t> encode_emb1(const FloatMatrix& matrix);
FloatMatrix decode_emb1(std::span<const std::uint8_t> bytes);
void write_emb1(const std::filesystem::path& path, const FloatMatrix& matrix);
FloatMatrix read_emb1(const std::filesystem::path& path);

struct LabeledMatrix {
  FloatMatrix features;
  std::vector<std::uint32_t> labels;
};

/// Image features for a train and test split plus raw prompt features, as
/// stored on disk. Prompt rows carry a class label each, so a class may own
/// any number of prompts (one row per class means "already aggregated").
struct EmbeddingBundle {
  std::size_t dim = 0;
  std::vector<std::string> class_names;
  LabeledMatrix train;
  LabeledMatrix test;
  LabeledMatrix text_positive;
  LabeledMatrix text_negative;
  std::map<std::string, std::string> metadata;

  std::size_t class_count() const noexcept { return class_names.size(); }

  /// Throws ValidationError / LabelOutOfRangeError.
  void validate() const;
  /// Non-fatal findings, e.g. fewer than 16 train samples for a class.
  std::vector<std::string> warnings() const;

  PromptBank prompt_bank() const;
  std::vector<Vector> test_features() const;
  std::vector<std::size_t> test_labels() const;
};

inline constexpr const char* kManifestName = "manifest.json";

/// Writes `dir/manifest.json` plus one EMB1 file per array. The bundle is
/// validated before anything touches the disk.
void write_bundle(const EmbeddingBundle& bundle, const std::filesystem::path& dir);
EmbeddingBundle read_bundle(const std::filesystem::path& dir);

struct EpisodeSpec {
  std::size_t shots = 16;
  std::uint64_t seed = 0;
  std::uint64_t episode_index = 0;
};

/// Draws `shots` distinct train rows per class without replacement, keyed by
/// (seed, episode_index, class name). Rows come out grouped by class, each
/// group in ascending row order.
SupportSet sample_episode(const EmbeddingBundle& bundle, const EpisodeSpec& spec);

struct SyntheticSpec {
  std::size_t classes_per_super = 4;
  std::size_t super_count = 4;
  std::size_t dim = 32;
  // Noise magnitudes are RMS norms relative to the unit class means; the
  // per-coordinate std is magnitude / sqrt(dim).
  double noise_sigma = 0.35;   // image noise
  double modality_gap = 0.5;   // independent per-class text offset
  double branch_spread = 0.2;  // sibling offset, as a fraction of the closest superclass gap
  std::size_t train_per_class = 64;
  std::size_t test_per_class = 100;
  std::uint64_t seed = 0;
};

/// Two-level hierarchy of classes: superclass directions on the unit sphere,
/// subclasses perturbed around them, image features and text features
/// scattered around the subclass means.
EmbeddingBundle generate_synthetic(const SyntheticSpec& spec);

/// The unit-norm subclass means generate_synthetic scatters samples around.
/// They depend only on the seed, the class layout, dim and branch_spread.
std::vector<Vector> synthetic_class_means(const SyntheticSpec& spec);

}  // namespace tdha

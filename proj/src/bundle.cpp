#include <cmath>
#include <fstream>

#include "json.hpp"
#include "tdha/data.hpp"
#include "tdha/error.hpp"

namespace tdha {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "tdha-embedding-bundle";
constexpr int kManifestVersion = 1;

struct ArrayEntry {
  const char* key;
  LabeledMatrix EmbeddingBundle::*member;
  bool labels_optional;
};

constexpr ArrayEntry kArrays[] = {
    {"train", &EmbeddingBundle::train, false},
    {"test", &EmbeddingBundle::test, false},
    {"text_positive", &EmbeddingBundle::text_positive, true},
    {"text_negative", &EmbeddingBundle::text_negative, true},
};

void validate_array(const EmbeddingBundle& b, const char* key, const LabeledMatrix& m) {
  if (m.features.cols != b.dim) {
    throw ValidationError(std::string(key) + ": dimension " + std::to_string(m.features.cols) +
                          " differs from bundle dim " + std::to_string(b.dim));
  }
  if (m.features.values.size() != m.features.rows * m.features.cols) {
    throw ValidationError(std::string(key) + ": value count does not match shape");
  }
  if (m.labels.size() != m.features.rows) {
    throw ValidationError(std::string(key) + ": " + std::to_string(m.labels.size()) +
                          " labels for " + std::to_string(m.features.rows) + " rows");
  }
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    if (m.labels[i] >= b.class_count()) {
      throw LabelOutOfRangeError(std::string(key) + ": label " + std::to_string(m.labels[i]) +
                                 " at row " + std::to_string(i) + " is >= class count " +
                                 std::to_string(b.class_count()));
    }
  }
  for (float f : m.features.values) {
    if (!std::isfinite(f)) throw ValidationError(std::string(key) + ": non-finite value");
  }
}

std::vector<std::size_t> count_labels(const LabeledMatrix& m, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (auto l : m.labels) ++counts[l];
  return counts;
}

}  // namespace

void EmbeddingBundle::validate() const {
  if (dim == 0) throw ValidationError("bundle dim must be >= 1");
  if (class_names.empty()) throw ValidationError("bundle has no classes");
  for (const auto& a : kArrays) validate_array(*this, a.key, this->*(a.member));
  for (const auto* m : {&text_positive, &text_negative}) {
    const auto counts = count_labels(*m, class_count());
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] == 0) {
        throw ValidationError("class " + class_names[k] + " has no " +
                              (m == &text_positive ? "positive" : "negative") + " text features");
      }
    }
  }
}

std::vector<std::string> EmbeddingBundle::warnings() const {
  std::vector<std::string> out;
  const auto counts = count_labels(train, class_count());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 16) {
      out.push_back("class " + class_names[k] + " has only " + std::to_string(counts[k]) +
                    " train samples (16 needed for the full shot protocol)");
    }
  }
  return out;
}

PromptBank EmbeddingBundle::prompt_bank() const {
  PromptBank bank;
  bank.class_names = class_names;
  bank.positive.resize(class_count());
  bank.negative.resize(class_count());
  for (std::size_t i = 0; i < text_positive.features.rows; ++i) {
    bank.positive[text_positive.labels[i]].push_back(text_positive.features.row_as_double(i));
  }
  for (std::size_t i = 0; i < text_negative.features.rows; ++i) {
    bank.negative[text_negative.labels[i]].push_back(text_negative.features.row_as_double(i));
  }
  return bank;
}

std::vector<Vector> EmbeddingBundle::test_features() const {
  std::vector<Vector> out;
  out.reserve(test.features.rows);
  for (std::size_t i = 0; i < test.features.rows; ++i) out.push_back(test.features.row_as_double(i));
  return out;
}

std::vector<std::size_t> EmbeddingBundle::test_labels() const {
  return {test.labels.begin(), test.labels.end()};
}

void write_bundle(const EmbeddingBundle& bundle, const std::filesystem::path& dir) {
  bundle.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  json manifest;
  manifest["format"] = kFormatName;
  manifest["version"] = kManifestVersion;
  manifest["dim"] = bundle.dim;
  manifest["class_names"] = bundle.class_names;
  manifest["metadata"] = bundle.metadata;
  json arrays = json::object();
  for (const auto& a : kArrays) {
    const LabeledMatrix& m = bundle.*(a.member);
    const std::string file = std::string(a.key) + ".emb1";
    write_emb1(dir / file, m.features);
    arrays[a.key] = {{"file", file}, {"rows", m.features.rows}, {"labels", m.labels}};
  }
  manifest["arrays"] = std::move(arrays);

  std::ofstream out(dir / kManifestName, std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / kManifestName).string());
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + (dir / kManifestName).string());
}

EmbeddingBundle read_bundle(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestName;
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path.string());

  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ManifestError(manifest_path.string() + ": " + e.what());
  }

  EmbeddingBundle b;
  try {
    if (manifest.value("format", "") != kFormatName) {
      throw ManifestError("manifest format is not '" + std::string(kFormatName) + "'");
    }
    if (manifest.at("version").get<int>() != kManifestVersion) {
      throw UnsupportedVersionError("manifest version " + manifest.at("version").dump());
    }
    b.dim = manifest.at("dim").get<std::size_t>();
    b.class_names = manifest.at("class_names").get<std::vector<std::string>>();
    if (manifest.contains("metadata")) {
      b.metadata = manifest.at("metadata").get<std::map<std::string, std::string>>();
    }
    const json& arrays = manifest.at("arrays");
    for (const auto& a : kArrays) {
      const json& entry = arrays.at(a.key);
      LabeledMatrix& m = b.*(a.member);
      m.features = read_emb1(dir / entry.at("file").get<std::string>());
      if (entry.contains("labels")) {
        m.labels = entry.at("labels").get<std::vector<std::uint32_t>>();
      } else if (a.labels_optional && m.features.rows == b.class_names.size()) {
        for (std::uint32_t k = 0; k < m.features.rows; ++k) m.labels.push_back(k);
      } else {
        throw ManifestError(std::string("arrays.") + a.key + " has no labels");
      }
    }
  } catch (const json::exception& e) {
    throw ManifestError(manifest_path.string() + ": " + e.what());
  }
  b.validate();
  return b;
}

}  // namespace tdha

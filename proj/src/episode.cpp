#include <algorithm>
#include <numeric>

#include "tdha/data.hpp"
#include "tdha/error.hpp"
#include "tdha/rng.hpp"

namespace tdha {

SupportSet sample_episode(const EmbeddingBundle& bundle, const EpisodeSpec& spec) {
  if (spec.shots == 0) throw InvalidInputError("sample_episode: shots must be >= 1");
  const std::size_t K = bundle.class_count();

  std::vector<std::vector<std::size_t>> rows(K);
  for (std::size_t i = 0; i < bundle.train.labels.size(); ++i) {
    rows[bundle.train.labels[i]].push_back(i);
  }

  SupportSet support;
  support.shots = spec.shots;
  support.class_count = K;
  support.class_names = bundle.class_names;
  for (std::size_t k = 0; k < K; ++k) {
    auto& pool = rows[k];
    if (pool.size() < spec.shots) {
      throw InvalidInputError("sample_episode: class " + bundle.class_names[k] + " has " +
                              std::to_string(pool.size()) + " train samples, " +
                              std::to_string(spec.shots) + " shots requested");
    }
    KeyedRng rng(mix_keys({spec.seed, spec.episode_index, fnv1a64(bundle.class_names[k])}));
    // partial Fisher-Yates: the first `shots` slots become the draw
    for (std::size_t i = 0; i < spec.shots; ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(spec.shots));
    for (std::size_t i = 0; i < spec.shots; ++i) {
      support.features.push_back(bundle.train.features.row_as_double(pool[i]));
      support.labels.push_back(k);
      support.source_indices.push_back(pool[i]);
    }
  }
  return support;
}

}  // namespace tdha

#pragma once

// Random classification problems evaluated both by the library and by the
// naive reference.

#include <algorithm>
#include <cmath>

#include "naive_reference.hpp"
#include "tdha/inference.hpp"
#include "tdha/prototype.hpp"
#include "tdha/rng.hpp"
#include "tdha/textbank.hpp"

namespace testing_support {

struct LibraryInputs {
  tdha::SupportSet support;  // preprocessed
  tdha::PrototypeSet prototypes;
  tdha::TextBank bank;
  tdha::FusionConfig config;
  double scale = 0.5;
};

struct Instance {
  naive::Problem problem;
  LibraryInputs lib;
  std::vector<tdha::Vector> tests;
};

inline tdha::Vector gaussian(tdha::KeyedRng& rng, std::size_t dim) {
  tdha::Vector v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

/// K in [2, max_k], d in [2, max_d], 1-3 shots, 1-3 prompts, random temperatures.
inline Instance random_instance(std::uint64_t seed, std::size_t max_k = 5,
                                std::size_t max_d = 4, std::size_t tests = 4) {
  tdha::KeyedRng rng(seed);
  Instance in;
  auto& p = in.problem;
  p.K = 2 + rng.below(max_k - 1);
  const std::size_t dim = 2 + rng.below(max_d - 1);
  const std::size_t shots = 1 + rng.below(3);
  p.alpha = 2.0 * rng.uniform();
  p.epsilon = 0.5 + 9.5 * rng.uniform();
  p.tau = 0.01 + 0.5 * rng.uniform();
  p.scale = 0.1 + 1.4 * rng.uniform();
  const auto mask = 1 + rng.below(15);
  p.iip_pos = mask & 1;
  p.iip_neg = mask & 2;
  p.itp_pos = mask & 4;
  p.itp_neg = mask & 8;

  auto& s = in.lib.support;
  s.shots = shots;
  s.class_count = p.K;
  p.support.resize(p.K);
  p.text_positive.resize(p.K);
  p.text_negative.resize(p.K);
  tdha::PromptBank prompts;
  for (std::size_t k = 0; k < p.K; ++k) {
    s.class_names.push_back("c" + std::to_string(k));
    for (std::size_t i = 0; i < shots; ++i) {
      const auto f = gaussian(rng, dim);
      p.support[k].push_back(f);
      s.features.push_back(f);
      s.labels.push_back(k);
    }
    const std::size_t L = 1 + rng.below(3);
    prompts.positive.emplace_back();
    prompts.negative.emplace_back();
    for (std::size_t l = 0; l < L; ++l) {
      p.text_positive[k].push_back(gaussian(rng, dim));
      p.text_negative[k].push_back(gaussian(rng, dim));
    }
    prompts.positive.back() = p.text_positive[k];
    prompts.negative.back() = p.text_negative[k];
  }
  for (std::size_t t = 0; t < tests; ++t) in.tests.push_back(gaussian(rng, dim));

  in.lib.scale = static_cast<double>(p.scale);
  s = tdha::preprocess_support(s, in.lib.scale);
  const std::uint64_t proto_seed = rng.next_u64();
  in.lib.prototypes = tdha::build_prototypes(s, {proto_seed, tdha::MeanMode::ambient, true});
  in.lib.bank = tdha::aggregate(prompts);

  // hand the same random draws to the reference
  p.negative_draws.resize(p.K);
  const auto rows = tdha::draw_negative_rows(s, proto_seed);
  for (std::size_t k = 0; k < p.K; ++k) {
    for (std::size_t r : rows[k]) {
      const std::size_t c = s.labels[r];
      const auto class_rows = s.rows_of(c);
      const auto pos = std::find(class_rows.begin(), class_rows.end(), r) - class_rows.begin();
      p.negative_draws[k].emplace_back(c, static_cast<std::size_t>(pos));
    }
  }

  auto& cfg = in.lib.config;
  cfg.alpha = static_cast<double>(p.alpha);
  cfg.epsilon = static_cast<double>(p.epsilon);
  cfg.tau = static_cast<double>(p.tau);
  std::string list;
  if (p.iip_pos) list += "iip+,";
  if (p.iip_neg) list += "iip-,";
  if (p.itp_pos) list += "itp+,";
  if (p.itp_neg) list += "itp-,";
  list.pop_back();
  cfg.components = tdha::ComponentSet::parse(list);
  return in;
}

struct Comparison {
  double max_abs_diff = 0.0;
  bool argmax_match = true;
};

inline Comparison compare(const Instance& in, unsigned threads = 1) {
  const auto got = tdha::classify_batch(in.tests, in.lib.prototypes, in.lib.bank, in.lib.config,
                                        in.lib.scale, threads);
  Comparison out;
  for (std::size_t t = 0; t < in.tests.size(); ++t) {
    const auto want = naive::classify(in.problem, in.tests[t]);
    std::size_t best = 0;
    for (std::size_t k = 0; k < want.size(); ++k) {
      const double diff = std::abs(static_cast<double>(want[k]) - got[t].scores.scores[k]);
      out.max_abs_diff = std::max(out.max_abs_diff, diff);
      if (want[k] > want[best]) best = k;
    }
    out.argmax_match = out.argmax_match && best == got[t].label;
  }
  return out;
}

}  // namespace testing_support

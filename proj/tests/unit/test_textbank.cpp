#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "tdha/error.hpp"
#include "tdha/rng.hpp"
#include "tdha/textbank.hpp"

using namespace tdha;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;  // mpmath

PromptBank single_class(std::vector<Vector> pos, std::vector<Vector> neg = {{1.0, 0.0}}) {
  return PromptBank{{"cat"}, {std::move(pos)}, {std::move(neg)}};
}

Vector random_vector(KeyedRng& rng, std::size_t dim) {
  Vector v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("aggregate examples") {
  auto tb = aggregate(single_class({{3.0, 4.0}}));
  CHECK(tb.positive[0][0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(tb.positive[0][1] == doctest::Approx(0.8).epsilon(1e-15));

  tb = aggregate(single_class({{1.0, 0.0}, {0.0, 1.0}}));
  CHECK(tb.positive[0][0] == doctest::Approx(kInvSqrt2).epsilon(1e-15));
  CHECK(tb.positive[0][1] == doctest::Approx(kInvSqrt2).epsilon(1e-15));

  tb = aggregate(single_class({{2.0, 0.0}, {1.0, 0.0}}));
  CHECK(tb.positive[0] == Vector{1.0, 0.0});
}

TEST_CASE("raw mode averages before normalising") {
  // normalized: (1,0),(0,1) -> diagonal; raw: (4,0),(0,1) -> (0.97,0.24)
  const auto bank = single_class({{4.0, 0.0}, {0.0, 1.0}});
  const auto norm_tb = aggregate(bank, AggregateMode::normalized);
  const auto raw_tb = aggregate(bank, AggregateMode::raw);
  CHECK(norm_tb.positive[0][0] == doctest::Approx(kInvSqrt2));
  CHECK(raw_tb.positive[0][0] == doctest::Approx(4.0 / std::sqrt(17.0)).epsilon(1e-15));
}

TEST_CASE("aggregate errors name the class and prompt") {
  try {
    aggregate(PromptBank{{"cat", "dog"}, {{{1.0, 0.0}}, {{1.0, 1.0}, {0.0, 0.0}}},
                         {{{0.0, 1.0}}, {{0.0, 1.0}}}});
    FAIL("expected DegenerateInputError");
  } catch (const DegenerateInputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("dog") != std::string::npos);
    CHECK(msg.find("prompt 1") != std::string::npos);
  }
  CHECK_THROWS_AS(aggregate(single_class({{1.0, NAN}})), InvalidInputError);
  CHECK_THROWS_AS(aggregate(single_class({{1.0, 0.0}, {1.0, 0.0, 0.0}})), ShapeError);
  CHECK_THROWS_AS(aggregate(single_class({})), InvalidInputError);
}

TEST_CASE("aggregate properties on random banks") {
  KeyedRng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 2 + rng.below(10);
    const std::size_t L = 1 + rng.below(6);
    std::vector<Vector> prompts;
    for (std::size_t i = 0; i < L; ++i) prompts.push_back(random_vector(rng, dim));
    const auto base = aggregate(single_class(prompts, prompts)).positive[0];
    CHECK(std::abs(norm(base) - 1.0) < 1e-9);

    auto reversed = prompts;
    std::reverse(reversed.begin(), reversed.end());
    const auto rev = aggregate(single_class(reversed, prompts)).positive[0];

    auto scaled = prompts;
    const double c = 0.01 + 100.0 * rng.uniform();
    for (double& x : scaled[rng.below(L)]) x *= c;
    const auto sc = aggregate(single_class(scaled, prompts)).positive[0];

    for (std::size_t j = 0; j < dim; ++j) {
      CHECK(rev[j] == doctest::Approx(base[j]).epsilon(1e-12));
      CHECK(sc[j] == doctest::Approx(base[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("coinciding text polarities are reported") {
  const auto tb = aggregate(single_class({{1.0, 0.0}}, {{2.0, 0.0}}));
  CHECK(tb.diagnostics.size() == 1);
}

TEST_CASE("negate_prompt_text") {
  CHECK(negate_prompt_text("a photo of {class}", "cat") == "a photo of no cat");
  CHECK(negate_prompt_text("a photo of {class}", "Labrador") == "a photo of no Labrador");
  CHECK(negate_prompt_text("{class}", "dog") == "no dog");
  CHECK(negate_prompt_text("a {class}, a type of {class}.", "ox") == "a no ox, a type of no ox.");
  CHECK_THROWS_AS(negate_prompt_text("a photo of a cat", "cat"), FormatError);
}

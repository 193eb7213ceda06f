#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "hypercolor/error.hpp"
#include "hypercolor/sampling.hpp"
#include "hypercolor/synthetic.hpp"
#include "test_support.hpp"

using namespace hypercolor;

namespace {

std::vector<std::size_t> sampled_rows(const Mask& m) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < m.height(); ++r) {
    for (std::size_t c = 0; c < m.width(); ++c) {
      if (m.at(r, c)) {
        rows.push_back(r);
        break;
      }
    }
  }
  return rows;
}

// Fine random texture in rows [0, h/2), flat below.
GuideImage half_textured(std::size_t h, std::size_t w, bool top) {
  auto noise = hctest::random_values(h * w, 77);
  GuideImage g(h, w, 0.5);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      if ((r < h / 2) == top) g.at(r, c) = noise[r * w + c];
  return g;
}

GuideImage left_textured(std::size_t h, std::size_t w) {
  auto noise = hctest::random_values(h * w, 78);
  GuideImage g(h, w, 0.5);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w / 2; ++c) g.at(r, c) = noise[r * w + c];
  return g;
}

}  // namespace

TEST(Accumulator, FirstIndexAlwaysTaken) {
  EXPECT_EQ(accumulate_select(std::vector<double>(8, 1.0), 0.25), (std::vector<std::size_t>{0, 4}));
  EXPECT_EQ(accumulate_select(std::vector<double>(100, 1.0), 0.03),
            (std::vector<std::size_t>{0, 34, 67}));
  EXPECT_EQ(accumulate_select(std::vector<double>(5, 1.0), 1.0).size(), 5u);
}

TEST(UniformPush, Rows) {
  EXPECT_EQ(sampled_rows(sample_uniform_push(8, 5, 0.25)), (std::vector<std::size_t>{0, 4}));
  const auto all = sample_uniform_push(6, 4, 1.0);
  EXPECT_EQ(all.count(), 24u);
  const auto m = sample_uniform_push(100, 10, 0.03);
  EXPECT_EQ(sampled_rows(m), (std::vector<std::size_t>{0, 34, 67}));
  EXPECT_EQ(m.count(), 30u);
}

TEST(UniformWhisk, SquareRootSplit) {
  EXPECT_EQ(sample_uniform_whisk(7, 9, 1.0).count(), 63u);
  const auto m = sample_uniform_whisk(100, 100, 0.01);
  EXPECT_EQ(m.count(), 100u);
  EXPECT_EQ(sampled_rows(m).size(), 10u);
  for (std::size_t r : sampled_rows(m)) EXPECT_EQ(r % 10, 0u);
  const auto n = sample_uniform_whisk(128, 96, 0.04);
  EXPECT_NEAR(static_cast<double>(n.count()), 0.04 * 128 * 96, 128 + 96);
}

TEST(RandomPattern, CountDeterminismAndSeeds) {
  const auto a = sample_random(100, 100, 0.01, 5);
  EXPECT_EQ(a.count(), 100u);
  EXPECT_EQ(a, sample_random(100, 100, 0.01, 5));
  EXPECT_NE(a, sample_random(100, 100, 0.01, 6));
  EXPECT_EQ(sample_random(10, 10, 0.155, 1).count(), 15u);
  EXPECT_THROW(sample_random(10, 10, 0.001, 1), ParameterError);
}

TEST(SamplingPlan, Validation) {
  SamplingPlan plan;
  plan.rate = 0.0;
  EXPECT_THROW(plan.validate(), ParameterError);
  plan.rate = 1.5;
  EXPECT_THROW(plan.validate(), ParameterError);
  plan.rate = 0.5;
  plan.alpha = 1.1;
  EXPECT_THROW(plan.validate(), ParameterError);
  EXPECT_EQ(parse_sampling_pattern("guided-whisk"), SamplingPattern::guided_whisk);
  EXPECT_EQ(parse_sampling_pattern(to_string(SamplingPattern::uniform_push)),
            SamplingPattern::uniform_push);
  EXPECT_THROW(parse_sampling_pattern("zigzag"), ParameterError);
  SamplingPlan guided;
  guided.pattern = SamplingPattern::guided_push;
  EXPECT_THROW(make_mask(guided, 4, 4, nullptr), ParameterError);
}

TEST(Gamma, ConstantFallbackAndNormalization) {
  EXPECT_EQ(feature_gamma({3, 3, 3}), (std::vector<double>{1, 1, 1}));
  const auto g = feature_gamma({0, 5, 2, 9, 4});
  double mean = 0.0;
  for (double v : g) mean += v / 5.0;
  EXPECT_NEAR(mean, 1.0, 1e-12);
  const double mn = *std::min_element(g.begin(), g.end());
  const double mx = *std::max_element(g.begin(), g.end());
  EXPECT_NEAR(mn / mx, 0.1, 1e-12);
}

TEST(Gamma, HandEvaluatedDoubledBand) {
  // One band has twice the features of the others.
  const auto w = combine_features({1, 1, 2, 1}, {3, 3, 6, 3}, 0.7);
  const double mean = (0.1 * 3 + 1.0) / 4.0;
  EXPECT_NEAR(w[2], 1.0 / mean, 1e-12);
  EXPECT_NEAR(w[0], 0.1 / mean, 1e-12);
  EXPECT_NEAR(w[2] / w[0], 10.0, 1e-12);

  // Mixed: corners favour index 0, levels favour index 1.
  const auto m = combine_features({2, 1}, {1, 2}, 0.7);
  EXPECT_NEAR(m[0], (0.7 * 1.0 / 0.55 + 0.3 * 0.1 / 0.55), 1e-12);
}

TEST(RowWeights, ConstantGuideIsUniform) {
  for (double w : compute_row_weights(GuideImage(32, 20, 0.3), 0.7)) EXPECT_EQ(w, 1.0);
}

TEST(RowWeights, TexturedTopOutweighsFlatBottom) {
  const auto w = compute_row_weights(half_textured(60, 40, true), 0.7);
  const double top_min = *std::min_element(w.begin(), w.begin() + 20);
  const double bottom_max = *std::max_element(w.begin() + 40, w.end());
  EXPECT_GT(top_min, bottom_max);
  double mean = 0.0;
  for (double v : w) mean += v / 60.0;
  EXPECT_NEAR(mean, 1.0, 1e-9);
  for (double v : w) EXPECT_GT(v, 0.0);
}

TEST(GuidedPatterns, ConstantGuideReducesToUniform) {
  const GuideImage flat(50, 70, 0.4);
  for (double rate : {0.02, 0.04, 0.25}) {
    EXPECT_EQ(sample_guided_push(flat, rate, 0.7), sample_uniform_push(50, 70, rate));
    EXPECT_EQ(sample_guided_whisk(flat, rate, 0.7), sample_uniform_whisk(50, 70, rate));
  }
}

TEST(GuidedPush, DensityFollowsWeights) {
  const auto guide = half_textured(1000, 20, true);
  const double rate = 0.1;
  const auto m = sample_guided_push(guide, rate, 0.7);
  const auto rows = sampled_rows(m);
  EXPECT_NEAR(static_cast<double>(rows.size()), rate * 1000, 1.0);
  const auto w = compute_row_weights(guide, 0.7);
  double w_top = 0, w_bottom = 0;
  std::size_t n_top = 0, n_bottom = 0;
  for (std::size_t r = 0; r < 1000; ++r) (r < 500 ? w_top : w_bottom) += w[r];
  for (std::size_t r : rows) (r < 500 ? n_top : n_bottom) += 1;
  ASSERT_GT(n_bottom, 0u);
  const double density = static_cast<double>(n_top) / static_cast<double>(n_bottom);
  EXPECT_NEAR(density, w_top / w_bottom, 0.2 * (w_top / w_bottom));
}

TEST(GuidedWhisk, CountAndDensity) {
  const auto guide = left_textured(120, 120);
  const double rate = 0.04;
  const auto m = sample_guided_whisk(guide, rate, 0.7);
  EXPECT_NEAR(static_cast<double>(m.count()), rate * 120 * 120, 0.05 * rate * 120 * 120);
  std::size_t left = 0, right = 0;
  for (const auto& p : m.indices()) (p.col < 60 ? left : right) += 1;
  EXPECT_GT(left, right);
}

TEST(Masks, Deterministic) {
  const auto guide = hctest::random_guide(40, 40, 3);
  EXPECT_EQ(sample_guided_whisk(guide, 0.05, 0.7), sample_guided_whisk(guide, 0.05, 0.7));
  EXPECT_EQ(sample_guided_push(guide, 0.05, 0.7), sample_guided_push(guide, 0.05, 0.7));
}

TEST(Masks, CountWithinOneRowOrOnePercent) {
  const std::vector<SamplingPattern> patterns{SamplingPattern::uniform_push,
                                              SamplingPattern::uniform_whisk,
                                              SamplingPattern::guided_push,
                                              SamplingPattern::guided_whisk,
                                              SamplingPattern::random};
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const std::size_t h = 40 + 13 * seed, w = 30 + 17 * seed;
    const auto guide = make_guide(natural_scene(h, w, 6, seed));
    for (double rate : {0.01, 0.04, 0.2}) {
      for (auto pattern : patterns) {
        SamplingPlan plan;
        plan.pattern = pattern;
        plan.rate = rate;
        plan.seed = seed;
        const auto mask = make_mask(plan, h, w, &guide);
        const double expected = rate * static_cast<double>(h * w);
        const double slack = std::max(static_cast<double>(w), 0.01 * expected);
        EXPECT_NEAR(static_cast<double>(mask.count()), expected, slack)
            << to_string(pattern) << " rate " << rate << " " << h << "x" << w;
      }
    }
  }
}

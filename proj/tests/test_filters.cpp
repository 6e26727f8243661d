#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vocot/filters.hpp"

using vocot::FilterThresholds;
using vocot::InterleavedDocMeta;

namespace {

InterleavedDocMeta doc(std::vector<double> sims) {
  InterleavedDocMeta d;
  d.image_count = sims.size();
  d.similarities = std::move(sims);
  return d;
}

}  // namespace

TEST(Interleaved, MeanSimilarityIsStrict) {
  EXPECT_EQ(vocot::filter_interleaved(doc({0.3, 0.3})).reason, "low-sim");
  // 0.2 and 0.4 average to 0.30000000000000004 in binary; still the boundary.
  EXPECT_EQ(vocot::filter_interleaved(doc({0.2, 0.4})).reason, "low-sim");
  EXPECT_TRUE(vocot::filter_interleaved(doc({0.3, 0.31})).keep);
}

TEST(Interleaved, ImageCountIsInclusive) {
  EXPECT_TRUE(vocot::filter_interleaved(doc(std::vector<double>(6, 0.5))).keep);
  EXPECT_EQ(vocot::filter_interleaved(doc(std::vector<double>(7, 0.5))).reason, "too-many-images");
}

TEST(Interleaved, MalformedAndPerImageFlag) {
  EXPECT_EQ(vocot::filter_interleaved(doc({})).reason, "malformed");
  auto d = doc({0.5, 0.5});
  d.image_count = 3;
  EXPECT_EQ(vocot::filter_interleaved(d).reason, "malformed");
  EXPECT_EQ(vocot::filter_interleaved(doc({0.5, NAN})).reason, "malformed");

  FilterThresholds per_image;
  per_image.per_image_minimum = true;
  EXPECT_TRUE(vocot::filter_interleaved(doc({0.9, 0.25})).keep);  // mean 0.575
  EXPECT_EQ(vocot::filter_interleaved(doc({0.9, 0.25}), per_image).reason, "low-sim");
}

TEST(GroundedCaption, ClipIsStrict) {
  EXPECT_EQ(vocot::filter_grounded_caption({0.35}).reason, "low-clip");
  EXPECT_TRUE(vocot::filter_grounded_caption({0.3501}).keep);
  EXPECT_EQ(vocot::filter_grounded_caption({1.2}).reason, "malformed");
}

TEST(SmallRegion, MinSideIsStrictBelow) {
  EXPECT_EQ(vocot::filter_small_region({0, 0, 49, 200, 500, 500}).reason, "small-region");
  EXPECT_TRUE(vocot::filter_small_region({0, 0, 50, 50, 500, 500}).keep);
  EXPECT_TRUE(vocot::filter_small_region({0, 0, 300, 300, 500, 500}).keep);
  EXPECT_EQ(vocot::filter_small_region({0, 0, 0, 300, 500, 500}).reason, "malformed");
}

TEST(Tally, ReconcilesAndMergesAssociatively) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> clips(1000);
  for (auto& c : clips) c = u(rng);

  vocot::FilterTally whole;
  for (double c : clips) whole.add(vocot::filter_grounded_caption({c}));
  EXPECT_TRUE(whole.reconciles());
  EXPECT_EQ(whole.input, 1000u);

  vocot::FilterTally left, right;
  for (std::size_t i = 0; i < clips.size(); ++i) (i < 400 ? left : right).add(vocot::filter_grounded_caption({clips[i]}));
  left.merge(right);
  EXPECT_EQ(left.kept, whole.kept);
  EXPECT_EQ(left.dropped, whole.dropped);

  std::shuffle(clips.begin(), clips.end(), rng);
  vocot::FilterTally shuffled;
  for (double c : clips) shuffled.add(vocot::filter_grounded_caption({c}));
  EXPECT_EQ(shuffled.kept, whole.kept);
}

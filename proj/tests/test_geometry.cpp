#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vocot/geometry.hpp"

using vocot::BoundingBox;
using vocot::PatchGrid;

TEST(BoundingBox, RejectsOutOfRangeAndInverted) {
  EXPECT_THROW(BoundingBox(-0.1, 0, 0.5, 0.5), vocot::InvalidInput);
  EXPECT_THROW(BoundingBox(0, 0, 1.01, 0.5), vocot::InvalidInput);
  EXPECT_THROW(BoundingBox(0.6, 0, 0.5, 0.5), vocot::InvalidInput);
  EXPECT_THROW(BoundingBox(0, NAN, 0.5, 0.5), vocot::InvalidInput);
  EXPECT_NO_THROW(BoundingBox(0.3, 0.3, 0.3, 0.3));  // degenerate is allowed
}

TEST(NormalizeBox, FullImageAndDirectDivision) {
  EXPECT_EQ(vocot::normalize_box({0, 0, 640, 480, 640, 480}), BoundingBox(0, 0, 1, 1));
  EXPECT_EQ(vocot::normalize_box({250, 0, 250, 250, 500, 500}), BoundingBox(0.5, 0, 1, 0.5));
}

TEST(NormalizeBox, ShelfBoxRoundTrips) {
  const auto b = vocot::normalize_box({112, 109.5, 81, 186.5, 500, 500});
  EXPECT_EQ(vocot::format_box(b), "[0.224, 0.219, 0.386, 0.592]");
  const auto p = vocot::denormalize_box(b, 500, 500);
  EXPECT_NEAR(p.x, 112, 1e-9);
  EXPECT_NEAR(p.y, 109.5, 1e-9);
  EXPECT_NEAR(p.w, 81, 1e-9);
  EXPECT_NEAR(p.h, 186.5, 1e-9);
}

TEST(NormalizeBox, ClampsAndCounts) {
  std::size_t clamped = 0;
  const auto b = vocot::normalize_box({-10, 5, 120, 50, 100, 100}, &clamped);
  EXPECT_EQ(b, BoundingBox(0, 0.05, 1, 0.55));
  EXPECT_EQ(clamped, 1u);  // counts boxes, not coordinates
  EXPECT_THROW(vocot::normalize_box({0, 0, 1, 1, 0, 100}), vocot::InvalidInput);
}

TEST(Iou, HandValues) {
  const BoundingBox a(0.1, 0.1, 0.6, 0.6);
  EXPECT_DOUBLE_EQ(vocot::iou(a, a), 1.0);
  EXPECT_EQ(vocot::iou(BoundingBox(0, 0, 0.4, 0.4), BoundingBox(0.5, 0.5, 1, 1)), 0.0);
  // inter 0.0625, union 0.4375
  EXPECT_NEAR(vocot::iou(BoundingBox(0, 0, 0.5, 0.5), BoundingBox(0.25, 0.25, 0.75, 0.75)), 1.0 / 7.0, 1e-12);
  const BoundingBox point(0.3, 0.3, 0.3, 0.3);
  EXPECT_EQ(vocot::iou(point, point), 0.0);
}

TEST(Iou, AgreesWithRasterOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    double c[8];
    for (double& v : c) v = u(rng);
    const BoundingBox a(std::min(c[0], c[1]), std::min(c[2], c[3]), std::max(c[0], c[1]), std::max(c[2], c[3]));
    const BoundingBox b(std::min(c[4], c[5]), std::min(c[6], c[7]), std::max(c[4], c[5]), std::max(c[6], c[7]));
    EXPECT_NEAR(vocot::iou(a, b), oracle::raster_iou(a.coords(), b.coords()), 1e-3);
    EXPECT_EQ(vocot::iou(a, b), vocot::iou(b, a));
  }
}

TEST(Iou, RasterOracleMatchesPixelMask) {
  const std::array<double, 4> a{0.1, 0.2, 0.7, 0.9}, b{0.4, 0.05, 0.95, 0.6};
  EXPECT_NEAR(oracle::raster_iou(a, b), oracle::mask_iou(a, b, 400), 1e-2);
}

TEST(RefBind, Examples) {
  const PatchGrid g(24, 24);
  const auto full = vocot::refbind_indices(BoundingBox(0, 0, 1, 1), g);
  ASSERT_EQ(full.indices.size(), 576u);
  EXPECT_EQ(full.indices.front(), 0u);
  EXPECT_EQ(full.indices.back(), 575u);

  const auto one = vocot::refbind_indices(BoundingBox(0, 0, 1.0 / 24, 1.0 / 24), g);
  EXPECT_EQ(one.indices, std::vector<std::uint32_t>{0});

  const auto quarter = vocot::refbind_indices(BoundingBox(0.5, 0.5, 1, 1), g);
  EXPECT_EQ(quarter.row_lo, 12u);
  EXPECT_EQ(quarter.row_hi, 23u);
  EXPECT_EQ(quarter.col_lo, 12u);
  EXPECT_EQ(quarter.col_hi, 23u);
  EXPECT_EQ(quarter.indices.size(), 144u);
}

TEST(RefBind, DogSpan) {
  const auto s = vocot::refbind_indices(BoundingBox(0.27, 0.08, 0.92, 0.81), PatchGrid(24, 24));
  EXPECT_EQ(s.row_lo, 1u);
  EXPECT_EQ(s.row_hi, 19u);
  EXPECT_EQ(s.col_lo, 6u);
  EXPECT_EQ(s.col_hi, 22u);
  EXPECT_EQ(s.indices.size(), 323u);
}

TEST(RefBind, DegenerateBoxTakesContainingCell) {
  const PatchGrid g(4, 4);
  EXPECT_EQ(vocot::refbind_indices(BoundingBox(0.3, 0.3, 0.3, 0.3), g).indices,
            std::vector<std::uint32_t>{5});
  EXPECT_EQ(vocot::refbind_indices(BoundingBox(1, 1, 1, 1), g).indices,
            std::vector<std::uint32_t>{15});
  EXPECT_EQ(vocot::refbind_indices(BoundingBox(0.5, 0.5, 0.5, 0.5), g).indices,
            std::vector<std::uint32_t>{10});
}

TEST(RefBind, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> dim(1, 32);
  for (int i = 0; i < 2000; ++i) {
    const auto rows = dim(rng), cols = dim(rng);
    const auto rb = oracle::random_rational_box(rng, i % 3 == 0 ? rows * cols : 997);
    const BoundingBox box(rb.x_min(), rb.y_min(), rb.x_max(), rb.y_max());
    const PatchGrid g(static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols));
    const auto span = vocot::refbind_indices(box, g);
    ASSERT_EQ(span.indices, oracle::refbind_cells(rb, rows, cols))
        << vocot::format_box(box, 6) << " on " << rows << "x" << cols;
    EXPECT_EQ(span.indices.size(), std::size_t{span.span_rows()} * span.span_cols());
  }
}

TEST(RefBind, CenterRuleKeepsCellsWhoseCenterIsInside) {
  const PatchGrid g(4, 4);
  const auto s = vocot::refbind_indices(BoundingBox(0.1, 0.1, 0.6, 0.4), g, vocot::CoverRule::kCenter);
  // centers 0.125, 0.375 (cols also 0.625 > 0.6 excluded)
  EXPECT_EQ(s.indices, (std::vector<std::uint32_t>{0, 1, 4, 5}));
  const auto tiny = vocot::refbind_indices(BoundingBox(0.3, 0.3, 0.32, 0.32), g, vocot::CoverRule::kCenter);
  EXPECT_EQ(tiny.indices.size(), 1u);
}

TEST(SpanFromIndices, InvertsRefBind) {
  const PatchGrid g(24, 24);
  const auto s = vocot::refbind_indices(BoundingBox(0.27, 0.08, 0.92, 0.81), g);
  const auto back = vocot::span_from_indices(s.indices, g);
  EXPECT_EQ(back.row_lo, s.row_lo);
  EXPECT_EQ(back.col_hi, s.col_hi);
  EXPECT_THROW(vocot::span_from_indices({0, 2}, g), vocot::InvalidInput);
  EXPECT_THROW(vocot::span_from_indices({}, g), vocot::InvalidInput);
}

TEST(FormatCoords, FixedDecimalsHalfUp) {
  EXPECT_EQ(vocot::format_coords(BoundingBox(0.27, 0.08, 0.92, 0.81), 2), "0.27, 0.08, 0.92, 0.81");
  EXPECT_EQ(vocot::format_coords(BoundingBox(0, 0, 1, 1), 3), "0.000, 0.000, 1.000, 1.000");
  EXPECT_EQ(vocot::format_coords(BoundingBox(0.2235, 0.219, 0.386, 0.5915), 3), "0.224, 0.219, 0.386, 0.592");
  EXPECT_EQ(vocot::format_fixed(0.125, 2), "0.13");
  EXPECT_EQ(vocot::format_fixed(0.9999, 3), "1.000");
}

TEST(ParseCoords, AcceptedForms) {
  const BoundingBox shelf(0.224, 0.219, 0.386, 0.592);
  EXPECT_EQ(vocot::parse_coords("[0.224, 0.219, 0.386, 0.592]"), shelf);
  EXPECT_EQ(vocot::parse_coords("0.224, 0.219, 0.386, 0.592"), shelf);
  EXPECT_EQ(vocot::parse_coords("[0.22 , 0.12 , 0.29 , 0.32 ]"), BoundingBox(0.22, 0.12, 0.29, 0.32));
  EXPECT_EQ(vocot::parse_coords("0, 0, 1, 1"), BoundingBox(0, 0, 1, 1));
}

TEST(ParseCoords, ErrorsCarryOffsets) {
  try {
    vocot::parse_coords("[0.1, 0.2, 0.3]");
    FAIL();
  } catch (const vocot::ParseError& e) {
    EXPECT_GT(e.offset(), 0u);
  }
  EXPECT_THROW(vocot::parse_coords("[0.5, 0.2, 0.3, 0.4]"), vocot::ParseError);
  EXPECT_THROW(vocot::parse_coords("[1.5, 0.2, 1.6, 0.4]"), vocot::ParseError);
  EXPECT_THROW(vocot::parse_coords("0.1, 0.2, 0.3, 0.4 junk"), vocot::ParseError);
  EXPECT_THROW(vocot::parse_coords("[0.1, 0.2, 0.3, 0.4"), vocot::ParseError);
}

TEST(ParseCoords, RoundTripWithinHalfUlpOfPrecision) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int p = 1; p <= 4; ++p) {
    for (int i = 0; i < 200; ++i) {
      double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
      const BoundingBox box(std::min(a, b), std::min(c, d), std::max(a, b), std::max(c, d));
      const auto back = vocot::parse_coords(vocot::format_box(box, p));
      const double tol = 0.5 * std::pow(10.0, -p) + 1e-12;
      for (int k = 0; k < 4; ++k) EXPECT_LE(std::abs(back.coords()[k] - box.coords()[k]), tol);
    }
  }
}

#include <gtest/gtest.h>

#include "../support/fixtures.hpp"
#include "../support/param_oracle.hpp"

using namespace nasbench;

namespace {

std::int64_t reference(const ModelSpec& s, const SkeletonConfig& cfg = {}) {
  const auto p = prune(s);
  return oracle::network_parameters(p.matrix(), fixtures::ops_of(p), cfg.stem_channels, cfg.num_stacks,
                                    cfg.cells_per_stack, cfg.num_classes);
}

}  // namespace

TEST(NetModel, ChainCellHandValue) {
  // First stack, 128 -> 128: 1x1 projection (16384 + 256) + 3x3 conv (147456 + 256).
  const auto plan = build_plan(fixtures::chain());
  std::int64_t first_cell = 0;
  for (const auto& l : plan.layers)
    if (l.cell == 0) first_cell += layer_parameters(l);
  EXPECT_EQ(first_cell, 164352);
}

TEST(NetModel, MatchesMaterializingOracle) {
  Rng rng(50);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_spec(rng);
    EXPECT_EQ(parameter_count(s), reference(s)) << to_text(s);
  }
  EXPECT_EQ(parameter_count(fixtures::resnet_like()), reference(fixtures::resnet_like()));
  EXPECT_EQ(parameter_count(fixtures::inception_like()), reference(fixtures::inception_like()));
  EXPECT_EQ(parameter_count(fixtures::chain()), reference(fixtures::chain()));
}

TEST(NetModel, MatchesOracleOnOtherSkeletons) {
  Rng rng(51);
  const SkeletonConfig small{16, 2, 2, 5};
  for (int i = 0; i < 20; ++i) {
    const auto s = random_spec(rng);
    EXPECT_EQ(parameter_count(s, small), reference(s, small));
  }
}

TEST(NetModel, TrivialCell) {
  // in -> out only: each cell is one projection.
  const auto plan = build_plan(ModelSpec{});
  EXPECT_EQ(plan.cells.size(), 9U);
  EXPECT_EQ(parameter_count(plan), reference(ModelSpec{}));
}

TEST(NetModel, VertexChannelsSplitOutputWidth) {
  // Three branches into the output: 128 = 43 + 43 + 42.
  const auto ch = vertex_channels(prune(fixtures::inception_like()), 128, 128);
  EXPECT_EQ(ch[0], 128);
  EXPECT_EQ(ch[6], 128);
  EXPECT_EQ(ch[2], 43);
  EXPECT_EQ(ch[3], 43);
  EXPECT_EQ(ch[5], 42);
  EXPECT_EQ(ch[1], 43);  // feeds vertex 2 only
  EXPECT_EQ(ch[4], 42);  // feeds vertex 5 only
}

TEST(NetModel, PlanSkeleton) {
  const auto plan = build_plan(fixtures::resnet_like());
  EXPECT_EQ(plan.layers.front().kind, LayerKind::Stem);
  EXPECT_EQ(plan.layers.back().kind, LayerKind::Dense);
  EXPECT_EQ(plan.layers.back().c_in, 512);
  int downsamples = 0;
  for (const auto& l : plan.layers) downsamples += l.kind == LayerKind::Downsample;
  EXPECT_EQ(downsamples, 2);
  EXPECT_EQ(plan.cells[3].c_in, 128);
  EXPECT_EQ(plan.cells[3].c_out, 256);
  const auto j = plan_to_json(plan);
  EXPECT_EQ(j["parameter_count"].get<std::int64_t>(), parameter_count(plan));
}

TEST(NetModel, InvalidCellRejected) {
  EXPECT_THROW(build_plan(fixtures::spec({{0, 0}, {0, 0}}, {})), ValidityError);
  EXPECT_THROW(build_plan(fixtures::chain(), SkeletonConfig{0, 3, 3, 10}), PreconditionError);
}

TEST(StructuralMetrics, KnownCells) {
  EXPECT_EQ(structural_metrics(ModelSpec{}).depth, 1);
  EXPECT_EQ(structural_metrics(ModelSpec{}).width, 1);
  EXPECT_EQ(structural_metrics(fixtures::chain()).depth, 2);
  EXPECT_EQ(structural_metrics(fixtures::chain()).width, 1);
  EXPECT_EQ(structural_metrics(fixtures::resnet_like()).depth, 3);
  // Any bipartition counts: {in, v2} against {v1, out} cuts three edges.
  EXPECT_EQ(structural_metrics(fixtures::resnet_like()).width, 3);
  EXPECT_EQ(structural_metrics(fixtures::inception_like()).depth, 3);
  EXPECT_EQ(structural_metrics(fixtures::inception_like()).width, 5);
  const auto parallel = fixtures::spec({{0, 1, 1, 1, 0}, {0, 0, 0, 0, 1}, {0, 0, 0, 0, 1}, {0, 0, 0, 0, 1}, {0, 0, 0, 0, 0}},
                                       {Op::Conv3x3, Op::Conv1x1, Op::MaxPool3x3});
  EXPECT_EQ(structural_metrics(parallel).depth, 2);
  EXPECT_EQ(structural_metrics(parallel).width, 3);
  EXPECT_THROW(structural_metrics(fixtures::spec({{0, 0}, {0, 0}}, {})), ValidityError);
}

TEST(StructuralMetrics, BoundsOverMiniSpace) {
  for (const auto& c : fixtures::space(6)->cells()) {
    const auto m = structural_metrics(c.spec);
    ASSERT_GE(m.depth, 1);
    ASSERT_LE(m.depth, 6);
    ASSERT_GE(m.width, 1);
    ASSERT_LE(m.width, 9);
  }
}

#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "vocot/sequence.hpp"

using vocot::BoundingBox;
using vocot::GroundedThought;
using vocot::PatchGrid;

namespace {

GroundedThought dog_thought() {
  GroundedThought t;
  const auto& b = fixtures::kDogBox;
  t.append_mention("dog", BoundingBox(b[0], b[1], b[2], b[3]));
  return t;
}

std::vector<vocot::seg::VisualRef> embedded_refs(const vocot::VoCoTSequence& seq) {
  std::vector<vocot::seg::VisualRef> out;
  for (const auto& s : seq.segments) {
    if (const auto* v = std::get_if<vocot::seg::VisualRef>(&s)) out.push_back(*v);
  }
  return out;
}

}  // namespace

TEST(Assemble, DogExample) {
  const auto seq = vocot::assemble(dog_thought(), PatchGrid(24, 24), 2);
  EXPECT_FALSE(vocot::check_well_formed(seq));
  ASSERT_EQ(seq.segments.size(), 5u);
  const auto& ref = std::get<vocot::seg::VisualRef>(seq.segments[4]);
  EXPECT_EQ(ref.span.indices.size(), 323u);
  EXPECT_EQ(ref.span.indices.front(), 1u * 24 + 6);
  EXPECT_EQ(ref.span.indices.back(), 19u * 24 + 22);
  const auto r = vocot::render_training_text(seq);
  EXPECT_EQ(r.text, fixtures::kDogRendered);
  ASSERT_EQ(r.visual_refs.size(), 1u);
  EXPECT_EQ(r.visual_refs[0].pos, r.text.find("<obj_0"));
  EXPECT_EQ(vocot::visual_token_count(seq), 323u);
}

TEST(Assemble, InstructionLayout) {
  const auto seq = vocot::assemble_instruction("Where is the dog?", dog_thought(), PatchGrid(2, 2), 2);
  EXPECT_FALSE(vocot::check_well_formed(seq));
  const auto r = vocot::render_training_text(seq);
  EXPECT_EQ(r.text, "<grounding><image:4>Where is the dog? " + std::string(vocot::cot_trigger_text()) +
                        " dog [c] 0.27, 0.08, 0.92, 0.81 [/c] <obj_0:4>");
  EXPECT_EQ(vocot::visual_token_count(seq), 8u);
  const auto plain = vocot::assemble_instruction("Q", dog_thought(), PatchGrid(2, 2), 2, {false, false, false});
  EXPECT_EQ(vocot::render_training_text(plain).text, "Q dog [c] 0.27, 0.08, 0.92, 0.81 [/c] <obj_0:4>");
}

TEST(WellFormed, Violations) {
  using namespace vocot::seg;
  vocot::VoCoTSequence s;
  s.grid = PatchGrid(2, 2);
  s.segments = {Text{"a"}, GroundingTrigger{}};
  EXPECT_TRUE(vocot::check_well_formed(s));
  s.segments = {CoordOpen{}, CoordOpen{}};
  EXPECT_TRUE(vocot::check_well_formed(s));
  s.segments = {CoordClose{}};
  EXPECT_TRUE(vocot::check_well_formed(s));
  s.segments = {CoordOpen{}, CoordText{"0, 0, 1, 1"}};
  EXPECT_TRUE(vocot::check_well_formed(s));
  s.segments = {Text{"x"}, VisualRef{vocot::refbind_indices(BoundingBox(0, 0, 1, 1), s.grid)}};
  EXPECT_TRUE(vocot::check_well_formed(s));
  auto bad = vocot::refbind_indices(BoundingBox(0, 0, 1, 1), s.grid);
  bad.indices.back() = 9;
  s.segments = {CoordOpen{}, CoordText{"0, 0, 1, 1"}, CoordClose{}, VisualRef{bad}};
  EXPECT_TRUE(vocot::check_well_formed(s));
}

TEST(TrainingText, EscapesReservedStrings) {
  GroundedThought t;
  t.append_text("say [c] or <obj_1:2> or \\ then ");
  t.append_mention("cat", BoundingBox(0, 0, 0.5, 0.5));
  const auto seq = vocot::assemble(t, PatchGrid(4, 4), 1);
  const auto r = vocot::render_training_text(seq);
  EXPECT_EQ(r.text.rfind("say \\[c] or \\<obj_1:2> or \\\\ then cat [c] ", 0), 0u) << r.text;
  EXPECT_EQ(vocot::parse_training_text(r, PatchGrid(4, 4)), seq);
}

TEST(TrainingText, ParseErrors) {
  const PatchGrid g(4, 4);
  EXPECT_THROW(vocot::parse_training_text({"a [c] 0, 0, 1, 1", {}}, g), vocot::ParseError);
  EXPECT_THROW(vocot::parse_training_text({"a [c] 0, 0, 1, 1 [/c] <obj_0:16>", {}}, g), vocot::ParseError);
  EXPECT_THROW(vocot::parse_training_text({"dangling \\", {}}, g), vocot::ParseError);
  EXPECT_THROW(vocot::parse_training_text({"stray [/c]", {}}, g), vocot::ParseError);
}

TEST(TrainingText, RoundTripOnRandomSequences) {
  static const char* kTexts[] = {"Find the ", ". Then ", " near [c]x ", " <obj_9:1> ", " and \\ ", ", "};
  static const char* kNames[] = {"dog", "cup", "tall tree", ""};
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> t(0, 5), nm(0, 3), coord(0, 100), dim(1, 32);
  for (int i = 0; i < 1000; ++i) {
    GroundedThought th;
    for (int k = 1 + t(rng) % 4; k > 0; --k) {
      th.append_text(kTexts[t(rng)]);
      int a = coord(rng), b = coord(rng), c = coord(rng), d = coord(rng);
      if (a > b) std::swap(a, b);
      if (c > d) std::swap(c, d);
      th.append_mention(kNames[nm(rng)], BoundingBox(a / 100.0, c / 100.0, b / 100.0, d / 100.0));
    }
    const PatchGrid g(static_cast<std::uint32_t>(dim(rng)), static_cast<std::uint32_t>(dim(rng)));
    const auto seq = vocot::assemble_instruction(i % 2 ? "Why?" : "", th, g, 2 + i % 2);
    const auto r = vocot::render_training_text(seq);
    const auto back = vocot::parse_training_text(r, g);
    ASSERT_EQ(back, seq) << r.text;
    EXPECT_EQ(vocot::render_training_text(back), r);
  }
}

TEST(Activator, ReplayReproducesEmbeddedRefs) {
  const PatchGrid g(24, 24);
  const auto seq = vocot::assemble(dog_thought(), g, 2);
  const auto replay = vocot::activate_refbind(seq.segments, g);
  EXPECT_EQ(replay.refs, embedded_refs(seq));
  const auto from_text = vocot::activate_refbind(vocot::tokenize_output_text(vocot::render_training_text(seq).text), g);
  EXPECT_EQ(from_text.refs, embedded_refs(seq));
  EXPECT_TRUE(from_text.diagnostics.empty());
}

TEST(Activator, StreamErrorsAndDiagnostics) {
  using namespace vocot::seg;
  const PatchGrid g(4, 4);
  vocot::RefBindActivator a(g);
  EXPECT_FALSE(a.feed(Text{"x"}));
  EXPECT_THROW(a.feed(CoordClose{}), vocot::StreamError);
  EXPECT_THROW(a.feed(CoordText{"0, 0, 1, 1"}), vocot::StreamError);
  a.feed(CoordOpen{});
  EXPECT_THROW(a.feed(CoordOpen{}), vocot::StreamError);

  vocot::RefBindActivator b(g);
  b.feed(CoordOpen{});
  b.feed(CoordText{"0, 0, 1, 1"});
  const auto ref = b.feed(CoordClose{});
  ASSERT_TRUE(ref);
  EXPECT_EQ(ref->span.indices.size(), 16u);
  b.feed(CoordOpen{});
  b.feed(CoordText{"0.9, 0, 0.1, 1"});
  EXPECT_FALSE(b.feed(CoordClose{}));
  EXPECT_EQ(b.diagnostics().size(), 1u);
}

TEST(Activator, LenientTokenizer) {
  const auto toks = vocot::tokenize_output_text("a[c]0.1,0.1,0.2,0.2[/c]b");
  ASSERT_EQ(toks.size(), 5u);
  EXPECT_EQ(std::get<vocot::seg::CoordText>(toks[2]).text, "0.1,0.1,0.2,0.2");
  const auto r = vocot::activate_refbind(toks, PatchGrid(10, 10));
  ASSERT_EQ(r.refs.size(), 1u);
  EXPECT_EQ(r.refs[0].span.indices, (std::vector<std::uint32_t>{11}));
}

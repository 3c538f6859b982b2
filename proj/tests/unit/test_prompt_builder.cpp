#include <gtest/gtest.h>

#include "goldens.hpp"
#include "icc/error.hpp"
#include "icc/prompt_builder.hpp"

using icc::IceExample;
using icc::SequenceTemplate;

namespace {

const std::string& text_of(const icc::Segment& seg) {
    return std::get<icc::TextSegment>(seg).text;
}

} // namespace

TEST(PromptBuilder, SingleLabelBlock) {
    const SequenceTemplate tmpl;
    const auto block = icc::build_ice_block({"i7", "bull", std::nullopt}, "bull", tmpl);
    ASSERT_EQ(block.size(), 2u);
    EXPECT_EQ(std::get<icc::ImageRef>(block[0]).id, "i7");
    EXPECT_EQ(text_of(block[1]), "Output:bull<|endofchunk|>");
}

TEST(PromptBuilder, DescriptionBlock) {
    const SequenceTemplate tmpl;
    const auto block = icc::build_ice_block({"car1", "BMW X5 2007", std::nullopt}, "BMW X5 2007", tmpl,
                                            std::string("a black body, a silver bumper, a black grille, a large chrome headlight"));
    EXPECT_NE(text_of(block[1]).find("which has a black body, a silver bumper"), std::string::npos);
    EXPECT_EQ(text_of(block[1]).rfind("Output:BMW X5 2007, which has ", 0), 0u);
}

TEST(PromptBuilder, BlockPreconditions) {
    const SequenceTemplate tmpl;
    EXPECT_THROW(icc::build_ice_block({"i7", "bull", std::nullopt}, "", tmpl), icc::Error);
    EXPECT_THROW(icc::build_ice_block({"i7", "bull", std::nullopt}, "bull<image>", tmpl), icc::Error);
    SequenceTemplate broken;
    broken.ice_block = "Output:";
    EXPECT_THROW(icc::build_ice_block({"i7", "bull", std::nullopt}, "bull", broken), icc::Error);
}

TEST(PromptBuilder, SequenceShape) {
    const SequenceTemplate tmpl;
    const std::vector<std::vector<icc::Segment>> blocks{
        icc::build_ice_block({"i3", "ox", std::nullopt}, "ox", tmpl),
        icc::build_ice_block({"i7", "bull", std::nullopt}, "bull", tmpl)};
    const auto seq = icc::assemble_sequence(blocks, "t0", tmpl, "SL");
    EXPECT_EQ(seq.image_count(), 3u);
    EXPECT_EQ(seq.image_ids(), (std::vector<std::string>{"i3", "i7", "t0"}));
    EXPECT_EQ(seq.shots, 2u);

    const auto zero = icc::assemble_sequence({}, "t0", tmpl, "SL");
    EXPECT_EQ(zero.image_count(), 1u);
    EXPECT_EQ(icc::serialize(zero, tmpl).text, "<image>Output:");
}

TEST(PromptBuilder, OneShotSingleLabelString) {
    const SequenceTemplate tmpl;
    const auto seq = icc::assemble_sequence({icc::build_ice_block({"i7", "bull", std::nullopt}, "bull", tmpl)}, "t0", tmpl);
    const auto s = icc::serialize(seq, tmpl);
    EXPECT_EQ(s.text, "<image>Output:bull<|endofchunk|><image>Output:");
    EXPECT_EQ(s.images, (std::vector<std::string>{"i7", "t0"}));
    EXPECT_EQ(icc::find_image_markers(s.text, "<image>"), (std::vector<std::size_t>{0, 32}));
}

TEST(PromptBuilder, MarkersAlignWithImagesForEveryGolden) {
    for (const auto& c : icc::fixtures::golden_cases()) {
        const auto markers = icc::find_image_markers(c.text, "<image>");
        const std::size_t shots = c.name.find("2shot") != std::string::npos ? 2 : 1;
        EXPECT_EQ(markers.size(), shots + 1) << c.name;
    }
}

TEST(PromptBuilder, GoldenPrompts) {
    for (const auto& c : icc::fixtures::golden_cases()) {
        const auto result = icc::fixtures::check_golden(c);
        EXPECT_TRUE(result.ok) << result.message;
    }
}

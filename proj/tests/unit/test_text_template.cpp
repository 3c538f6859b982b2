#include <map>

#include <gtest/gtest.h>

#include "icc/error.hpp"
#include "icc/text_template.hpp"

namespace {

icc::PlaceholderLookup table(std::map<std::string, std::string> values) {
    return [values = std::move(values)](std::string_view name) -> std::optional<std::string> {
        auto it = values.find(std::string(name));
        if (it == values.end()) {
            return std::nullopt;
        }
        return it->second;
    };
}

} // namespace

TEST(TextTemplate, SubstitutesNamedPlaceholders) {
    EXPECT_EQ(icc::render_template("Output:{label_text}", table({{"label_text", "bull"}})), "Output:bull");
    EXPECT_EQ(icc::render_template("{a}{b}{a}", table({{"a", "1"}, {"b", "2"}})), "121");
    EXPECT_EQ(icc::render_template("plain", table({})), "plain");
}

TEST(TextTemplate, DoubledBracesAreLiteral) {
    EXPECT_EQ(icc::render_template("{{x}} {x}", table({{"x", "v"}})), "{x} v");
}

TEST(TextTemplate, UnknownPlaceholderIsAnError) {
    EXPECT_THROW(icc::render_template("{missing}", table({})), icc::Error);
}

TEST(TextTemplate, PlaceholderQueries) {
    EXPECT_EQ(icc::placeholders("{a} and {b} and {a}"), (std::vector<std::string>{"a", "b", "a"}));
    EXPECT_TRUE(icc::has_placeholder("x {label} y", "label"));
    EXPECT_FALSE(icc::has_placeholder("x {{label}} y", "label"));
    try {
        icc::require_placeholders("Q: what is this?", {"label"}, "query");
        FAIL();
    } catch (const icc::Error& e) {
        EXPECT_EQ(e.code(), icc::ErrorCode::TemplateMissingPlaceholder);
    }
}

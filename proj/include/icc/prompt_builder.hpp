#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "icc/ice_selection.hpp"

namespace icc {

struct ImageRef {
    std::string id;
    bool operator==(const ImageRef&) const = default;
};

struct TextSegment {
    std::string text;
    bool operator==(const TextSegment&) const = default;
};

using Segment = std::variant<ImageRef, TextSegment>;

struct PromptSequence {
    std::vector<Segment> segments;
    std::string strategy;
    std::size_t shots = 0;

    std::size_t image_count() const;
    std::vector<std::string> image_ids() const;

    bool operator==(const PromptSequence&) const = default;
};

// Flamingo-style interleaving by default: "<image>Output:bull<|endofchunk|>".
struct SequenceTemplate {
    std::string image_marker = "<image>";
    std::string ice_block = "Output:{label_text}";
    std::string description_block = "Output:{label_text}, which has {description}";
    std::string query_block = "Output:";
    std::string block_separator = "<|endofchunk|>";
};

struct SerializedPrompt {
    std::string text;
    std::vector<std::string> images;
};

// [ImageRef(example), Text(block + separator)]. The description block is used
// when a description is supplied.
std::vector<Segment> build_ice_block(const IceExample& example, const std::string& label_text,
                                     const SequenceTemplate& tmpl,
                                     const std::optional<std::string>& description = std::nullopt);

// ICE blocks in the given order, then the test image and the answer cue.
PromptSequence assemble_sequence(const std::vector<std::vector<Segment>>& ice_blocks,
                                 const std::string& test_image_id, const SequenceTemplate& tmpl,
                                 std::string strategy = {});

// Text segments must not contain the image marker; markers are inserted here.
SerializedPrompt serialize(const PromptSequence& prompt, const SequenceTemplate& tmpl);

// Byte offsets of every image marker in serialized text.
std::vector<std::size_t> find_image_markers(const std::string& text, const std::string& marker);

} // namespace icc

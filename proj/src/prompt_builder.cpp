#include "icc/prompt_builder.hpp"

#include "icc/error.hpp"
#include "icc/text_template.hpp"

namespace icc {

std::size_t PromptSequence::image_count() const {
    std::size_t n = 0;
    for (const auto& seg : segments) {
        n += std::holds_alternative<ImageRef>(seg) ? 1 : 0;
    }
    return n;
}

std::vector<std::string> PromptSequence::image_ids() const {
    std::vector<std::string> ids;
    for (const auto& seg : segments) {
        if (const auto* img = std::get_if<ImageRef>(&seg)) {
            ids.push_back(img->id);
        }
    }
    return ids;
}

namespace {

void check_no_marker(const std::string& text, const SequenceTemplate& tmpl) {
    if (!tmpl.image_marker.empty() && text.find(tmpl.image_marker) != std::string::npos) {
        raise(ErrorCode::InvalidArgument, "text contains the image marker '" + tmpl.image_marker + "'");
    }
}

} // namespace

std::vector<Segment> build_ice_block(const IceExample& example, const std::string& label_text,
                                     const SequenceTemplate& tmpl,
                                     const std::optional<std::string>& description) {
    if (label_text.empty()) {
        raise(ErrorCode::InvalidArgument, "empty label text for '" + example.image_id + "'");
    }
    std::string body;
    if (description) {
        require_placeholders(tmpl.description_block, {"label_text", "description"}, "description block");
        body = render_template(tmpl.description_block, [&](std::string_view name) -> std::optional<std::string> {
            if (name == "label_text") return label_text;
            if (name == "description") return *description;
            return std::nullopt;
        });
    } else {
        require_placeholders(tmpl.ice_block, {"label_text"}, "ICE block");
        body = render_template(tmpl.ice_block, [&](std::string_view name) -> std::optional<std::string> {
            if (name == "label_text") return label_text;
            return std::nullopt;
        });
    }
    body += tmpl.block_separator;
    check_no_marker(body, tmpl);
    return {ImageRef{example.image_id}, TextSegment{std::move(body)}};
}

PromptSequence assemble_sequence(const std::vector<std::vector<Segment>>& ice_blocks,
                                 const std::string& test_image_id, const SequenceTemplate& tmpl,
                                 std::string strategy) {
    check_no_marker(tmpl.query_block, tmpl);
    PromptSequence seq;
    seq.strategy = std::move(strategy);
    seq.shots = ice_blocks.size();
    for (const auto& block : ice_blocks) {
        seq.segments.insert(seq.segments.end(), block.begin(), block.end());
    }
    seq.segments.push_back(ImageRef{test_image_id});
    seq.segments.push_back(TextSegment{tmpl.query_block});
    return seq;
}

SerializedPrompt serialize(const PromptSequence& prompt, const SequenceTemplate& tmpl) {
    SerializedPrompt out;
    for (const auto& seg : prompt.segments) {
        if (const auto* img = std::get_if<ImageRef>(&seg)) {
            out.text += tmpl.image_marker;
            out.images.push_back(img->id);
        } else {
            const auto& text = std::get<TextSegment>(seg).text;
            check_no_marker(text, tmpl);
            out.text += text;
        }
    }
    return out;
}

std::vector<std::size_t> find_image_markers(const std::string& text, const std::string& marker) {
    std::vector<std::size_t> positions;
    if (marker.empty()) {
        return positions;
    }
    for (auto pos = text.find(marker); pos != std::string::npos; pos = text.find(marker, pos + marker.size())) {
        positions.push_back(pos);
    }
    return positions;
}

} // namespace icc

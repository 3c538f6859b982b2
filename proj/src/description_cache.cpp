#include "icc/description_cache.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "icc/error.hpp"
#include "icc/jsonl.hpp"
#include "icc/synthetic_backend.hpp"
#include "icc/text_template.hpp"

namespace icc {

std::string_view to_string(DescriptionOrigin origin) {
    switch (origin) {
    case DescriptionOrigin::Generated: return "generated";
    case DescriptionOrigin::Cache: return "cache";
    case DescriptionOrigin::Manual: return "manual";
    }
    return "generated";
}

std::vector<std::string> select_reference_images(const EmbeddingStore& store, const LabelCatalog& catalog,
                                                 const std::string& label, const SupportSet& support,
                                                 std::size_t count) {
    const auto& label_id = catalog.embedding_id(label);
    const auto nearest = store.top_k_by_similarity(label_id, support.ids(), std::max<std::size_t>(count, 1));
    std::vector<std::string> ids;
    for (const auto& nb : nearest) {
        ids.push_back(nb.id);
    }
    return ids;
}

std::string select_reference_image(const EmbeddingStore& store, const LabelCatalog& catalog,
                                   const std::string& label, const SupportSet& support) {
    return select_reference_images(store, catalog, label, support, 1).front();
}

PromptSequence build_description_query(const std::string& label, const DatasetPromptConfig& cfg,
                                       const std::vector<std::string>& reference_image_ids) {
    require_placeholders(cfg.description_query_template, {"label"}, "description query");
    std::string text;
    for (const auto& ex : cfg.exemplars) {
        text += ex;
        text += '\n';
    }
    text += render_template(cfg.description_query_template, [&](std::string_view name) -> std::optional<std::string> {
        if (name == "label") return label;
        return std::nullopt;
    });
    PromptSequence seq;
    seq.strategy = "describe";
    for (const auto& id : reference_image_ids) {
        seq.segments.push_back(ImageRef{id});
    }
    seq.segments.push_back(TextSegment{std::move(text)});
    return seq;
}

std::string clean_completion(const std::string& raw, std::size_t max_tokens) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    std::string text = raw;
    text.erase(text.begin(), std::find_if_not(text.begin(), text.end(), is_space));

    // first blank line: a newline followed by optional spaces and another newline
    for (std::size_t pos = text.find('\n'); pos != std::string::npos; pos = text.find('\n', pos + 1)) {
        std::size_t j = pos + 1;
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\r')) {
            ++j;
        }
        if (j < text.size() && text[j] == '\n') {
            text.resize(pos);
            break;
        }
    }
    text = truncate_tokens(text, max_tokens);
    for (char& c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x20 || u == 0x7f) {
            c = ' ';
        }
    }
    text.erase(text.begin(), std::find_if_not(text.begin(), text.end(), is_space));
    while (!text.empty() && is_space(text.back())) {
        text.pop_back();
    }
    return text;
}

DescriptionCache::DescriptionCache(std::filesystem::path path) : path_(std::move(path)) {
    if (!std::filesystem::exists(*path_)) {
        return;
    }
    jsonl::for_each_object(*path_, ErrorCode::MalformedManifest, [&](const jsonl::Json& obj, std::size_t line) {
        const auto where = path_->string() + ":" + std::to_string(line);
        jsonl::check_keys(obj, {"label", "text", "origin", "backend_fingerprint"}, {"label", "text"},
                          ErrorCode::MalformedManifest, where);
        const auto label = jsonl::get_string(obj, "label", ErrorCode::MalformedManifest, where);
        const auto text = jsonl::get_string(obj, "text", ErrorCode::MalformedManifest, where);
        std::string origin = "generated";
        if (obj.contains("origin")) {
            origin = jsonl::get_string(obj, "origin", ErrorCode::MalformedManifest, where);
        }
        if (origin != "generated" && origin != "manual" && origin != "cache") {
            raise(ErrorCode::MalformedManifest, where + ": unknown origin '" + origin + "'");
        }
        insert(label, Entry{text, origin == "manual"});
    });
}

void DescriptionCache::insert(const std::string& label, Entry entry) {
    auto it = entries_.find(label);
    if (it != entries_.end() && it->second.manual && !entry.manual) {
        return;
    }
    entries_[label] = std::move(entry);
}

std::optional<VisualDescription> DescriptionCache::lookup(const std::string& label) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(label);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return VisualDescription{label, it->second.text,
                             it->second.manual ? DescriptionOrigin::Manual : DescriptionOrigin::Cache, std::nullopt};
}

void DescriptionCache::put(const VisualDescription& desc, const std::string& backend_fingerprint) {
    std::lock_guard lock(mutex_);
    const bool manual = desc.origin == DescriptionOrigin::Manual;
    insert(desc.label, Entry{desc.text, manual});
    if (!path_) {
        return;
    }
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    if (!out) {
        raise(ErrorCode::IoError, "cannot append to " + path_->string());
    }
    nlohmann::ordered_json j;
    j["label"] = desc.label;
    j["text"] = desc.text;
    j["origin"] = manual ? "manual" : "generated";
    j["backend_fingerprint"] = backend_fingerprint;
    out << j.dump() << '\n';
}

std::mutex& DescriptionCache::label_mutex(const std::string& label) {
    std::lock_guard lock(mutex_);
    auto& slot = label_locks_[label];
    if (!slot) {
        slot = std::make_unique<std::mutex>();
    }
    return *slot;
}

VisualDescription DescriptionCache::get_or_generate(const std::string& label, const EmbeddingStore& store,
                                                    const LabelCatalog& catalog, const SupportSet& support,
                                                    const Gateway& gateway, const DescriptionOptions& options,
                                                    const SequenceTemplate& tmpl) {
    if (!catalog.contains(label)) {
        raise(ErrorCode::UnknownLabel, "'" + label + "' is not in the catalog");
    }
    std::lock_guard per_label(label_mutex(label));
    if (auto hit = lookup(label)) {
        return *hit;
    }
    const auto refs = select_reference_images(store, catalog, label, support, options.reference_image_count);
    const auto query = build_description_query(label, options.prompt, refs);
    const auto wire = serialize(query, tmpl);
    GenerateRequest req{wire.text, wire.images, options.max_generation_tokens, options.length_penalty};
    const auto resp = gateway.generate(req);
    auto text = clean_completion(resp.text, static_cast<std::size_t>(std::max(0, options.max_generation_tokens)));
    if (text.empty()) {
        raise(ErrorCode::EmptyGeneration, "backend returned no description for '" + label + "'");
    }
    VisualDescription desc{label, std::move(text), DescriptionOrigin::Generated, refs.front()};
    put(desc, gateway.fingerprint());
    return desc;
}

std::size_t DescriptionCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

} // namespace icc

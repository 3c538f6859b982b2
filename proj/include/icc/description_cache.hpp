#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icc/embedding_store.hpp"
#include "icc/ice_selection.hpp"
#include "icc/prompt_builder.hpp"
#include "icc/scorer_gateway.hpp"

namespace icc {

enum class DescriptionOrigin { Generated, Cache, Manual };

std::string_view to_string(DescriptionOrigin origin);

struct VisualDescription {
    std::string label;
    std::string text;
    DescriptionOrigin origin = DescriptionOrigin::Generated;
    std::optional<std::string> reference_image_id;
};

inline constexpr std::string_view kDefaultDescriptionQuery =
    "Q: What are the useful visual features for distinguishing a {label} in the image? "
    "A: There are several features to identify:";

struct DatasetPromptConfig {
    std::string dataset;
    std::string description_query_template{kDefaultDescriptionQuery};
    // Example outputs placed verbatim ahead of the question, one per line.
    std::vector<std::string> exemplars;
};

struct DescriptionOptions {
    DatasetPromptConfig prompt;
    int max_generation_tokens = 20;
    double length_penalty = 1.0;
    std::size_t reference_image_count = 1;
};

// Support images most similar to the label embedding, best first, ties by id.
std::vector<std::string> select_reference_images(const EmbeddingStore& store, const LabelCatalog& catalog,
                                                 const std::string& label, const SupportSet& support,
                                                 std::size_t count);

std::string select_reference_image(const EmbeddingStore& store, const LabelCatalog& catalog,
                                   const std::string& label, const SupportSet& support);

// [image refs...] + exemplars + rendered question.
PromptSequence build_description_query(const std::string& label, const DatasetPromptConfig& cfg,
                                       const std::vector<std::string>& reference_image_ids);

// Leading whitespace dropped, cut at the first blank line, cut to
// max_tokens whitespace tokens, control characters replaced by spaces, trimmed.
std::string clean_completion(const std::string& raw, std::size_t max_tokens);

// Per-label visual descriptions backed by a line-delimited JSON file of
// {label, text, origin, backend_fingerprint}. Manual entries always win over
// generated ones; otherwise the last line for a label wins.
class DescriptionCache {
public:
    DescriptionCache() = default;
    explicit DescriptionCache(std::filesystem::path path);

    std::optional<VisualDescription> lookup(const std::string& label) const;

    // Adds an entry in memory and appends it to the file when one is set.
    void put(const VisualDescription& desc, const std::string& backend_fingerprint);

    VisualDescription get_or_generate(const std::string& label, const EmbeddingStore& store,
                                      const LabelCatalog& catalog, const SupportSet& support,
                                      const Gateway& gateway, const DescriptionOptions& options,
                                      const SequenceTemplate& tmpl = {});

    std::size_t size() const;

private:
    struct Entry {
        std::string text;
        bool manual = false;
    };

    void insert(const std::string& label, Entry entry);
    std::mutex& label_mutex(const std::string& label);

    std::optional<std::filesystem::path> path_;
    std::map<std::string, Entry> entries_;
    mutable std::mutex mutex_;
    std::map<std::string, std::unique_ptr<std::mutex>> label_locks_;
};

} // namespace icc

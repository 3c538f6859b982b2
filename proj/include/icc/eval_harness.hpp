#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "icc/description_cache.hpp"
#include "icc/embedding_store.hpp"
#include "icc/eval_config.hpp"
#include "icc/ice_selection.hpp"
#include "icc/report.hpp"
#include "icc/scorer_gateway.hpp"
#include "icc/scoring.hpp"

namespace icc {

struct SplitItem {
    std::string id;
    std::string label;
    std::optional<std::string> path;
};

// Line-delimited JSON: {"id": str, "label": str, "path": str (optional)}.
std::vector<SplitItem> read_split(const std::filesystem::path& path);
void write_split(const std::filesystem::path& path, const std::vector<SplitItem>& items);

struct Dataset {
    EmbeddingStore store;
    LabelCatalog catalog;
    SupportSet support;
    std::vector<SplitItem> tests;
};

// Loads the store, catalog and splits; checks labels and split disjointness.
Dataset load_dataset(const EvalConfig& cfg);
Dataset make_dataset(EmbeddingStore store, std::vector<std::string> classes,
                     std::vector<SplitItem> support, std::vector<SplitItem> tests);

// "synthetic" builds the in-process model; anything else is a socket endpoint.
std::shared_ptr<Backend> make_backend(const EvalConfig& cfg);

// Prompt for one test image under one strategy (ENS has no single prompt).
PromptSequence build_prompt(const EvalConfig& cfg, const Dataset& data, Strategy strategy,
                            const std::string& test_id, const std::vector<IceExample>& ices,
                            const std::map<std::string, std::string>& descriptions);

std::vector<IceExample> select_ices(const EvalConfig& cfg, const Dataset& data, const std::string& test_id,
                                    std::size_t shots);

EvalReport run_eval(const EvalConfig& cfg, const Dataset& data, const Gateway& gateway,
                    DescriptionCache& descriptions);

// Loads everything named by the config and runs it.
EvalReport run_eval(const EvalConfig& cfg);

} // namespace icc

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icc/description_cache.hpp"
#include "icc/ice_selection.hpp"
#include "icc/label_space.hpp"
#include "icc/prompt_builder.hpp"
#include "icc/synthetic_backend.hpp"

namespace icc {

enum class Strategy { SL, LdeEL, LdeDL, LdeDD, VDE, ENS };
enum class Selector { RS, RICES };
enum class DistributionReference { IceImage, TestImage };

std::string_view to_string(Strategy s);
std::string_view to_string(Selector s);
Strategy parse_strategy(std::string_view name);
Selector parse_selector(std::string_view name);

struct EvalConfig {
    std::string dataset = "dataset";
    std::filesystem::path support_manifest;
    std::filesystem::path test_manifest;
    std::filesystem::path embeddings_manifest;
    std::filesystem::path embeddings_matrix;
    std::filesystem::path catalog;

    std::vector<Strategy> strategies{Strategy::SL};
    Selector selector = Selector::RICES;
    std::vector<std::size_t> shots{1};
    std::size_t max_shots = 4;
    std::uint64_t global_seed = 0;

    double temperature = 0.05;
    std::size_t top_m = 3;
    IceOrder ice_order = IceOrder::Ascending;
    DistributionReference distribution_reference = DistributionReference::IceImage;
    double ensemble_alpha = 0.5;

    LabelTextConfig label_text;
    SequenceTemplate sequence;
    DescriptionOptions description;
    std::optional<std::filesystem::path> desc_cache;

    // "synthetic" or a socket endpoint (tcp://host:port, unix:/path).
    std::string backend = "synthetic";
    SyntheticConfig synthetic;
    std::size_t connections = 4;
    std::chrono::milliseconds timeout{60000};

    // Text template used when label embeddings are produced by `icc embed`.
    std::string label_embed_template = "{label}";

    std::filesystem::path output;
    bool skip_errors = false;
    // Wall-clock time makes reports differ between runs, so it is opt-in.
    bool record_timing = false;

    // Key/value pairs as read, echoed into the report.
    std::map<std::string, std::string> echo;
};

// Flat UTF-8 "key = value" lines; '#' starts a comment line. Values that
// begin with '"' are JSON strings (for templates with significant spaces).
// Relative paths resolve against `base_dir`. Unknown keys are rejected.
EvalConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir);
EvalConfig load_config(const std::filesystem::path& path);

// Checks cross-field invariants; raises ConfigInvalid.
void validate(const EvalConfig& cfg);

} // namespace icc

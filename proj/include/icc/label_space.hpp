#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icc/embedding_store.hpp"

namespace icc {

struct WeightedLabel {
    std::string label;
    double weight = 0.0;

    bool operator==(const WeightedLabel&) const = default;
};

// Ground-truth anchor (weight fixed at 1) plus the top_m - 1 most similar
// other labels, softmax-weighted among themselves. The anchor weight is not
// renormalized against the similar entries.
struct LabelDistribution {
    std::string anchor_label;
    std::vector<WeightedLabel> similar_entries; // descending weight, ties by label
    double temperature = 1.0;
    std::size_t top_m = 1;

    static constexpr double kAnchorWeight = 1.0;

    bool operator==(const LabelDistribution&) const = default;
};

enum class LabelStrategy { SL, EL, DL, DD };

std::string_view to_string(LabelStrategy s);
LabelStrategy parse_label_strategy(std::string_view name);

// Placeholders: {anchor}, {anchor_p}, {simK} and {pK} (K from 1), and
// {similar}, which expands `entry` once per similar label with {label}/{p}.
struct LabelTextConfig {
    LabelStrategy strategy = LabelStrategy::SL;
    std::string sl = "{anchor}";
    std::string el = "{anchor} or {sim1}";
    std::string dl = "{anchor} ({anchor_p}){similar}";
    std::string dd = "{anchor}. This image most resembles: {anchor} ({anchor_p}){similar}";
    std::string entry = ", {label} ({p})";
    int probability_decimals = 2;
};

// Numerically stable softmax of similarity / temperature.
std::vector<double> softmax(std::span<const double> similarities, double temperature);

LabelDistribution compute_label_distribution(const EmbeddingStore& store, const std::string& image_id,
                                             const std::string& gt_label, const LabelCatalog& catalog,
                                             std::size_t top_m, double temperature);

// Decimal half-up rounding to a fixed number of places, e.g. 0.285 -> "0.29".
std::string format_probability(double value, int decimals);

// A distribution without similar entries renders as SL under every strategy.
std::string render_label_text(const LabelDistribution& dist, const LabelTextConfig& cfg);

} // namespace icc

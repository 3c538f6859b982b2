#include "icc/label_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "icc/error.hpp"
#include "icc/text_template.hpp"

namespace icc {

std::string_view to_string(LabelStrategy s) {
    switch (s) {
    case LabelStrategy::SL: return "SL";
    case LabelStrategy::EL: return "EL";
    case LabelStrategy::DL: return "DL";
    case LabelStrategy::DD: return "DD";
    }
    return "SL";
}

LabelStrategy parse_label_strategy(std::string_view name) {
    if (name == "SL") return LabelStrategy::SL;
    if (name == "EL") return LabelStrategy::EL;
    if (name == "DL") return LabelStrategy::DL;
    if (name == "DD") return LabelStrategy::DD;
    raise(ErrorCode::InvalidArgument, "unknown label strategy '" + std::string(name) + "'");
}

std::vector<double> softmax(std::span<const double> similarities, double temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        raise(ErrorCode::InvalidArgument, "temperature must be a positive finite number");
    }
    if (similarities.empty()) {
        return {};
    }
    std::vector<double> scaled(similarities.size());
    std::transform(similarities.begin(), similarities.end(), scaled.begin(),
                   [temperature](double s) { return s / temperature; });
    const double peak = *std::max_element(scaled.begin(), scaled.end());
    for (double& v : scaled) {
        v = std::exp(v - peak);
    }
    // summed in sorted order so the result does not depend on input order
    std::vector<double> terms(scaled);
    std::sort(terms.begin(), terms.end());
    const double total = std::accumulate(terms.begin(), terms.end(), 0.0);
    for (double& v : scaled) {
        v /= total;
    }
    return scaled;
}

LabelDistribution compute_label_distribution(const EmbeddingStore& store, const std::string& image_id,
                                             const std::string& gt_label, const LabelCatalog& catalog,
                                             std::size_t top_m, double temperature) {
    if (top_m == 0) {
        raise(ErrorCode::InvalidArgument, "top_m must be at least 1");
    }
    if (!catalog.contains(gt_label)) {
        raise(ErrorCode::UnknownLabel, "'" + gt_label + "' is not in the catalog");
    }
    if (!store.contains(image_id)) {
        raise(ErrorCode::UnknownId, "no embedding with id '" + image_id + "'");
    }
    LabelDistribution dist;
    dist.anchor_label = gt_label;
    dist.temperature = temperature;
    dist.top_m = top_m;
    if (top_m == 1) {
        return dist;
    }

    std::vector<Neighbor> others;
    others.reserve(catalog.size());
    for (const auto& name : catalog.classes()) {
        if (name != gt_label) {
            others.push_back({name, store.cosine_sim(image_id, catalog.embedding_id(name))});
        }
    }
    const auto keep = std::min(top_m - 1, others.size());
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(keep), others.end(),
                      ranks_before);
    others.resize(keep);

    std::vector<double> sims(keep);
    std::transform(others.begin(), others.end(), sims.begin(), [](const Neighbor& n) { return n.similarity; });
    const auto weights = softmax(sims, temperature);
    for (std::size_t i = 0; i < keep; ++i) {
        dist.similar_entries.push_back({others[i].id, weights[i]});
    }
    std::stable_sort(dist.similar_entries.begin(), dist.similar_entries.end(),
                     [](const WeightedLabel& a, const WeightedLabel& b) {
                         if (a.weight != b.weight) return a.weight > b.weight;
                         return a.label < b.label;
                     });
    return dist;
}

std::string format_probability(double value, int decimals) {
    if (decimals < 0 || decimals > 9) {
        raise(ErrorCode::InvalidArgument, "probability_decimals must be in [0, 9]");
    }
    if (!std::isfinite(value) || value < 0.0) {
        raise(ErrorCode::InvalidArgument, "probability must be finite and non-negative");
    }
    // Print with guard digits, then round the decimal string half-up so that
    // values like 0.285 (stored as 0.28499999...) round the way they read.
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals + 6, value);
    std::string digits(buf);
    const auto dot = digits.find('.');
    std::string whole = digits.substr(0, dot);
    std::string frac = digits.substr(dot + 1);
    const bool round_up = frac[static_cast<std::size_t>(decimals)] >= '5';
    std::string kept = whole + frac.substr(0, static_cast<std::size_t>(decimals));
    if (round_up) {
        int i = static_cast<int>(kept.size()) - 1;
        while (i >= 0 && kept[static_cast<std::size_t>(i)] == '9') {
            kept[static_cast<std::size_t>(i)] = '0';
            --i;
        }
        if (i < 0) {
            kept.insert(kept.begin(), '1');
        } else {
            ++kept[static_cast<std::size_t>(i)];
        }
    }
    if (decimals == 0) {
        return kept;
    }
    const auto split = kept.size() - static_cast<std::size_t>(decimals);
    return kept.substr(0, split) + "." + kept.substr(split);
}

namespace {

std::optional<std::size_t> indexed(std::string_view name, std::string_view prefix) {
    if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) {
        return std::nullopt;
    }
    std::size_t k = 0;
    const auto digits = name.substr(prefix.size());
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || k == 0) {
        return std::nullopt;
    }
    return k;
}

} // namespace

std::string render_label_text(const LabelDistribution& dist, const LabelTextConfig& cfg) {
    if (dist.anchor_label.empty()) {
        raise(ErrorCode::InvalidArgument, "distribution has no anchor label");
    }
    require_placeholders(cfg.sl, {"anchor"}, "SL");
    LabelStrategy strategy = cfg.strategy;
    if (dist.similar_entries.empty()) {
        strategy = LabelStrategy::SL;
    }
    const std::string* tmpl = &cfg.sl;
    switch (strategy) {
    case LabelStrategy::SL:
        break;
    case LabelStrategy::EL:
        require_placeholders(cfg.el, {"anchor", "sim1"}, "EL");
        tmpl = &cfg.el;
        break;
    case LabelStrategy::DL:
    case LabelStrategy::DD: {
        tmpl = strategy == LabelStrategy::DL ? &cfg.dl : &cfg.dd;
        const auto what = to_string(strategy);
        require_placeholders(*tmpl, {"anchor"}, what);
        if (!has_placeholder(*tmpl, "similar") && !has_placeholder(*tmpl, "sim1")) {
            raise(ErrorCode::TemplateMissingPlaceholder,
                  std::string(what) + " template lacks '{similar}' or '{sim1}'");
        }
        if (has_placeholder(*tmpl, "similar")) {
            require_placeholders(cfg.entry, {"label"}, "entry");
        }
        break;
    }
    }

    const auto decimals = cfg.probability_decimals;
    const auto& entries = dist.similar_entries;
    auto entry_at = [&](std::size_t k, std::string_view name) -> const WeightedLabel& {
        if (k > entries.size()) {
            raise(ErrorCode::InvalidArgument, "template asks for '{" + std::string(name) + "}' but only " +
                                                  std::to_string(entries.size()) + " similar labels exist");
        }
        return entries[k - 1];
    };
    return render_template(*tmpl, [&](std::string_view name) -> std::optional<std::string> {
        if (name == "anchor") return dist.anchor_label;
        if (name == "anchor_p") return format_probability(LabelDistribution::kAnchorWeight, decimals);
        if (name == "similar") {
            std::string out;
            for (const auto& e : entries) {
                out += render_template(cfg.entry, [&](std::string_view key) -> std::optional<std::string> {
                    if (key == "label") return e.label;
                    if (key == "p") return format_probability(e.weight, decimals);
                    return std::nullopt;
                });
            }
            return out;
        }
        if (auto k = indexed(name, "sim")) return entry_at(*k, name).label;
        if (auto k = indexed(name, "p")) return format_probability(entry_at(*k, name).weight, decimals);
        return std::nullopt;
    });
}

} // namespace icc

#include "icc/synthetic_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "icc/ice_selection.hpp"

namespace icc {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) {
        return 0;
    }
    std::size_t count = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

std::string truncate_tokens(const std::string& text, std::size_t max_tokens) {
    std::size_t seen = 0;
    bool in_token = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
        if (!space && !in_token) {
            if (seen == max_tokens) {
                auto cut = text.substr(0, i);
                while (!cut.empty() && std::isspace(static_cast<unsigned char>(cut.back()))) {
                    cut.pop_back();
                }
                return cut;
            }
            ++seen;
        }
        in_token = !space;
    }
    return text;
}

SyntheticBackend::SyntheticBackend(SyntheticConfig config) : config_(std::move(config)) {}

ScoreResponse SyntheticBackend::score(const ScoreRequest& req) {
    ScoreResponse resp;
    resp.results.reserve(req.candidates.size());
    for (const auto& candidate : req.candidates) {
        CandidateResult r;
        r.candidate = candidate;
        std::istringstream words(candidate);
        for (std::string w; words >> w;) {
            r.tokens.push_back(w);
        }
        const auto mentions = static_cast<double>(count_occurrences(req.prompt, candidate));
        const double lp = std::min(0.0, config_.beta0 + config_.beta1 * mentions);
        r.logprobs.assign(r.tokens.size(), lp);
        resp.results.push_back(std::move(r));
    }
    return resp;
}

GenerateResponse SyntheticBackend::generate(const GenerateRequest& req) {
    const std::string* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& [label, text] : config_.description_table) {
        if (req.prompt.find("distinguishing a " + label) != std::string::npos && label.size() > best_len) {
            best = &text;
            best_len = label.size();
        }
    }
    const std::string& text = best ? *best : config_.sentinel;
    const auto budget = static_cast<std::size_t>(std::max(0, req.max_new_tokens));
    return {truncate_tokens(text, budget)};
}

EmbedResponse SyntheticBackend::embed(const EmbedRequest& req) {
    EmbedResponse resp;
    for (const auto& item : req.items) {
        SplitMix64 rng(fnv1a64(item.kind + ":" + item.value));
        std::vector<double> v(config_.embed_dims);
        double sum_sq = 0.0;
        for (double& x : v) {
            // 53 random bits mapped onto [-1, 1)
            x = static_cast<double>(rng.next() >> 11) * 0x1.0p-52 - 1.0;
            sum_sq += x * x;
        }
        const double norm = std::sqrt(sum_sq);
        std::vector<float> out(v.size());
        std::transform(v.begin(), v.end(), out.begin(), [norm](double x) { return static_cast<float>(x / norm); });
        resp.vectors.push_back(std::move(out));
    }
    return resp;
}

std::string SyntheticBackend::fingerprint() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "synthetic(beta0=%.17g,beta1=%.17g)", config_.beta0, config_.beta1);
    return buf;
}

} // namespace icc

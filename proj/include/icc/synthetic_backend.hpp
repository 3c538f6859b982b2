#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "icc/scorer_gateway.hpp"

namespace icc {

struct SyntheticConfig {
    double beta0 = -5.0;
    double beta1 = 0.5;
    std::map<std::string, std::string> description_table;
    std::string sentinel = "no distinctive features";
    std::size_t embed_dims = 16;
};

// Deterministic stand-in for a vision-language model.
//
// score: candidates are tokenized by whitespace; every token of candidate c
// gets logprob min(0, beta0 + beta1 * k), where k counts non-overlapping
// occurrences of c in the prompt text. Images are ignored.
//
// generate: if the prompt contains "distinguishing a <label>" for a label in
// the description table (longest match wins), returns that description, else
// the sentinel; either way cut to max_new_tokens whitespace tokens.
//
// embed: unit vectors seeded from a hash of kind and value.
class SyntheticBackend final : public Backend {
public:
    explicit SyntheticBackend(SyntheticConfig config = {});

    ScoreResponse score(const ScoreRequest& req) override;
    GenerateResponse generate(const GenerateRequest& req) override;
    EmbedResponse embed(const EmbedRequest& req) override;
    std::string fingerprint() const override;

    const SyntheticConfig& config() const { return config_; }

private:
    SyntheticConfig config_;
};

std::size_t count_occurrences(const std::string& haystack, const std::string& needle);

// First `max_tokens` whitespace-separated tokens of `text`, original spacing kept.
std::string truncate_tokens(const std::string& text, std::size_t max_tokens);

} // namespace icc

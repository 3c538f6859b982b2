#pragma once

#include <span>
#include <string>
#include <vector>

#include "icc/embedding_store.hpp"
#include "icc/prompt_builder.hpp"
#include "icc/scorer_gateway.hpp"

namespace icc {

// Length-normalized log-probability per class, in catalog order.
struct ClassScores {
    std::vector<std::string> classes;
    std::vector<double> scores;
    std::vector<int> token_lengths;
    std::string predicted;

    double score_of(const std::string& label) const;
    bool operator==(const ClassScores&) const = default;
};

// Mean of the per-token natural-log probabilities.
double class_score(std::span<const double> token_logprobs);

// Index of the maximal score; the earliest index wins ties.
std::size_t argmax_first(std::span<const double> scores);

// Builds ClassScores from already-computed values and sets `predicted`.
ClassScores make_class_scores(std::vector<std::string> classes, std::vector<double> scores,
                              std::vector<int> token_lengths);

// One score call covering every catalog class as a continuation of the prompt.
ClassScores classify(const PromptSequence& prompt, const LabelCatalog& catalog, const Gateway& gateway,
                     const SequenceTemplate& tmpl = {});

// Per-class alpha * a + (1 - alpha) * b; alpha = 0.5 is the plain mean.
// b may list the classes in a different order; the result follows a.
ClassScores ensemble(const ClassScores& a, const ClassScores& b, double alpha = 0.5);

} // namespace icc

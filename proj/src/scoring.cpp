#include "icc/scoring.hpp"

#include <cmath>
#include <unordered_map>

#include "icc/error.hpp"

namespace icc {

double ClassScores::score_of(const std::string& label) const {
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] == label) {
            return scores[i];
        }
    }
    raise(ErrorCode::UnknownLabel, "no score for '" + label + "'");
}

double class_score(std::span<const double> token_logprobs) {
    if (token_logprobs.empty()) {
        raise(ErrorCode::EmptyTokenList, "class has no tokens");
    }
    double sum = 0.0;
    for (double lp : token_logprobs) {
        if (!std::isfinite(lp)) {
            raise(ErrorCode::NonFiniteLogProb, "non-finite token logprob");
        }
        if (lp > 0.0) {
            raise(ErrorCode::PositiveLogProb, "token logprob above zero");
        }
        sum += lp;
    }
    return sum / static_cast<double>(token_logprobs.size());
}

std::size_t argmax_first(std::span<const double> scores) {
    if (scores.empty()) {
        raise(ErrorCode::InvalidArgument, "argmax of an empty score list");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    return best;
}

ClassScores make_class_scores(std::vector<std::string> classes, std::vector<double> scores,
                              std::vector<int> token_lengths) {
    if (classes.size() != scores.size() || classes.size() != token_lengths.size()) {
        raise(ErrorCode::InvalidArgument, "class, score and length lists differ in size");
    }
    ClassScores out{std::move(classes), std::move(scores), std::move(token_lengths), {}};
    out.predicted = out.classes[argmax_first(out.scores)];
    return out;
}

ClassScores classify(const PromptSequence& prompt, const LabelCatalog& catalog, const Gateway& gateway,
                     const SequenceTemplate& tmpl) {
    if (catalog.size() == 0) {
        raise(ErrorCode::InvalidArgument, "empty catalog");
    }
    const auto wire = serialize(prompt, tmpl);
    ScoreRequest req{wire.text, wire.images, catalog.classes()};
    const auto resp = gateway.score_candidates(req);

    std::vector<double> scores;
    std::vector<int> lengths;
    scores.reserve(catalog.size());
    lengths.reserve(catalog.size());
    for (const auto& name : catalog.classes()) {
        const auto& r = resp.find(name);
        scores.push_back(class_score(r.logprobs));
        lengths.push_back(static_cast<int>(r.logprobs.size()));
    }
    return make_class_scores(catalog.classes(), std::move(scores), std::move(lengths));
}

ClassScores ensemble(const ClassScores& a, const ClassScores& b, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        raise(ErrorCode::InvalidArgument, "ensemble alpha must lie in [0, 1]");
    }
    if (a.classes.size() != b.classes.size()) {
        raise(ErrorCode::ClassSetMismatch, "score sets have different sizes");
    }
    std::unordered_map<std::string, std::size_t> b_index;
    for (std::size_t i = 0; i < b.classes.size(); ++i) {
        b_index.emplace(b.classes[i], i);
    }
    std::vector<double> merged(a.classes.size());
    for (std::size_t i = 0; i < a.classes.size(); ++i) {
        auto it = b_index.find(a.classes[i]);
        if (it == b_index.end()) {
            raise(ErrorCode::ClassSetMismatch, "class '" + a.classes[i] + "' missing from second score set");
        }
        const double x = a.scores[i];
        const double y = b.scores[it->second];
        merged[i] = alpha == 0.5 ? (x + y) / 2.0 : alpha * x + (1.0 - alpha) * y;
    }
    return make_class_scores(a.classes, std::move(merged), a.token_lengths);
}

} // namespace icc

#include "icc/ice_selection.hpp"

#include <algorithm>

#include "icc/error.hpp"

namespace icc {

SupportSet::SupportSet(std::vector<SupportItem> items) : items_(std::move(items)) {
    if (items_.empty()) {
        raise(ErrorCode::EmptySupport, "support set is empty");
    }
    ids_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        ids_.push_back(items_[i].image_id);
        if (!index_.emplace(items_[i].image_id, i).second) {
            raise(ErrorCode::InvalidArgument, "support set lists '" + items_[i].image_id + "' twice");
        }
    }
}

const std::string& SupportSet::label_of(const std::string& image_id) const {
    auto it = index_.find(image_id);
    if (it == index_.end()) {
        raise(ErrorCode::UnknownId, "'" + image_id + "' is not in the support set");
    }
    return items_[it->second].label;
}

bool SupportSet::contains(const std::string& image_id) const {
    return index_.contains(image_id);
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void check_shots(std::size_t n, std::size_t support_size) {
    if (n == 0) {
        raise(ErrorCode::InvalidArgument, "shot count must be at least 1");
    }
    if (n > support_size) {
        raise(ErrorCode::NotEnoughSupport, std::to_string(n) + " shots requested from a support set of " +
                                               std::to_string(support_size));
    }
}

} // namespace

std::uint64_t SplitMix64::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
}

std::uint64_t SplitMix64::uniform_below(std::uint64_t bound) {
    if (bound == 0) {
        raise(ErrorCode::InvalidArgument, "uniform_below(0)");
    }
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view test_image_id) {
    return mix64(global_seed ^ fnv1a64(test_image_id));
}

std::vector<IceExample> select_random(const SupportSet& support, std::size_t n,
                                      std::uint64_t global_seed, std::string_view test_image_id) {
    check_shots(n, support.size());
    std::vector<std::size_t> order(support.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    SplitMix64 rng(derive_seed(global_seed, test_image_id));
    std::vector<IceExample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_below(order.size() - i));
        std::swap(order[i], order[j]);
        const auto& item = support.items()[order[i]];
        out.push_back({item.image_id, item.label, std::nullopt});
    }
    return out;
}

std::vector<IceExample> select_rices(const EmbeddingStore& store, const std::string& test_image_id,
                                     const SupportSet& support, std::size_t n, IceOrder order) {
    check_shots(n, support.size());
    auto nearest = store.top_k_by_similarity(test_image_id, support.ids(), n);
    if (order == IceOrder::Ascending) {
        std::reverse(nearest.begin(), nearest.end());
    }
    std::vector<IceExample> out;
    out.reserve(nearest.size());
    for (auto& nb : nearest) {
        const auto& label = support.label_of(nb.id);
        out.push_back({std::move(nb.id), label, nb.similarity});
    }
    return out;
}

} // namespace icc

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "icc/embedding_store.hpp"

namespace icc {

struct IceExample {
    std::string image_id;
    std::string gt_label;
    std::optional<double> similarity_to_query;

    bool operator==(const IceExample&) const = default;
};

struct SupportItem {
    std::string image_id;
    std::string label;
};

// Training-split images usable as in-context examples.
class SupportSet {
public:
    explicit SupportSet(std::vector<SupportItem> items);

    const std::vector<SupportItem>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& label_of(const std::string& image_id) const;
    bool contains(const std::string& image_id) const;

private:
    std::vector<SupportItem> items_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class IceOrder { Ascending, Descending };

// SplitMix64 (Steele, Lea, Flood). Fixed so selection goldens are portable.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    // Uniform in [0, bound) by rejection: draws r until r >= (2^64 - bound) % bound,
    // then returns r % bound.
    std::uint64_t uniform_below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view bytes);

// mix(global_seed XOR fnv1a64(test_image_id)) using the SplitMix64 finalizer.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view test_image_id);

// n distinct support examples by partial Fisher-Yates over the support order,
// seeded per test image. Draw order is preserved.
std::vector<IceExample> select_random(const SupportSet& support, std::size_t n,
                                      std::uint64_t global_seed, std::string_view test_image_id);

// The n support images most similar to the test image. With Ascending order
// the most similar example comes last, adjacent to the query.
std::vector<IceExample> select_rices(const EmbeddingStore& store, const std::string& test_image_id,
                                     const SupportSet& support, std::size_t n,
                                     IceOrder order = IceOrder::Ascending);

} // namespace icc

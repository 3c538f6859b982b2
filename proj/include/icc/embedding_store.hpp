#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace icc {

enum class EmbeddingKind { Image, Label };

struct EmbeddingRecord {
    std::string id;
    EmbeddingKind kind = EmbeddingKind::Image;
    // Class name for labels; ground-truth class (possibly empty) for images.
    std::string label_text;
    std::optional<std::string> source_path;
    std::uint32_t row = 0;

    bool operator==(const EmbeddingRecord&) const = default;
};

struct Neighbor {
    std::string id;
    double similarity = 0.0;

    bool operator==(const Neighbor&) const = default;
};

// Descending by similarity, ties by ascending id.
bool ranks_before(const Neighbor& a, const Neighbor& b);

// Id-addressed matrix of unit vectors in the shared image/label space.
// Immutable once constructed.
class EmbeddingStore {
public:
    static constexpr char kMagic[8] = {'I', 'C', 'C', 'E', 'M', 'B', '1', '\0'};

    // Validates the records against `matrix` (row-major, records.size() x dims)
    // and normalizes every row to unit L2 norm.
    static EmbeddingStore from_rows(std::vector<EmbeddingRecord> records, std::size_t dims,
                                    std::vector<float> matrix);

    static EmbeddingStore load(const std::filesystem::path& manifest_path,
                               const std::filesystem::path& matrix_path);

    void save(const std::filesystem::path& manifest_path,
              const std::filesystem::path& matrix_path) const;

    std::size_t dims() const { return dims_; }
    std::size_t size() const { return records_.size(); }
    const std::vector<EmbeddingRecord>& records() const { return records_; }

    bool contains(const std::string& id) const { return index_.contains(id); }
    const EmbeddingRecord& record(const std::string& id) const;
    std::span<const float> vector(const std::string& id) const;

    // Dot product of the two unit vectors, clamped to [-1, 1].
    double cosine_sim(const std::string& a, const std::string& b) const;

    // Exhaustive scan; returns min(k, |candidates|) entries.
    std::vector<Neighbor> top_k_by_similarity(const std::string& query,
                                              std::span<const std::string> candidates,
                                              std::size_t k) const;

private:
    EmbeddingStore() = default;

    std::span<const float> row(std::uint32_t r) const;
    double dot_rows(std::uint32_t a, std::uint32_t b) const;

    std::size_t dims_ = 0;
    std::vector<EmbeddingRecord> records_;
    std::vector<float> matrix_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Reads/writes the binary matrix file: "ICCEMB1\0", u32 rows, u32 dims,
// then rows*dims little-endian float32.
struct RawMatrix {
    std::uint32_t rows = 0;
    std::uint32_t dims = 0;
    std::vector<float> values;
};

RawMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const RawMatrix& matrix);

std::vector<EmbeddingRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const EmbeddingRecord> records);

// The closed set of candidate classes, in canonical tie-break order.
class LabelCatalog {
public:
    // Each class resolves to the single label-kind record whose label_text
    // equals the class name.
    LabelCatalog(std::vector<std::string> classes, const EmbeddingStore& store);

    // Catalog without embeddings; only usable where no similarity is needed.
    explicit LabelCatalog(std::vector<std::string> classes);

    // One class name per line, UTF-8; blank lines ignored.
    static std::vector<std::string> read_class_file(const std::filesystem::path& path);

    const std::vector<std::string>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }
    bool contains(const std::string& label) const { return position_.contains(label); }
    std::size_t position(const std::string& label) const;
    const std::string& embedding_id(const std::string& label) const;
    bool has_embeddings() const { return !embedding_ids_.empty(); }

private:
    std::vector<std::string> classes_;
    std::vector<std::string> embedding_ids_;
    std::unordered_map<std::string, std::size_t> position_;
};

} // namespace icc

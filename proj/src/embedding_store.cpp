#include "icc/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "icc/error.hpp"
#include "icc/jsonl.hpp"
#include "icc/simd.hpp"

namespace icc {

namespace {

// Rows already this close to unit length are kept bit-for-bit, which makes
// normalize(normalize(x)) == normalize(x) after float rounding.
constexpr double kUnitSlack = 2e-7;
constexpr double kMinNorm = 1e-12;

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
    return v;
}

float float_from_le(std::uint32_t bits) {
    return std::bit_cast<float>(to_le(bits));
}

std::uint32_t float_to_le(float f) {
    return to_le(std::bit_cast<std::uint32_t>(f));
}

} // namespace

bool ranks_before(const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) {
        return a.similarity > b.similarity;
    }
    return a.id < b.id;
}

EmbeddingStore EmbeddingStore::from_rows(std::vector<EmbeddingRecord> records, std::size_t dims,
                                         std::vector<float> matrix) {
    if (dims == 0) {
        raise(ErrorCode::DimensionMismatch, "dims must be positive");
    }
    if (matrix.size() != records.size() * dims) {
        raise(ErrorCode::DimensionMismatch,
              "matrix has " + std::to_string(matrix.size()) + " values, expected " +
                  std::to_string(records.size()) + " x " + std::to_string(dims));
    }
    EmbeddingStore store;
    store.dims_ = dims;
    std::unordered_set<std::uint32_t> rows_seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.id.empty()) {
            raise(ErrorCode::MalformedManifest, "record with empty id");
        }
        if (!store.index_.emplace(rec.id, i).second) {
            raise(ErrorCode::MalformedManifest, "duplicate id '" + rec.id + "'");
        }
        if (rec.kind == EmbeddingKind::Label && rec.label_text.empty()) {
            raise(ErrorCode::MalformedManifest, "label record '" + rec.id + "' has no label_text");
        }
        if (rec.row >= records.size()) {
            raise(ErrorCode::DimensionMismatch,
                  "record '" + rec.id + "' row " + std::to_string(rec.row) + " out of range");
        }
        if (!rows_seen.insert(rec.row).second) {
            raise(ErrorCode::MalformedManifest, "row " + std::to_string(rec.row) + " used twice");
        }
    }

    for (const auto& rec : records) {
        std::span<float> row(matrix.data() + std::size_t{rec.row} * dims, dims);
        double sum_sq = 0.0;
        for (float v : row) {
            if (!std::isfinite(v)) {
                raise(ErrorCode::NonFiniteVector, "record '" + rec.id + "' has a non-finite component");
            }
            sum_sq += static_cast<double>(v) * static_cast<double>(v);
        }
        const double norm = std::sqrt(sum_sq);
        if (norm < kMinNorm) {
            raise(ErrorCode::ZeroVector, "record '" + rec.id + "' has zero norm");
        }
        if (std::abs(norm - 1.0) > kUnitSlack) {
            for (float& v : row) {
                v = static_cast<float>(static_cast<double>(v) / norm);
            }
        }
    }
    store.records_ = std::move(records);
    store.matrix_ = std::move(matrix);
    return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& manifest_path,
                                    const std::filesystem::path& matrix_path) {
    auto records = read_manifest(manifest_path);
    auto raw = read_matrix_file(matrix_path);
    if (raw.rows != records.size()) {
        raise(ErrorCode::DimensionMismatch,
              "matrix header has " + std::to_string(raw.rows) + " rows, manifest has " +
                  std::to_string(records.size()) + " records");
    }
    return from_rows(std::move(records), raw.dims, std::move(raw.values));
}

void EmbeddingStore::save(const std::filesystem::path& manifest_path,
                          const std::filesystem::path& matrix_path) const {
    write_manifest(manifest_path, records_);
    write_matrix_file(matrix_path, RawMatrix{static_cast<std::uint32_t>(records_.size()),
                                             static_cast<std::uint32_t>(dims_), matrix_});
}

const EmbeddingRecord& EmbeddingStore::record(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        raise(ErrorCode::UnknownId, "no embedding with id '" + id + "'");
    }
    return records_[it->second];
}

std::span<const float> EmbeddingStore::row(std::uint32_t r) const {
    return {matrix_.data() + std::size_t{r} * dims_, dims_};
}

std::span<const float> EmbeddingStore::vector(const std::string& id) const {
    return row(record(id).row);
}

double EmbeddingStore::dot_rows(std::uint32_t a, std::uint32_t b) const {
    return std::clamp(simd::dot(row(a), row(b)), -1.0, 1.0);
}

double EmbeddingStore::cosine_sim(const std::string& a, const std::string& b) const {
    return dot_rows(record(a).row, record(b).row);
}

std::vector<Neighbor> EmbeddingStore::top_k_by_similarity(const std::string& query,
                                                          std::span<const std::string> candidates,
                                                          std::size_t k) const {
    if (k == 0) {
        raise(ErrorCode::InvalidArgument, "k must be at least 1");
    }
    if (candidates.empty()) {
        raise(ErrorCode::EmptyCandidates, "no candidates for query '" + query + "'");
    }
    const auto query_row = record(query).row;
    std::vector<Neighbor> all;
    all.reserve(candidates.size());
    for (const auto& id : candidates) {
        all.push_back({id, dot_rows(query_row, record(id).row)});
    }
    const std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                      ranks_before);
    all.resize(keep);
    return all;
}

RawMatrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open " + path.string());
    }
    char magic[8];
    std::uint32_t header[2];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, EmbeddingStore::kMagic, 8) != 0) {
        raise(ErrorCode::DimensionMismatch, path.string() + ": bad magic");
    }
    if (!in.read(reinterpret_cast<char*>(header), sizeof header)) {
        raise(ErrorCode::DimensionMismatch, path.string() + ": truncated header");
    }
    RawMatrix m;
    m.rows = to_le(header[0]);
    m.dims = to_le(header[1]);
    const std::size_t count = std::size_t{m.rows} * m.dims;
    std::vector<std::uint32_t> bits(count);
    if (!in.read(reinterpret_cast<char*>(bits.data()),
                 static_cast<std::streamsize>(count * sizeof(std::uint32_t)))) {
        raise(ErrorCode::DimensionMismatch, path.string() + ": truncated matrix body");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        raise(ErrorCode::DimensionMismatch, path.string() + ": trailing bytes after matrix");
    }
    m.values.resize(count);
    std::transform(bits.begin(), bits.end(), m.values.begin(), float_from_le);
    return m;
}

void write_matrix_file(const std::filesystem::path& path, const RawMatrix& matrix) {
    if (matrix.values.size() != std::size_t{matrix.rows} * matrix.dims) {
        raise(ErrorCode::DimensionMismatch, "matrix value count does not match header");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write " + path.string());
    }
    const std::uint32_t header[2] = {to_le(matrix.rows), to_le(matrix.dims)};
    out.write(EmbeddingStore::kMagic, 8);
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    std::vector<std::uint32_t> bits(matrix.values.size());
    std::transform(matrix.values.begin(), matrix.values.end(), bits.begin(), float_to_le);
    out.write(reinterpret_cast<const char*>(bits.data()),
              static_cast<std::streamsize>(bits.size() * sizeof(std::uint32_t)));
    if (!out) {
        raise(ErrorCode::IoError, "short write to " + path.string());
    }
}

std::vector<EmbeddingRecord> read_manifest(const std::filesystem::path& path) {
    std::vector<EmbeddingRecord> records;
    jsonl::for_each_object(path, ErrorCode::MalformedManifest, [&](const jsonl::Json& obj, std::size_t line) {
        const std::string where = path.string() + ":" + std::to_string(line);
        jsonl::check_keys(obj, {"id", "kind", "label_text", "source_path", "row"}, {"id", "kind", "row"},
                          ErrorCode::MalformedManifest, where);
        EmbeddingRecord rec;
        rec.id = jsonl::get_string(obj, "id", ErrorCode::MalformedManifest, where);
        const auto kind = jsonl::get_string(obj, "kind", ErrorCode::MalformedManifest, where);
        if (kind == "image") {
            rec.kind = EmbeddingKind::Image;
        } else if (kind == "label") {
            rec.kind = EmbeddingKind::Label;
        } else {
            raise(ErrorCode::MalformedManifest, where + ": kind must be 'image' or 'label'");
        }
        if (obj.contains("label_text")) {
            rec.label_text = jsonl::get_string(obj, "label_text", ErrorCode::MalformedManifest, where);
        }
        if (obj.contains("source_path") && !obj["source_path"].is_null()) {
            rec.source_path = jsonl::get_string(obj, "source_path", ErrorCode::MalformedManifest, where);
        }
        const auto& row = obj["row"];
        if (!row.is_number_unsigned()) {
            raise(ErrorCode::MalformedManifest, where + ": row must be a non-negative integer");
        }
        rec.row = row.get<std::uint32_t>();
        records.push_back(std::move(rec));
    });
    return records;
}

void write_manifest(const std::filesystem::path& path, std::span<const EmbeddingRecord> records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write " + path.string());
    }
    for (const auto& rec : records) {
        nlohmann::ordered_json obj;
        obj["id"] = rec.id;
        obj["kind"] = rec.kind == EmbeddingKind::Label ? "label" : "image";
        obj["label_text"] = rec.label_text;
        obj["source_path"] = rec.source_path ? nlohmann::ordered_json(*rec.source_path) : nullptr;
        obj["row"] = rec.row;
        out << obj.dump() << '\n';
    }
}

LabelCatalog::LabelCatalog(std::vector<std::string> classes) : classes_(std::move(classes)) {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].empty()) {
            raise(ErrorCode::InvalidArgument, "empty class name in catalog");
        }
        if (!position_.emplace(classes_[i], i).second) {
            raise(ErrorCode::InvalidArgument, "duplicate class '" + classes_[i] + "' in catalog");
        }
    }
}

LabelCatalog::LabelCatalog(std::vector<std::string> classes, const EmbeddingStore& store)
    : LabelCatalog(std::move(classes)) {
    std::unordered_map<std::string, std::vector<std::string>> by_text;
    for (const auto& rec : store.records()) {
        if (rec.kind == EmbeddingKind::Label) {
            by_text[rec.label_text].push_back(rec.id);
        }
    }
    embedding_ids_.reserve(classes_.size());
    for (const auto& name : classes_) {
        auto it = by_text.find(name);
        if (it == by_text.end()) {
            raise(ErrorCode::UnknownLabel, "class '" + name + "' has no label embedding");
        }
        if (it->second.size() != 1) {
            raise(ErrorCode::MalformedManifest, "class '" + name + "' has several label embeddings");
        }
        embedding_ids_.push_back(it->second.front());
    }
}

std::vector<std::string> LabelCatalog::read_class_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::vector<std::string> classes;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        classes.push_back(line);
    }
    return classes;
}

std::size_t LabelCatalog::position(const std::string& label) const {
    auto it = position_.find(label);
    if (it == position_.end()) {
        raise(ErrorCode::UnknownLabel, "'" + label + "' is not in the catalog");
    }
    return it->second;
}

const std::string& LabelCatalog::embedding_id(const std::string& label) const {
    const auto pos = position(label);
    if (embedding_ids_.empty()) {
        raise(ErrorCode::UnknownLabel, "catalog has no label embeddings");
    }
    return embedding_ids_[pos];
}

} // namespace icc

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "icc/embedding_store.hpp"
#include "icc/eval_config.hpp"
#include "icc/eval_harness.hpp"

namespace icc::fixtures {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

using NamedVector = std::pair<std::string, std::vector<float>>;

// Image records keep their label in label_text; label records get ids
// "label:<name>". Rows are in argument order, images first.
EmbeddingStore make_store(const std::vector<NamedVector>& images, const std::vector<NamedVector>& labels,
                          const std::vector<std::string>& image_labels = {});

// The 10-class, 50-test task used by the end-to-end checks. Test i has gold
// class i % 10 and its own private axis. On "hard" tests the most similar
// support image belongs to the class one before the gold class in catalog
// order, and that class is also the test's nearest non-gold label.
struct SyntheticTask {
    std::vector<std::string> classes;
    std::vector<NamedVector> images; // unnormalized, support then tests
    std::vector<NamedVector> labels; // "label:<class>" rows
    std::vector<SplitItem> support;
    std::vector<SplitItem> tests;
    std::size_t dims = 0;
};

SyntheticTask make_synthetic_task();
bool is_hard_test(std::size_t index);

// Builds the store through the same ingestion path as the CLI.
EmbeddingStore store_of(const SyntheticTask& task);

// Writes manifests, matrix, catalog and a config into `dir`; returns the
// config path. `extra` lines are appended to the config verbatim.
std::filesystem::path write_task(const SyntheticTask& task, const std::filesystem::path& dir,
                                 const std::string& extra = {});

} // namespace icc::fixtures

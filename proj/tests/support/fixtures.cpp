#include "fixtures.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace icc::fixtures {

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    for (;;) {
        auto candidate = base / ("icc_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        if (std::filesystem::create_directory(candidate)) {
            path_ = candidate;
            return;
        }
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EmbeddingStore make_store(const std::vector<NamedVector>& images, const std::vector<NamedVector>& labels,
                          const std::vector<std::string>& image_labels) {
    std::vector<EmbeddingRecord> records;
    std::vector<float> matrix;
    const std::size_t dims = !images.empty() ? images.front().second.size() : labels.front().second.size();
    for (std::size_t i = 0; i < images.size(); ++i) {
        EmbeddingRecord r;
        r.id = images[i].first;
        r.kind = EmbeddingKind::Image;
        r.label_text = i < image_labels.size() ? image_labels[i] : "";
        r.row = static_cast<std::uint32_t>(records.size());
        records.push_back(r);
        matrix.insert(matrix.end(), images[i].second.begin(), images[i].second.end());
    }
    for (const auto& [name, v] : labels) {
        EmbeddingRecord r;
        r.id = "label:" + name;
        r.kind = EmbeddingKind::Label;
        r.label_text = name;
        r.row = static_cast<std::uint32_t>(records.size());
        records.push_back(r);
        matrix.insert(matrix.end(), v.begin(), v.end());
    }
    return EmbeddingStore::from_rows(std::move(records), dims, std::move(matrix));
}

namespace {

constexpr std::size_t kClasses = 10;
constexpr std::size_t kTests = 50;

} // namespace

bool is_hard_test(std::size_t index) {
    return (index / 10) % 2 == 0 && index % kClasses > 0;
}

SyntheticTask make_synthetic_task() {
    SyntheticTask task;
    task.classes = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet"};
    task.dims = kClasses + kTests;
    auto axis = [&](std::size_t k) {
        std::vector<float> v(task.dims, 0.0f);
        v[k] = 1.0f;
        return v;
    };
    auto combo = [&](std::initializer_list<std::pair<std::size_t, float>> terms) {
        std::vector<float> v(task.dims, 0.0f);
        for (auto [k, w] : terms) {
            v[k] += w;
        }
        return v;
    };
    for (std::size_t k = 0; k < kClasses; ++k) {
        task.labels.push_back({task.classes[k], axis(k)});
    }

    std::vector<NamedVector> tests;
    for (std::size_t i = 0; i < kTests; ++i) {
        char id[8];
        const std::size_t g = i % kClasses;
        const std::size_t w = (g + kClasses - 1) % kClasses;
        const std::size_t x = (g + 2) % kClasses;
        const std::size_t y = (g + 3) % kClasses;
        const std::size_t u = kClasses + i;

        std::snprintf(id, sizeof id, "s%02zua", i);
        task.images.push_back({id, combo({{g, 0.3f}, {x, 0.1f}, {y, 0.05f}, {u, 0.5f}})});
        task.support.push_back({id, task.classes[g], std::nullopt});

        std::snprintf(id, sizeof id, "s%02zub", i);
        if (is_hard_test(i)) {
            task.images.push_back({id, combo({{w, 0.3f}, {g, 0.1f}, {y, 0.05f}, {u, 1.0f}})});
            task.support.push_back({id, task.classes[w], std::nullopt});
        } else {
            task.images.push_back({id, combo({{g, 0.3f}, {x, 0.1f}, {y, 0.05f}, {u, 0.9f}})});
            task.support.push_back({id, task.classes[g], std::nullopt});
        }

        std::snprintf(id, sizeof id, "t%02zu", i);
        if (is_hard_test(i)) {
            tests.push_back({id, combo({{g, 0.3f}, {w, 0.1f}, {u, 1.0f}})});
        } else {
            tests.push_back({id, combo({{g, 0.3f}, {x, 0.1f}, {u, 1.0f}})});
        }
        task.tests.push_back({id, task.classes[g], std::nullopt});
    }
    task.images.insert(task.images.end(), tests.begin(), tests.end());
    return task;
}

EmbeddingStore store_of(const SyntheticTask& task) {
    std::vector<std::string> image_labels;
    for (const auto& s : task.support) {
        image_labels.push_back(s.label);
    }
    for (const auto& t : task.tests) {
        image_labels.push_back(t.label);
    }
    return make_store(task.images, task.labels, image_labels);
}

std::filesystem::path write_task(const SyntheticTask& task, const std::filesystem::path& dir,
                                 const std::string& extra) {
    store_of(task).save(dir / "task.manifest.jsonl", dir / "task.emb");
    write_split(dir / "support.jsonl", task.support);
    write_split(dir / "test.jsonl", task.tests);
    std::string catalog;
    for (const auto& c : task.classes) {
        catalog += c + "\n";
    }
    write_text(dir / "classes.txt", catalog);
    std::string cfg = "dataset = synthetic10\n"
                      "embeddings = task\n"
                      "support_manifest = support.jsonl\n"
                      "test_manifest = test.jsonl\n"
                      "catalog = classes.txt\n"
                      "backend = synthetic\n"
                      "synthetic_beta0 = -5\n"
                      "synthetic_beta1 = 0.5\n";
    cfg += extra;
    const auto path = dir / "eval.cfg";
    write_text(path, cfg);
    return path;
}

} // namespace icc::fixtures

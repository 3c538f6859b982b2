#include "icc/eval_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <set>
#include <thread>
#include <unordered_set>

#include "icc/error.hpp"
#include "icc/jsonl.hpp"
#include "icc/label_space.hpp"
#include "icc/remote_backend.hpp"
#include "icc/synthetic_backend.hpp"

namespace icc {

std::vector<SplitItem> read_split(const std::filesystem::path& path) {
    std::vector<SplitItem> items;
    jsonl::for_each_object(path, ErrorCode::ConfigInvalid, [&](const jsonl::Json& obj, std::size_t line) {
        const auto where = path.string() + ":" + std::to_string(line);
        jsonl::check_keys(obj, {"id", "label", "path"}, {"id", "label"}, ErrorCode::ConfigInvalid, where);
        SplitItem item;
        item.id = jsonl::get_string(obj, "id", ErrorCode::ConfigInvalid, where);
        item.label = jsonl::get_string(obj, "label", ErrorCode::ConfigInvalid, where);
        if (obj.contains("path")) {
            item.path = jsonl::get_string(obj, "path", ErrorCode::ConfigInvalid, where);
        }
        items.push_back(std::move(item));
    });
    return items;
}

void write_split(const std::filesystem::path& path, const std::vector<SplitItem>& items) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write " + path.string());
    }
    for (const auto& item : items) {
        nlohmann::ordered_json j;
        j["id"] = item.id;
        j["label"] = item.label;
        if (item.path) {
            j["path"] = *item.path;
        }
        out << j.dump() << '\n';
    }
}

Dataset make_dataset(EmbeddingStore store, std::vector<std::string> classes, std::vector<SplitItem> support,
                     std::vector<SplitItem> tests) {
    std::optional<LabelCatalog> catalog;
    try {
        catalog.emplace(std::move(classes), store);
    } catch (const Error& e) {
        raise(ErrorCode::ConfigInvalid, e.what());
    }
    if (catalog->size() == 0) {
        raise(ErrorCode::ConfigInvalid, "catalog is empty");
    }
    auto check_split = [&](const std::vector<SplitItem>& items, const char* which) {
        std::unordered_set<std::string> ids;
        for (const auto& item : items) {
            if (!ids.insert(item.id).second) {
                raise(ErrorCode::ConfigInvalid, std::string(which) + " split lists '" + item.id + "' twice");
            }
            if (!catalog->contains(item.label)) {
                raise(ErrorCode::ConfigInvalid, std::string(which) + " image '" + item.id + "' has label '" +
                                                    item.label + "' outside the catalog");
            }
            if (!store.contains(item.id) || store.record(item.id).kind != EmbeddingKind::Image) {
                raise(ErrorCode::ConfigInvalid, std::string(which) + " image '" + item.id + "' has no image embedding");
            }
        }
        return ids;
    };
    const auto support_ids = check_split(support, "support");
    check_split(tests, "test");
    if (support.empty()) {
        raise(ErrorCode::ConfigInvalid, "support split is empty");
    }
    for (const auto& t : tests) {
        if (support_ids.contains(t.id)) {
            raise(ErrorCode::DisjointnessViolation, "'" + t.id + "' is in both the support and test splits");
        }
    }
    std::vector<SupportItem> support_items;
    support_items.reserve(support.size());
    for (auto& s : support) {
        support_items.push_back({std::move(s.id), std::move(s.label)});
    }
    std::sort(tests.begin(), tests.end(), [](const SplitItem& a, const SplitItem& b) { return a.id < b.id; });
    return Dataset{std::move(store), std::move(*catalog), SupportSet(std::move(support_items)), std::move(tests)};
}

Dataset load_dataset(const EvalConfig& cfg) {
    auto store = EmbeddingStore::load(cfg.embeddings_manifest, cfg.embeddings_matrix);
    auto classes = LabelCatalog::read_class_file(cfg.catalog);
    return make_dataset(std::move(store), std::move(classes), read_split(cfg.support_manifest),
                        read_split(cfg.test_manifest));
}

std::shared_ptr<Backend> make_backend(const EvalConfig& cfg) {
    if (cfg.backend == "synthetic") {
        return std::make_shared<SyntheticBackend>(cfg.synthetic);
    }
    RemoteOptions options;
    options.pool_size = cfg.connections;
    options.timeout = cfg.timeout;
    return std::make_shared<RemoteBackend>(Endpoint::parse(cfg.backend), options);
}

std::vector<IceExample> select_ices(const EvalConfig& cfg, const Dataset& data, const std::string& test_id,
                                    std::size_t shots) {
    if (shots == 0) {
        return {};
    }
    if (cfg.selector == Selector::RS) {
        return select_random(data.support, shots, cfg.global_seed, test_id);
    }
    return select_rices(data.store, test_id, data.support, shots, cfg.ice_order);
}

PromptSequence build_prompt(const EvalConfig& cfg, const Dataset& data, Strategy strategy,
                            const std::string& test_id, const std::vector<IceExample>& ices,
                            const std::map<std::string, std::string>& descriptions) {
    if (strategy == Strategy::ENS) {
        raise(ErrorCode::InvalidArgument, "ENS combines two prompts; build LDE-DD and VDE separately");
    }
    std::vector<std::vector<Segment>> blocks;
    blocks.reserve(ices.size());
    for (const auto& ice : ices) {
        switch (strategy) {
        case Strategy::SL:
            blocks.push_back(build_ice_block(ice, ice.gt_label, cfg.sequence));
            break;
        case Strategy::LdeEL:
        case Strategy::LdeDL:
        case Strategy::LdeDD: {
            const auto& reference =
                cfg.distribution_reference == DistributionReference::IceImage ? ice.image_id : test_id;
            const auto dist = compute_label_distribution(data.store, reference, ice.gt_label, data.catalog,
                                                         cfg.top_m, cfg.temperature);
            auto text_cfg = cfg.label_text;
            text_cfg.strategy = strategy == Strategy::LdeEL   ? LabelStrategy::EL
                                : strategy == Strategy::LdeDL ? LabelStrategy::DL
                                                              : LabelStrategy::DD;
            blocks.push_back(build_ice_block(ice, render_label_text(dist, text_cfg), cfg.sequence));
            break;
        }
        case Strategy::VDE: {
            auto it = descriptions.find(ice.gt_label);
            if (it == descriptions.end()) {
                raise(ErrorCode::UnknownLabel, "no visual description for '" + ice.gt_label + "'");
            }
            blocks.push_back(build_ice_block(ice, ice.gt_label, cfg.sequence, it->second));
            break;
        }
        case Strategy::ENS:
            break;
        }
    }
    return assemble_sequence(blocks, test_id, cfg.sequence, std::string(to_string(strategy)));
}

namespace {

ImageRecord evaluate_image(const EvalConfig& cfg, const Dataset& data, const Gateway& gateway, Strategy strategy,
                           std::size_t shots, const SplitItem& test,
                           const std::map<std::string, std::string>& descriptions) {
    ImageRecord rec;
    rec.test_id = test.id;
    rec.gold = test.label;
    const auto ices = select_ices(cfg, data, test.id, shots);
    for (const auto& ice : ices) {
        rec.ice_ids.push_back(ice.image_id);
    }
    auto score = [&](Strategy s) {
        return classify(build_prompt(cfg, data, s, test.id, ices, descriptions), data.catalog, gateway, cfg.sequence);
    };
    ClassScores final_scores;
    if (strategy == Strategy::ENS) {
        const auto lde = score(Strategy::LdeDD);
        const auto vde = score(Strategy::VDE);
        final_scores = ensemble(lde, vde, cfg.ensemble_alpha);
        rec.scores[std::string(to_string(Strategy::LdeDD))] = lde.scores;
        rec.scores[std::string(to_string(Strategy::VDE))] = vde.scores;
    } else {
        final_scores = score(strategy);
    }
    rec.scores[std::string(to_string(strategy))] = final_scores.scores;
    rec.predicted = final_scores.predicted;
    rec.correct = rec.predicted == rec.gold;
    return rec;
}

bool needs_descriptions(const EvalConfig& cfg) {
    const bool any_shots = std::any_of(cfg.shots.begin(), cfg.shots.end(), [](std::size_t n) { return n > 0; });
    const bool vde = std::any_of(cfg.strategies.begin(), cfg.strategies.end(),
                                 [](Strategy s) { return s == Strategy::VDE || s == Strategy::ENS; });
    return any_shots && vde;
}

} // namespace

EvalReport run_eval(const EvalConfig& cfg, const Dataset& data, const Gateway& gateway,
                    DescriptionCache& description_cache) {
    const auto started = std::chrono::steady_clock::now();
    for (auto n : cfg.shots) {
        if (n > data.support.size()) {
            raise(ErrorCode::ConfigInvalid, std::to_string(n) + " shots requested but the support split has " +
                                                std::to_string(data.support.size()) + " images");
        }
    }

    // one description per support label, fetched up front so the parallel
    // scoring phase never writes to the cache
    std::map<std::string, std::string> descriptions;
    if (needs_descriptions(cfg)) {
        std::set<std::string> labels;
        for (const auto& item : data.support.items()) {
            labels.insert(item.label);
        }
        for (const auto& label : labels) {
            descriptions[label] = description_cache
                                      .get_or_generate(label, data.store, data.catalog, data.support, gateway,
                                                       cfg.description, cfg.sequence)
                                      .text;
        }
    }

    EvalReport report;
    report.dataset = cfg.dataset;
    report.selector = std::string(to_string(cfg.selector));
    report.backend_fingerprint = gateway.fingerprint();
    report.config = cfg.echo;
    report.classes = data.catalog.classes();

    const auto& tests = data.tests;
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.connections, tests.size()));
    for (auto strategy : cfg.strategies) {
        for (auto shots : cfg.shots) {
            std::vector<ImageRecord> records(tests.size());
            std::vector<std::exception_ptr> failures(tests.size());
            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (std::size_t i = next.fetch_add(1); i < tests.size(); i = next.fetch_add(1)) {
                    try {
                        records[i] = evaluate_image(cfg, data, gateway, strategy, shots, tests[i], descriptions);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            };
            if (workers == 1) {
                work();
            } else {
                std::vector<std::jthread> pool;
                for (std::size_t w = 0; w < workers; ++w) {
                    pool.emplace_back(work);
                }
            }

            RunResult run;
            run.strategy = std::string(to_string(strategy));
            run.shots = shots;
            for (std::size_t i = 0; i < tests.size(); ++i) {
                if (failures[i]) {
                    try {
                        std::rethrow_exception(failures[i]);
                    } catch (const Error& e) {
                        if (!cfg.skip_errors) {
                            throw;
                        }
                        records[i] = ImageRecord{};
                        records[i].test_id = tests[i].id;
                        records[i].gold = tests[i].label;
                        records[i].error = std::string(to_string(e.code()));
                        ++run.errors;
                        continue;
                    }
                }
                ++run.total;
                run.correct += records[i].correct ? 1 : 0;
            }
            run.accuracy = accuracy_of(run.correct, run.total);
            run.records = std::move(records);
            report.runs.push_back(std::move(run));
        }
    }
    if (cfg.record_timing) {
        report.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    return report;
}

EvalReport run_eval(const EvalConfig& cfg) {
    validate(cfg);
    const auto data = load_dataset(cfg);
    Gateway gateway(make_backend(cfg), cfg.sequence.image_marker);
    std::optional<DescriptionCache> cache;
    if (cfg.desc_cache) {
        cache.emplace(*cfg.desc_cache);
    } else {
        cache.emplace();
    }
    auto report = run_eval(cfg, data, gateway, *cache);
    if (!cfg.output.empty()) {
        write_report(report, cfg.output);
    }
    return report;
}

} // namespace icc

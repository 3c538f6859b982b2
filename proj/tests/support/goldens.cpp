#include "goldens.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>

#include "fixtures.hpp"
#include "icc/eval_harness.hpp"

namespace icc::fixtures {

namespace {

std::filesystem::path golden_path(const std::string& name) {
    return std::filesystem::path(ICC_GOLDEN_DIR) / (name + ".txt");
}

Dataset golden_dataset() {
    auto store = make_store({{"i7", {0.8f, 0.3f, 0.5f, 0.1f}}, {"i3", {0.4f, 0.9f, 0.1f, 0.2f}},
                             {"t0", {0.7f, 0.5f, 0.2f, 0.1f}}},
                            {{"bull", {1, 0, 0, 0}}, {"ox", {0, 1, 0, 0}}, {"cow", {0, 0, 1, 0}}, {"yak", {0, 0, 0, 1}}},
                            {"bull", "ox", "bull"});
    return make_dataset(std::move(store), {"bull", "ox", "cow", "yak"},
                        {{"i7", "bull", std::nullopt}, {"i3", "ox", std::nullopt}}, {{"t0", "bull", std::nullopt}});
}

} // namespace

std::vector<GoldenCase> golden_cases() {
    const auto data = golden_dataset();
    EvalConfig cfg;
    const std::map<std::string, std::string> descriptions{{"bull", "long curved horns"},
                                                          {"ox", "a broad muscular back"}};
    const std::vector<std::pair<Strategy, std::string>> strategies{{Strategy::SL, "sl"},
                                                                   {Strategy::LdeEL, "lde_el"},
                                                                   {Strategy::LdeDL, "lde_dl"},
                                                                   {Strategy::LdeDD, "lde_dd"},
                                                                   {Strategy::VDE, "vde"}};
    std::vector<GoldenCase> out;
    for (std::size_t shots : {1u, 2u}) {
        const auto ices = select_ices(cfg, data, "t0", shots);
        for (const auto& [strategy, stem] : strategies) {
            const auto prompt = build_prompt(cfg, data, strategy, "t0", ices, descriptions);
            out.push_back({stem + "_" + std::to_string(shots) + "shot", serialize(prompt, cfg.sequence).text});
        }
    }
    return out;
}

GoldenCheck check_golden(const GoldenCase& c) {
    const auto path = golden_path(c.name);
    if (const char* update = std::getenv("ICC_UPDATE_GOLDENS"); update != nullptr && std::string(update) == "1") {
        write_text(path, c.text);
        return {true, "rewrote " + path.string()};
    }
    if (!std::filesystem::exists(path)) {
        return {false, "missing golden " + path.string()};
    }
    const auto want = read_text(path);
    if (want != c.text) {
        return {false, c.name + ": expected\n  " + want + "\ngot\n  " + c.text};
    }
    return {true, c.name};
}

} // namespace icc::fixtures

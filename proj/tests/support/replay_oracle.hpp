#pragma once

#include <string>
#include <vector>

#include "fixtures.hpp"

namespace icc::fixtures {

// Brute-force re-evaluation of the synthetic task that shares no code with
// the library: its own cosine, nearest-neighbour sort, label text, mention
// counting and argmax. Supports the "SL" and "LDE-DD" strategies with the
// default templates and RICES selection.
struct ReplayResult {
    std::vector<std::string> predictions; // in task.tests order
    std::size_t correct = 0;
    double accuracy = 0.0;
};

struct ReplayOptions {
    std::string strategy = "SL";
    std::size_t shots = 1;
    double beta0 = -5.0;
    double beta1 = 0.5;
    double temperature = 0.05;
    std::size_t top_m = 3;
};

ReplayResult replay(const SyntheticTask& task, const ReplayOptions& options);

// The prompt text the replay builds for one test image.
std::string replay_prompt(const SyntheticTask& task, const ReplayOptions& options, std::size_t test_index);

} // namespace icc::fixtures

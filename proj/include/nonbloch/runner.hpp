#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonbloch/config.hpp"

namespace nonbloch {

/// One prediction/measurement comparison. `kind` is "theory" (prediction
/// from the saddle/spectral analysis), "reference" (published number) or
/// "property" (an identity that must hold numerically).
struct CheckPair {
    std::string task;
    std::string name;
    std::string kind;
    double predicted = 0.0;
    double fitted = 0.0;
    double tolerance = 0.0;
    bool relative = false;
    bool pass = false;
};

struct TaskError {
    std::string module;
    std::string operation;
    std::string message;
    std::string parameters;
};

struct TaskResult {
    std::string task;
    std::vector<CheckPair> pairs;
    std::vector<std::string> notes;
    std::optional<TaskError> error;
};

struct RunResult {
    std::string config_hash;
    std::vector<TaskResult> tasks;

    bool failed() const;       ///< any task raised
    bool checks_pass() const;  ///< every pair within tolerance
};

/// Requested count, else NONBLOCH_THREADS, else the hardware concurrency.
int resolve_threads(int requested);

/// Run every task of `config`, each writing into <out>/<task>/, then write
/// <out>/manifest.json. Tasks run concurrently on a pool of worker threads.
RunResult run_experiment(const ExperimentConfig& config);

json manifest_json(const ExperimentConfig& config, const RunResult& result);

}  // namespace nonbloch

#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace glf {

struct Measurement {
    std::string key;
    double value = 0.0;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    double runtime_limit = 0.0;
    std::vector<Measurement> measured;
    std::string note;  // error text when the experiment could not finish

    /// Throws InvalidArgument when the key was not measured.
    double value(const std::string& key) const;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<CriterionResult> criteria;
    std::vector<std::string> files;  // relative to the output directory

    bool all_pass() const;
};

/// Runs one named experiment (see experiment_names()), writing artifacts and summary.txt into out_dir.
/// Module errors are rethrown with the experiment name prepended; verify-all records them as failed
/// criteria instead and carries on.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& name, const std::string& out_dir);

/// Criterion ids produced by each experiment.
std::vector<int> experiment_criteria(const std::string& name);

/// Summary lines (key, value) as written to summary.txt.
std::vector<std::pair<std::string, std::string>> summary_lines(const ExperimentReport& r);

}  // namespace glf

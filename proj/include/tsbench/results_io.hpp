#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsbench/experiment.hpp"

namespace tsbench {

inline constexpr const char* kResultsHeader =
    "d,M,sigma,depth,scheme,N,trial,seed,error,queries,width,flag";

std::string format_trial_row(const TrialResult& r);
TrialResult parse_trial_row(const std::string& line);

/// All rows of a results CSV; an absent file yields no rows.
std::vector<TrialResult> read_results_csv(const std::filesystem::path& path);

/// Appends rows, writing the header first if the file is new or empty.
void append_results_csv(const std::filesystem::path& path, const std::vector<TrialResult>& rows);

inline constexpr const char* kEvaluationsHeader =
    "d,M,sigma,depth,scheme,N,trial,width,val_loss,queries,flagged";

/// Per-width search evaluations of one trial, one row per evaluated width.
void append_evaluations_csv(const std::filesystem::path& path, const TrialResult& trial,
                            const std::vector<WidthEvaluation>& evaluations);

void write_summary_json(const std::filesystem::path& path, const SweepConfig& config,
                        const SweepResult& result);

}  // namespace tsbench

#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctxeval/harness.hpp"
#include "ctxeval/metrics.hpp"

namespace ctxeval {

struct ReportOptions {
    std::vector<int> ks = {1, 5, 10};
    AccMode acc_mode = AccMode::per_token;
    unsigned seed = 0;
};

/// Aggregate evaluation results into the report.json shape: pass_at_k
/// (overall / standalone split), per_level, acc_at_k per token category
/// (when candidates are given), complementarity (when >= 2 solved sets are
/// given), docstring similarity, and the level distribution in both the
/// exclusive and cumulative readings.
nlohmann::ordered_json build_report(
    std::span<const Task> tasks, std::span<const Verdict> verdicts,
    std::span<const Candidate> candidates,
    const std::map<std::string, std::set<std::string>>& model_solved,
    const ReportOptions& options = {});

/// Aligned plain-text tables for the same report object.
std::string render_report_text(const nlohmann::ordered_json& report);

} // namespace ctxeval

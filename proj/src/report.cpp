#include "ctxeval/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "ctxeval/error.hpp"

namespace ctxeval {

using nlohmann::ordered_json;

namespace {

struct TaskOutcome {
    int n = 0;
    int c = 0;
};

const std::vector<RunnableLevel> kAllLevels = {
    RunnableLevel::self_contained, RunnableLevel::slib_runnable,
    RunnableLevel::plib_runnable,  RunnableLevel::class_runnable,
    RunnableLevel::file_runnable,  RunnableLevel::project_runnable,
};

ordered_json mean_pass_at_k(const std::vector<TaskOutcome>& outcomes,
                            const std::vector<int>& ks) {
    ordered_json out;
    for (int k : ks) {
        double sum = 0.0;
        int used = 0;
        for (const auto& o : outcomes) {
            if (k > o.n) continue; // k exceeds samples for this task
            sum += pass_at_k(o.n, o.c, k);
            ++used;
        }
        out[std::to_string(k)] = used > 0 ? ordered_json(sum / used) : ordered_json(nullptr);
    }
    return out;
}

} // namespace

ordered_json build_report(std::span<const Task> tasks, std::span<const Verdict> verdicts,
                          std::span<const Candidate> candidates,
                          const std::map<std::string, std::set<std::string>>& model_solved,
                          const ReportOptions& options) {
    std::map<std::string, const Task*> task_by_id;
    for (const Task& task : tasks) task_by_id[task.task_id] = &task;

    std::map<std::string, TaskOutcome> outcomes;
    for (const Verdict& v : verdicts) {
        auto& o = outcomes[v.task_id];
        ++o.n;
        if (v.outcome == Outcome::Pass) ++o.c;
    }

    std::vector<TaskOutcome> overall;
    std::map<RunnableLevel, std::vector<TaskOutcome>> by_level;
    std::vector<TaskOutcome> standalone_group;
    std::vector<TaskOutcome> non_standalone_group;
    for (const auto& [id, outcome] : outcomes) {
        overall.push_back(outcome);
        auto it = task_by_id.find(id);
        if (it == task_by_id.end()) continue;
        by_level[it->second->level].push_back(outcome);
        if (is_standalone(it->second->level)) standalone_group.push_back(outcome);
        else non_standalone_group.push_back(outcome);
    }

    ordered_json report;
    ordered_json pass;
    pass["overall"] = mean_pass_at_k(overall, options.ks);
    pass["standalone"] = mean_pass_at_k(standalone_group, options.ks);
    pass["non_standalone"] = mean_pass_at_k(non_standalone_group, options.ks);
    report["pass_at_k"] = pass;

    ordered_json per_level;
    for (RunnableLevel level : kAllLevels) {
        ordered_json entry;
        auto it = by_level.find(level);
        const std::vector<TaskOutcome> empty;
        const auto& group = it == by_level.end() ? empty : it->second;
        entry["count"] = group.size();
        entry["pass_at_k"] = mean_pass_at_k(group, options.ks);
        per_level[to_string(level)] = entry;
    }
    report["per_level"] = per_level;

    // Acc@K over oracle tokens, by category
    ordered_json acc;
    acc["mode"] = options.acc_mode == AccMode::per_token ? "per_token" : "all_tokens";
    if (!candidates.empty()) {
        std::map<std::string, std::vector<const Candidate*>> by_task;
        for (const Candidate& cand : candidates) by_task[cand.task_id].push_back(&cand);
        for (auto& [id, list] : by_task)
            std::sort(list.begin(), list.end(), [](const Candidate* a, const Candidate* b) {
                return a->sample_index < b->sample_index;
            });

        if (options.acc_mode == AccMode::per_token) {
            // pool per-token matrices by category
            std::map<TokenCategory, std::vector<std::pair<int, int>>> pooled; // (n, c_t)
            for (const auto& [id, list] : by_task) {
                auto it = task_by_id.find(id);
                if (it == task_by_id.end() || it->second->oracle_context.empty()) continue;
                const Task& task = *it->second;
                int n = static_cast<int>(list.size());
                for (const auto& token : task.oracle_context) {
                    int c_t = 0;
                    for (const Candidate* cand : list) {
                        auto presence = token_presence(cand->completion, {&token, 1},
                                                       task.language);
                        if (presence[0]) ++c_t;
                    }
                    pooled[token.category].push_back({n, c_t});
                }
            }
            ordered_json per_category;
            for (TokenCategory cat : {TokenCategory::TypeReference, TokenCategory::APIInvocation,
                                      TokenCategory::VarReference}) {
                ordered_json values;
                auto it = pooled.find(cat);
                for (int k : options.ks) {
                    if (it == pooled.end() || it->second.empty()) {
                        values[std::to_string(k)] = nullptr;
                        continue;
                    }
                    double sum = 0.0;
                    int used = 0;
                    for (const auto& [n, c_t] : it->second) {
                        if (k > n) continue;
                        sum += pass_at_k(n, c_t, k);
                        ++used;
                    }
                    values[std::to_string(k)] =
                        used > 0 ? ordered_json(sum / used) : ordered_json(nullptr);
                }
                per_category[to_string(cat)] = values;
            }
            acc["per_category"] = per_category;
        } else {
            // all_tokens: per-task cover probability, averaged over tasks
            ordered_json values;
            for (int k : options.ks) {
                double sum = 0.0;
                int used = 0;
                for (const auto& [id, list] : by_task) {
                    auto it = task_by_id.find(id);
                    if (it == task_by_id.end() || it->second->oracle_context.empty()) continue;
                    const Task& task = *it->second;
                    TokenPresenceMatrix matrix;
                    matrix.task_id = id;
                    matrix.n = static_cast<int>(list.size());
                    if (k > matrix.n) continue;
                    for (const auto& token : task.oracle_context) {
                        std::vector<bool> row;
                        for (const Candidate* cand : list) {
                            auto presence =
                                token_presence(cand->completion, {&token, 1}, task.language);
                            row.push_back(presence[0]);
                        }
                        matrix.tokens.push_back({token, std::move(row)});
                    }
                    sum += acc_at_k(matrix, k, AccMode::all_tokens, options.seed);
                    ++used;
                }
                values[std::to_string(k)] = used > 0 ? ordered_json(sum / used) : ordered_json(nullptr);
            }
            acc["all_tokens"] = values;
        }
    }
    report["acc_at_k"] = acc;

    if (model_solved.size() >= 2) {
        ComplementarityReport comp = complementarity(model_solved);
        ordered_json obj;
        obj["union"] = comp.union_size;
        obj["intersection"] = comp.intersection_size;
        ordered_json regions;
        for (const auto& [key, count] : comp.regions) regions[key] = count;
        obj["regions"] = regions;
        report["complementarity"] = obj;
    } else {
        report["complementarity"] = nullptr;
    }

    // docstring similarity: original vs human-labeled, where both exist
    {
        double bleu_sum = 0.0;
        double jac_sum = 0.0;
        int count = 0;
        for (const Task& task : tasks) {
            if (!task.docstring_human) continue;
            bleu_sum += bleu4(task.docstring_original, *task.docstring_human);
            jac_sum += jaccard(task.docstring_original, *task.docstring_human);
            ++count;
        }
        ordered_json sim;
        sim["count"] = count;
        sim["bleu4"] = count > 0 ? ordered_json(bleu_sum / count) : ordered_json(nullptr);
        sim["jaccard"] = count > 0 ? ordered_json(jac_sum / count) : ordered_json(nullptr);
        report["similarity"] = sim;
    }

    // distribution over all tasks (not only evaluated ones)
    {
        std::map<RunnableLevel, long> exclusive;
        for (const Task& task : tasks) ++exclusive[task.level];
        ordered_json excl;
        ordered_json cumul;
        long running = 0;
        for (RunnableLevel level : kAllLevels) {
            long count = exclusive.count(level) ? exclusive[level] : 0;
            excl[to_string(level)] = count;
            running += count;
            cumul[to_string(level)] = running; // tasks runnable within this scope
        }
        ordered_json dist;
        dist["exclusive"] = excl;
        dist["cumulative"] = cumul;
        dist["total"] = tasks.size();
        report["distribution"] = dist;
    }
    return report;
}

namespace {

std::string fmt_cell(const ordered_json& value) {
    if (value.is_null()) return "-";
    if (value.is_number_float()) {
        std::ostringstream out;
        out << std::fixed << std::setprecision(4) << value.get<double>();
        return out.str();
    }
    return value.dump();
}

void table(std::ostringstream& out, const std::string& title,
           const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows) {
    out << title << "\n";
    std::vector<std::size_t> widths(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) widths[i] = header[i].size();
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << "  " << std::left << std::setw(static_cast<int>(widths[i])) << row[i];
        out << "\n";
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    out << "\n";
}

} // namespace

std::string render_report_text(const ordered_json& report) {
    std::ostringstream out;

    std::vector<std::string> ks;
    if (report.contains("pass_at_k") && report["pass_at_k"].contains("overall"))
        for (auto it = report["pass_at_k"]["overall"].begin();
             it != report["pass_at_k"]["overall"].end(); ++it)
            ks.push_back(it.key());

    {
        std::vector<std::string> header = {"group"};
        for (const auto& k : ks) header.push_back("Pass@" + k);
        std::vector<std::vector<std::string>> rows;
        for (const char* group : {"overall", "standalone", "non_standalone"}) {
            std::vector<std::string> row = {group};
            for (const auto& k : ks) row.push_back(fmt_cell(report["pass_at_k"][group][k]));
            rows.push_back(row);
        }
        if (report.contains("per_level")) {
            for (auto it = report["per_level"].begin(); it != report["per_level"].end(); ++it) {
                std::vector<std::string> row = {"  " + it.key()};
                for (const auto& k : ks) row.push_back(fmt_cell(it.value()["pass_at_k"][k]));
                rows.push_back(row);
            }
        }
        table(out, "Pass@K", header, rows);
    }

    if (report.contains("acc_at_k") && report["acc_at_k"].contains("per_category")) {
        std::vector<std::string> header = {"category"};
        for (const auto& k : ks) header.push_back("Acc@" + k);
        std::vector<std::vector<std::string>> rows;
        const auto& cats = report["acc_at_k"]["per_category"];
        for (auto it = cats.begin(); it != cats.end(); ++it) {
            std::vector<std::string> row = {it.key()};
            for (const auto& k : ks) row.push_back(fmt_cell(it.value()[k]));
            rows.push_back(row);
        }
        table(out, "Acc@K (per-token mean)", header, rows);
    }

    if (report.contains("distribution")) {
        std::vector<std::vector<std::string>> rows;
        const auto& excl = report["distribution"]["exclusive"];
        const auto& cumul = report["distribution"]["cumulative"];
        for (auto it = excl.begin(); it != excl.end(); ++it)
            rows.push_back({it.key(), it.value().dump(), cumul[it.key()].dump()});
        table(out, "Runnable-level distribution", {"level", "exclusive", "cumulative"}, rows);
    }

    if (report.contains("similarity") && !report["similarity"]["bleu4"].is_null()) {
        table(out, "Docstring similarity (original vs human-labeled)",
              {"bleu4", "jaccard", "count"},
              {{fmt_cell(report["similarity"]["bleu4"]), fmt_cell(report["similarity"]["jaccard"]),
                report["similarity"]["count"].dump()}});
    }

    if (report.contains("complementarity") && !report["complementarity"].is_null()) {
        std::vector<std::vector<std::string>> rows;
        const auto& regions = report["complementarity"]["regions"];
        for (auto it = regions.begin(); it != regions.end(); ++it)
            rows.push_back({it.key(), it.value().dump()});
        rows.push_back({"union", report["complementarity"]["union"].dump()});
        rows.push_back({"intersection", report["complementarity"]["intersection"].dump()});
        table(out, "Solved-set complementarity", {"region", "tasks"}, rows);
    }
    return out.str();
}

} // namespace ctxeval

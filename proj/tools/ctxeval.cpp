#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctxeval/callgraph.hpp"
#include "ctxeval/context.hpp"
#include "ctxeval/error.hpp"
#include "ctxeval/fsio.hpp"
#include "ctxeval/harness.hpp"
#include "ctxeval/manifest.hpp"
#include "ctxeval/metrics.hpp"
#include "ctxeval/prompts.hpp"
#include "ctxeval/registry.hpp"
#include "ctxeval/report.hpp"

namespace {

using nlohmann::ordered_json;
using namespace ctxeval;

std::vector<int> parse_k_list(const std::string& text) {
    std::vector<int> ks;
    std::string current;
    for (char c : text + ",") {
        if (c == ',') {
            if (!current.empty()) ks.push_back(std::stoi(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (ks.empty()) throw ValidationError("--k list is empty");
    return ks;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_analyze(const std::string& corpus, const std::string& registry, const std::string& out,
                ScanOptions options) {
    ScanDetail detail = scan_corpus_detail(corpus, registry, options);
    print_warnings(detail.warnings);
    save_manifest(detail.manifest, out);
    std::cout << "wrote " << detail.manifest.tasks.size() << " tasks to " << out << "\n";
    return 0;
}

int cmd_stats(const std::string& corpus, const std::string& registry, const std::string& tasks,
              const std::string& out, ScanOptions options) {
    ordered_json stats;
    std::vector<Task> task_list;
    std::map<std::string, std::pair<int, int>> loc_cc;

    if (!corpus.empty()) {
        ScanDetail detail = scan_corpus_detail(corpus, registry, options);
        print_warnings(detail.warnings);
        task_list = detail.manifest.tasks;
        loc_cc = detail.loc_complexity;
    } else {
        task_list = load_manifest(tasks).tasks;
    }

    std::vector<ContextReport> reports;
    for (const Task& task : task_list) {
        ContextReport report;
        report.oracle_context = task.oracle_context;
        reports.push_back(std::move(report));
    }
    StandaloneStats s = standalone_stats(reports);

    stats["functions"] = task_list.size();
    stats["standalone"] = s.standalone_count;
    stats["non_standalone"] = s.non_standalone_count;
    stats["standalone_fraction"] = s.standalone_fraction;
    ordered_json per_level;
    ordered_json cumulative;
    long running = 0;
    for (RunnableLevel level :
         {RunnableLevel::self_contained, RunnableLevel::slib_runnable,
          RunnableLevel::plib_runnable, RunnableLevel::class_runnable,
          RunnableLevel::file_runnable, RunnableLevel::project_runnable}) {
        long count = s.per_level_counts.count(level) ? s.per_level_counts.at(level) : 0;
        per_level[to_string(level)] = count;
        running += count;
        cumulative[to_string(level)] = running;
    }
    stats["per_level"] = per_level;
    stats["cumulative"] = cumulative;

    if (!loc_cc.empty()) {
        double loc_sum = 0;
        double cc_sum = 0;
        for (const auto& [id, pair] : loc_cc) {
            loc_sum += pair.first;
            cc_sum += pair.second;
        }
        stats["mean_loc"] = loc_sum / static_cast<double>(loc_cc.size());
        stats["mean_cyclomatic_complexity"] = cc_sum / static_cast<double>(loc_cc.size());
    }

    std::string text = stats.dump(2) + "\n";
    if (out.empty()) std::cout << text;
    else {
        atomic_write(out, text);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_select_tests(const std::string& corpus, const std::string& target,
                     const std::string& driver_out, const std::string& language) {
    std::vector<std::string> warnings;
    std::vector<SourceUnit> units;

    // the given directory is one project tree
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(corpus))
        if (entry.is_regular_file() && entry.path().extension() == ".py")
            files.push_back(entry.path());
    if (files.empty()) throw EmptyCorpus("no python-like sources under " + corpus);
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::string rel = std::filesystem::relative(file, corpus).generic_string();
        try {
            units.push_back(parse_unit(file, language, rel));
        } catch (const Error& e) {
            warnings.push_back("skipped " + rel + ": " + e.what());
        }
    }
    print_warnings(warnings);

    CallGraph graph = build_call_graph(units);
    std::vector<std::string> tests = covering_tests(graph, target);
    for (const auto& test : tests) std::cout << test << "\n";
    if (tests.empty()) std::cerr << "no covering tests for " << target << "\n";

    if (!driver_out.empty() && !tests.empty()) {
        std::vector<FunctionRecord> records;
        std::vector<ImportDecl> imports;
        std::set<std::string> seen;
        for (const auto& ref : tests) {
            for (const auto& unit : units) {
                int idx = unit.function_index(ref);
                if (idx < 0) continue;
                records.push_back(unit.functions[static_cast<std::size_t>(idx)]);
                for (const auto& imp : unit.imports)
                    if (seen.insert(imp.raw_text).second) imports.push_back(imp);
                break;
            }
        }
        TestDriver driver = synthesize_driver(records, target, language, imports);
        atomic_write(driver_out, driver.source_text);
        std::cout << "wrote driver to " << driver_out << "\n";
    }
    return 0;
}

int cmd_prompt(const std::string& tasks_path, const std::string& mode_text,
               const std::string& source_text, const std::string& out, int max_window) {
    TaskManifest manifest = load_manifest(tasks_path);
    PromptMode mode = prompt_mode_from_string(mode_text);
    DocSource source = doc_source_from_string(source_text);

    std::string text;
    int skipped = 0;
    for (const Task& task : manifest.tasks) {
        std::string prompt;
        try {
            prompt = build_prompt(task, mode, source);
        } catch (const MissingDocstring&) {
            ++skipped;
            continue;
        }
        if (approx_token_count(prompt) > max_window)
            std::cerr << "warning: prompt for " << task.task_id << " exceeds window ("
                      << approx_token_count(prompt) << " tokens approx)\n";
        ordered_json obj;
        obj["task_id"] = task.task_id;
        obj["mode"] = to_string(mode);
        obj["doc_source"] = to_string(source);
        obj["prompt"] = prompt;
        text += obj.dump() + "\n";
    }
    atomic_write(out, text);
    if (skipped > 0)
        std::cerr << "warning: " << skipped << " tasks skipped (missing docstring)\n";
    std::cout << "wrote prompts to " << out << "\n";
    return 0;
}

int cmd_sample(const std::string& prompts_path, const std::string& endpoint,
               const std::string& out, SamplingConfig config, int workers) {
    std::vector<std::pair<std::string, std::string>> prompts;
    {
        std::string text = read_text_file(prompts_path);
        std::istringstream lines(text);
        std::string line;
        int line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                auto obj = nlohmann::json::parse(line);
                prompts.emplace_back(obj.at("task_id").get<std::string>(),
                                     obj.at("prompt").get<std::string>());
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(std::string("bad prompt json: ") + e.what(), line_no, 1);
            }
        }
    }

    EndpointResult result = sample_endpoint(endpoint, prompts, config, workers);
    save_candidates(result.candidates, out);
    std::cout << "wrote " << result.candidates.size() << " candidates to " << out << "\n";
    if (!result.failures.empty()) {
        for (const auto& [task, reason] : result.failures)
            std::cerr << "failed: " << task << ": " << reason << "\n";
        return 1;
    }
    return 0;
}

int cmd_evaluate(const std::string& tasks_path, const std::string& candidates_path,
                 const std::string& out, const std::string& workdir, const std::string& logs,
                 int workers, int timeout_s) {
    std::vector<std::string> warnings;
    TaskManifest manifest = validate_manifest(tasks_path, &warnings);
    std::vector<Candidate> candidates = load_candidates(candidates_path);

    EvalPreparation prep = prepare_evaluation(manifest, workdir);
    warnings.insert(warnings.end(), prep.warnings.begin(), prep.warnings.end());
    print_warnings(warnings);

    BatchOptions options;
    options.workers = workers;
    options.limits.timeout_s = timeout_s;
    options.work_root = workdir.empty() ? std::filesystem::path() : std::filesystem::path(workdir);
    options.log_dir = logs.empty() ? std::filesystem::path() : std::filesystem::path(logs);

    std::vector<Verdict> verdicts = evaluate_batch(prep.prepared, candidates, options);
    save_verdicts(verdicts, out);

    std::map<Outcome, int> counts;
    for (const auto& v : verdicts) ++counts[v.outcome];
    std::cout << "wrote " << verdicts.size() << " verdicts to " << out << " (";
    bool first = true;
    for (const auto& [outcome, count] : counts) {
        if (!first) std::cout << ", ";
        std::cout << to_string(outcome) << "=" << count;
        first = false;
    }
    std::cout << ")\n";
    return 0;
}

int cmd_report(const std::string& tasks_path, const std::string& verdicts_path,
               const std::string& candidates_path,
               const std::vector<std::string>& compare_specs, const std::string& out,
               const std::string& text_out, const std::string& acc_mode_text,
               const std::vector<int>& ks, unsigned seed) {
    TaskManifest manifest = load_manifest(tasks_path);
    std::vector<Verdict> verdicts = load_verdicts(verdicts_path);
    std::vector<Candidate> candidates;
    if (!candidates_path.empty()) candidates = load_candidates(candidates_path);

    std::map<std::string, std::set<std::string>> model_solved;
    auto solved_set = [](const std::vector<Verdict>& vs) {
        std::map<std::string, std::vector<Verdict>> grouped;
        for (const auto& v : vs) grouped[v.task_id].push_back(v);
        std::set<std::string> out_set;
        for (const auto& [id, group] : grouped)
            if (solved(group)) out_set.insert(id);
        return out_set;
    };
    if (!compare_specs.empty()) {
        model_solved["main"] = solved_set(verdicts);
        for (const std::string& spec_text : compare_specs) {
            auto eq = spec_text.find('=');
            if (eq == std::string::npos)
                throw ValidationError("--compare expects name=verdicts.jsonl");
            std::string name = spec_text.substr(0, eq);
            model_solved[name] = solved_set(load_verdicts(spec_text.substr(eq + 1)));
        }
    }

    ReportOptions options;
    options.ks = ks;
    options.acc_mode =
        acc_mode_text == "all_tokens" ? AccMode::all_tokens : AccMode::per_token;
    options.seed = seed;

    ordered_json report =
        build_report(manifest.tasks, verdicts, candidates, model_solved, options);
    atomic_write(out, report.dump(2) + "\n");
    std::cout << "wrote " << out << "\n";

    std::string rendered = render_report_text(report);
    if (!text_out.empty()) {
        atomic_write(text_out, rendered);
        std::cout << "wrote " << text_out << "\n";
    } else {
        std::cout << rendered;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ctxeval: context-aware evaluation toolkit for function-level code generation"};
    app.require_subcommand(1);

    int workers = 4;
    std::string k_list = "1,5,10";
    unsigned seed = 0;
    app.add_option("--workers", workers, "worker threads for scanning/evaluation");
    app.add_option("--k", k_list, "comma-separated K values");
    app.add_option("--seed", seed, "seed for Monte Carlo estimations");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "scan a corpus into tasks.json");
    std::string corpus, registry, out = "tasks.json", language = "python-like",
                lang_version = "3.8";
    int max_context_tokens = 10, min_loc = 3;
    analyze->add_option("--corpus", corpus, "corpus root of project directories")->required();
    analyze->add_option("--registry", registry, "registry directory")->required();
    analyze->add_option("--out", out, "output manifest path");
    analyze->add_option("--language", language, "language identifier");
    analyze->add_option("--lang-version", lang_version, "registry version");
    analyze->add_option("--max-context-tokens", max_context_tokens,
                        "exclude candidates with this many oracle tokens or more");
    analyze->add_option("--min-loc", min_loc, "exclude candidates at or below this many lines");

    // stats
    auto* stats = app.add_subcommand("stats", "standalone proportion and complexity table");
    std::string stats_corpus, stats_registry, stats_tasks, stats_out;
    stats->add_option("--corpus", stats_corpus, "corpus root (scans fresh)");
    stats->add_option("--registry", stats_registry, "registry directory");
    stats->add_option("--tasks", stats_tasks, "existing tasks.json (levels only)");
    stats->add_option("--out", stats_out, "write stats json here instead of stdout");

    // select-tests
    auto* select = app.add_subcommand("select-tests", "covering tests for a target function");
    std::string sel_corpus, sel_target, sel_driver, sel_language = "python-like";
    select->add_option("--corpus", sel_corpus, "project tree")->required();
    select->add_option("--target", sel_target, "qualified function name")->required();
    select->add_option("--driver-out", sel_driver, "write the synthesized driver here");
    select->add_option("--language", sel_language, "language identifier");

    // prompt
    auto* prompt = app.add_subcommand("prompt", "assemble prompts from a manifest");
    std::string p_tasks, p_mode = "docstring_only", p_source = "original",
                p_out = "prompts.jsonl";
    int p_window = 1024;
    prompt->add_option("--tasks", p_tasks, "tasks.json")->required();
    prompt->add_option("--mode", p_mode,
                       "docstring_only|oracle_context_doc|all_context_doc|signature_only|"
                       "context_only");
    prompt->add_option("--doc-source", p_source, "original|human");
    prompt->add_option("--out", p_out, "output prompts.jsonl");
    prompt->add_option("--max-window", p_window, "approximate token window for warnings");

    // sample
    auto* sample = app.add_subcommand("sample", "draw candidates from a completion endpoint");
    std::string s_prompts, s_endpoint, s_out = "candidates.jsonl";
    SamplingConfig s_config;
    sample->add_option("--prompts", s_prompts, "prompts.jsonl")->required();
    sample->add_option("--endpoint", s_endpoint, "http endpoint url")->required();
    sample->add_option("--out", s_out, "output candidates.jsonl");
    sample->add_option("--n", s_config.n, "samples per prompt");
    sample->add_option("--temperature", s_config.temperature, "sampling temperature");
    sample->add_option("--top-p", s_config.nucleus_top_p, "nucleus sampling threshold");
    sample->add_option("--max-window", s_config.max_window_tokens, "max completion tokens");
    sample->add_flag("--greedy", s_config.greedy, "single deterministic sample");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "run candidates in sandboxed workspaces");
    std::string e_tasks, e_candidates, e_out = "verdicts.jsonl", e_workdir, e_logs = "logs";
    int e_timeout = 60;
    evaluate->add_option("--tasks", e_tasks, "tasks.json")->required();
    evaluate->add_option("--candidates", e_candidates, "candidates.jsonl")->required();
    evaluate->add_option("--out", e_out, "output verdicts.jsonl");
    evaluate->add_option("--workdir", e_workdir, "workspace root (or $CTXEVAL_WORKDIR)");
    evaluate->add_option("--logs", e_logs, "per-candidate log directory");
    evaluate->add_option("--timeout", e_timeout, "per-run timeout in seconds");

    // report
    auto* report = app.add_subcommand("report", "compute metrics from verdicts");
    std::string r_tasks, r_verdicts, r_candidates, r_out = "report.json", r_text,
                r_acc_mode = "per_token";
    std::vector<std::string> r_compare;
    report->add_option("--tasks", r_tasks, "tasks.json")->required();
    report->add_option("--verdicts", r_verdicts, "verdicts.jsonl")->required();
    report->add_option("--candidates", r_candidates, "candidates.jsonl for Acc@K");
    report->add_option("--compare", r_compare, "name=verdicts.jsonl per extra model");
    report->add_option("--out", r_out, "output report.json");
    report->add_option("--text", r_text, "also write aligned text tables here");
    report->add_option("--acc-mode", r_acc_mode, "per_token|all_tokens");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    }

    try {
        if (*analyze) {
            ScanOptions options;
            options.language = language;
            options.registry_version = lang_version;
            options.filter.max_context_tokens = max_context_tokens;
            options.filter.min_loc = min_loc;
            options.workers = workers;
            return cmd_analyze(corpus, registry, out, options);
        }
        if (*stats) {
            if (stats_corpus.empty() && stats_tasks.empty())
                throw ValidationError("stats needs --corpus (with --registry) or --tasks");
            if (!stats_corpus.empty() && stats_registry.empty())
                throw ValidationError("stats --corpus requires --registry");
            ScanOptions options;
            options.workers = workers;
            return cmd_stats(stats_corpus, stats_registry, stats_tasks, stats_out, options);
        }
        if (*select)
            return cmd_select_tests(sel_corpus, sel_target, sel_driver, sel_language);
        if (*prompt) return cmd_prompt(p_tasks, p_mode, p_source, p_out, p_window);
        if (*sample) {
            s_config.validate();
            return cmd_sample(s_prompts, s_endpoint, s_out, s_config, workers);
        }
        if (*evaluate)
            return cmd_evaluate(e_tasks, e_candidates, e_out, e_workdir, e_logs, workers,
                                e_timeout);
        if (*report)
            return cmd_report(r_tasks, r_verdicts, r_candidates, r_compare, r_out, r_text,
                              r_acc_mode, parse_k_list(k_list), seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

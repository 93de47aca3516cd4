#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctxeval/context.hpp"
#include "ctxeval/harness.hpp"

namespace ctxeval {

/// Exact binomial coefficient for n <= 64; 0 when k > n or k < 0.
std::uint64_t binomial(int n, int k);

/// Unbiased estimator 1 - C(n-c, k) / C(n, k): the probability that at
/// least one of k samples drawn from n (c of them passing) passes.
/// Integer combinatorics before a single division keeps it exact.
double pass_at_k(int n, int c, int k);

struct TokenPresenceMatrix {
    std::string task_id;
    int n = 0; // samples per task
    std::vector<std::pair<ContextToken, std::vector<bool>>> tokens;
};

enum class AccMode { per_token, all_tokens };

/// per_token: mean over tokens of pass_at_k(n, c_t, k) with c_t the number
/// of samples containing the token. all_tokens: fraction of k-subsets whose
/// union covers every token — exact enumeration while C(n,k) <= 10^6, else
/// Monte Carlo with 10^5 draws.
double acc_at_k(const TokenPresenceMatrix& matrix, int k, AccMode mode = AccMode::per_token,
                unsigned seed = 0);

/// presence[i] is true iff tokens[i].name occurs as an identifier token in
/// the completion (string literals and comments do not count). An
/// unlexable completion yields an all-false vector and clears *lexed_ok.
std::vector<bool> token_presence(const std::string& completion,
                                 std::span<const ContextToken> tokens,
                                 const std::string& language, bool* lexed_ok = nullptr);

/// True iff any verdict for the task is Pass.
bool solved(std::span<const Verdict> verdicts);

struct ComplementarityReport {
    std::size_t union_size = 0;
    std::size_t intersection_size = 0;
    // exact Venn regions: key is the sorted model subset joined with '&',
    // value the number of tasks solved by exactly that subset
    std::map<std::string, std::size_t> regions;
};

ComplementarityReport complementarity(
    const std::map<std::string, std::set<std::string>>& solved_sets);

/// Lowercased alphanumeric-run tokens, shared by bleu4 and jaccard.
std::vector<std::string> similarity_tokens(const std::string& text);

/// Geometric mean of modified 1..4-gram precisions times the brevity
/// penalty, add-one smoothing on zero n-gram matches. Empty hypothesis: 0.
double bleu4(const std::string& reference, const std::string& hypothesis);

/// |token-set intersection| / |token-set union|. Empty hypothesis: 0.
double jaccard(const std::string& reference, const std::string& hypothesis);

} // namespace ctxeval

#include "ctxeval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "ctxeval/error.hpp"
#include "ctxeval/lexer.hpp"

namespace ctxeval {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (n > 64) throw Error("binomial limited to n <= 64");
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    }
    return static_cast<std::uint64_t>(result);
}

double pass_at_k(int n, int c, int k) {
    if (k < 1 || k > n) throw InvalidK("k must satisfy 1 <= k <= n");
    if (n < 1 || c < 0 || c > n) throw Error("need 0 <= c <= n, n >= 1");
    long double miss = static_cast<long double>(binomial(n - c, k)) /
                       static_cast<long double>(binomial(n, k));
    return static_cast<double>(1.0L - miss);
}

namespace {

bool covers_all(const TokenPresenceMatrix& matrix, std::span<const int> chosen) {
    for (const auto& [token, presence] : matrix.tokens) {
        bool hit = false;
        for (int idx : chosen)
            if (presence[static_cast<std::size_t>(idx)]) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return true;
}

double acc_all_tokens(const TokenPresenceMatrix& matrix, int k, unsigned seed) {
    int n = matrix.n;
    std::uint64_t total = binomial(n, k);

    if (total <= 1000000) {
        // exact enumeration over all k-subsets
        std::vector<int> idx(static_cast<std::size_t>(k));
        std::iota(idx.begin(), idx.end(), 0);
        std::uint64_t covered = 0;
        while (true) {
            if (covers_all(matrix, idx)) ++covered;
            int i = k - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
            if (i < 0) break;
            ++idx[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
        return static_cast<double>(static_cast<long double>(covered) /
                                   static_cast<long double>(total));
    }

    // Monte Carlo: 1e5 draws of k distinct indices
    std::mt19937 rng(seed);
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    const int draws = 100000;
    int covered = 0;
    for (int d = 0; d < draws; ++d) {
        for (int i = 0; i < k; ++i) {
            std::uniform_int_distribution<int> dist(i, n - 1);
            std::swap(pool[static_cast<std::size_t>(i)],
                      pool[static_cast<std::size_t>(dist(rng))]);
        }
        if (covers_all(matrix, std::span<const int>(pool.data(), static_cast<std::size_t>(k))))
            ++covered;
    }
    return static_cast<double>(covered) / draws;
}

} // namespace

double acc_at_k(const TokenPresenceMatrix& matrix, int k, AccMode mode, unsigned seed) {
    if (matrix.tokens.empty()) throw NoTokens("presence matrix has no tokens");
    if (k < 1 || k > matrix.n) throw InvalidK("k must satisfy 1 <= k <= n");
    for (const auto& [token, presence] : matrix.tokens)
        if (static_cast<int>(presence.size()) != matrix.n)
            throw Error("presence vector length differs from n");

    if (mode == AccMode::all_tokens) return acc_all_tokens(matrix, k, seed);

    double sum = 0.0;
    for (const auto& [token, presence] : matrix.tokens) {
        int c = static_cast<int>(std::count(presence.begin(), presence.end(), true));
        sum += pass_at_k(matrix.n, c, k);
    }
    return sum / static_cast<double>(matrix.tokens.size());
}

std::vector<bool> token_presence(const std::string& completion,
                                 std::span<const ContextToken> tokens,
                                 const std::string& language, bool* lexed_ok) {
    if (lexed_ok) *lexed_ok = true;
    std::unordered_set<std::string> present;
    try {
        for (auto& name : lex_identifiers(completion, language)) present.insert(std::move(name));
    } catch (const ParseError&) {
        if (lexed_ok) *lexed_ok = false;
        return std::vector<bool>(tokens.size(), false);
    }
    std::vector<bool> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) out.push_back(present.count(token.name) > 0);
    return out;
}

bool solved(std::span<const Verdict> verdicts) {
    if (verdicts.empty()) throw Error("no verdicts for task");
    return std::any_of(verdicts.begin(), verdicts.end(),
                       [](const Verdict& v) { return v.outcome == Outcome::Pass; });
}

ComplementarityReport complementarity(
    const std::map<std::string, std::set<std::string>>& solved_sets) {
    if (solved_sets.size() < 2)
        throw ValidationError("complementarity needs at least two models");

    std::vector<const std::string*> names;
    for (const auto& [name, tasks] : solved_sets) names.push_back(&name);
    std::size_t m = names.size();
    if (m > 16) throw ValidationError("too many models for exact region counts");

    std::set<std::string> all_tasks;
    for (const auto& [name, tasks] : solved_sets)
        all_tasks.insert(tasks.begin(), tasks.end());

    ComplementarityReport report;
    report.union_size = all_tasks.size();

    // every non-empty subset gets a region entry, zero counts included
    std::vector<std::string> keys(static_cast<std::size_t>(1) << m);
    for (std::size_t mask = 1; mask < keys.size(); ++mask) {
        std::string key;
        for (std::size_t i = 0; i < m; ++i) {
            if (!(mask & (static_cast<std::size_t>(1) << i))) continue;
            if (!key.empty()) key += "&";
            key += *names[i];
        }
        keys[mask] = key;
        report.regions[key] = 0;
    }

    std::size_t full_mask = (static_cast<std::size_t>(1) << m) - 1;
    for (const std::string& task : all_tasks) {
        std::size_t mask = 0;
        std::size_t i = 0;
        for (const auto& [name, tasks] : solved_sets) {
            if (tasks.count(task)) mask |= static_cast<std::size_t>(1) << i;
            ++i;
        }
        ++report.regions[keys[mask]];
        if (mask == full_mask) ++report.intersection_size;
    }
    return report;
}

std::vector<std::string> similarity_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '_') {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

namespace {

std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string>& tokens,
                                                     int n) {
    std::map<std::vector<std::string>, int> counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                          tokens.begin() + static_cast<long>(i) + n)];
    return counts;
}

} // namespace

double bleu4(const std::string& reference, const std::string& hypothesis) {
    std::vector<std::string> ref = similarity_tokens(reference);
    std::vector<std::string> hyp = similarity_tokens(hypothesis);
    if (hyp.empty()) return 0.0;

    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        auto hyp_counts = ngram_counts(hyp, n);
        auto ref_counts = ngram_counts(ref, n);
        long match = 0;
        long total = std::max<long>(0, static_cast<long>(hyp.size()) - n + 1);
        for (const auto& [gram, count] : hyp_counts) {
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) match += std::min(count, it->second);
        }
        double p = match > 0 ? static_cast<double>(match) / static_cast<double>(total)
                             : static_cast<double>(match + 1) / static_cast<double>(total + 1);
        log_sum += 0.25 * std::log(p);
    }
    double bp = hyp.size() >= ref.size()
                    ? 1.0
                    : std::exp(1.0 - static_cast<double>(ref.size()) /
                                         static_cast<double>(hyp.size()));
    return bp * std::exp(log_sum);
}

double jaccard(const std::string& reference, const std::string& hypothesis) {
    auto hyp = similarity_tokens(hypothesis);
    if (hyp.empty()) return 0.0;
    auto ref = similarity_tokens(reference);
    std::set<std::string> ref_set(ref.begin(), ref.end());
    std::set<std::string> hyp_set(hyp.begin(), hyp.end());
    std::size_t inter = 0;
    for (const auto& t : hyp_set)
        if (ref_set.count(t)) ++inter;
    std::size_t uni = ref_set.size() + hyp_set.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace ctxeval

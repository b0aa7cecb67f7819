// Helpers shared by the unit tests and the acceptance binary: fixture
// builders and brute-force reference implementations.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pvrec/model.hpp"
#include "pvrec/similarity.hpp"

namespace pvrec::testing {

inline Recording rec(std::string id, std::string user, std::string channel, Periodicity p, Minutes start,
                     Minutes end, Minutes created_at, std::string title = "News") {
    Recording r;
    r.id = std::move(id);
    r.user = UserId(std::move(user));
    r.channel = ChannelId(std::move(channel));
    r.periodicity = p;
    r.title = std::move(title);
    r.timing = {start, end, frame_of(p)};
    r.created_at = created_at;
    return r;
}

inline std::set<std::set<std::string>> partition_of(std::span<const Event> events) {
    std::set<std::set<std::string>> out;
    for (const auto& e : events) out.insert(e.member_recordings);
    return out;
}

// Fraction of recording pairs on which two labelings agree about being
// together or apart (Rand index), from the contingency table.
inline double pairwise_agreement(const std::map<std::string, std::string>& truth,
                                 const std::map<std::string, std::string>& predicted) {
    auto pairs = [](double n) { return n * (n - 1) / 2; };
    std::map<std::string, double> a;
    std::map<std::string, double> b;
    std::map<std::pair<std::string, std::string>, double> ab;
    for (const auto& [rec_id, label] : truth) {
        const auto& other = predicted.at(rec_id);
        a[label] += 1;
        b[other] += 1;
        ab[{label, other}] += 1;
    }
    double same_both = 0, same_a = 0, same_b = 0;
    for (const auto& [k, n] : ab) same_both += pairs(n);
    for (const auto& [k, n] : a) same_a += pairs(n);
    for (const auto& [k, n] : b) same_b += pairs(n);
    const double total = pairs(static_cast<double>(truth.size()));
    if (total == 0) return 1.0;
    return 1.0 - (same_a + same_b - 2 * same_both) / total;
}

inline InteractionMatrix random_matrix(std::mt19937_64& rng, std::size_t users, std::size_t items, double density) {
    std::vector<UserId> user_ids;
    std::vector<std::string> item_ids;
    char buf[32];
    for (std::size_t u = 0; u < users; ++u) {
        std::snprintf(buf, sizeof buf, "u%03zu", u);
        user_ids.emplace_back(buf);
    }
    for (std::size_t i = 0; i < items; ++i) {
        std::snprintf(buf, sizeof buf, "e%03zu", i);
        item_ids.emplace_back(buf);
    }
    std::bernoulli_distribution coin(density);
    std::vector<std::vector<Index>> rows(users);
    for (auto& row : rows) {
        for (std::size_t i = 0; i < items; ++i) {
            if (coin(rng)) row.push_back(static_cast<Index>(i));
        }
    }
    return InteractionMatrix(std::move(user_ids), std::move(item_ids), std::move(rows));
}

// Set formulas written out directly, independent of the library.
inline double brute_similarity(SimilarityMetric metric, const std::set<Index>& a, const std::set<Index>& b) {
    std::size_t inter = 0;
    for (auto x : a) inter += b.count(x);
    std::set<Index> uni = a;
    uni.insert(b.begin(), b.end());
    if (inter == 0) return 0.0;
    switch (metric) {
        case SimilarityMetric::Jaccard: return static_cast<double>(inter) / static_cast<double>(uni.size());
        case SimilarityMetric::Dice: return static_cast<double>(2 * inter) / static_cast<double>(a.size() + b.size());
        case SimilarityMetric::Cosine:
            return static_cast<double>(inter) / std::sqrt(static_cast<double>(a.size() * b.size()));
        case SimilarityMetric::Matching: return static_cast<double>(inter);
    }
    return 0.0;
}

inline std::vector<std::set<Index>> row_sets(const InteractionMatrix& m) {
    std::vector<std::set<Index>> out(m.user_count());
    for (std::size_t u = 0; u < m.user_count(); ++u) out[u] = {m.row(u).begin(), m.row(u).end()};
    return out;
}

inline std::vector<std::set<Index>> column_sets(const InteractionMatrix& m) {
    std::vector<std::set<Index>> out(m.item_count());
    for (std::size_t i = 0; i < m.item_count(); ++i) out[i] = {m.column(i).begin(), m.column(i).end()};
    return out;
}

// All-pairs neighbor lists, positive weights only, ordered weight desc then id.
inline std::vector<std::vector<Neighbor>> brute_neighbors(const std::vector<std::set<Index>>& sets,
                                                          SimilarityMetric metric, std::size_t k_cap) {
    std::vector<std::vector<Neighbor>> out(sets.size());
    for (std::size_t u = 0; u < sets.size(); ++u) {
        for (std::size_t v = 0; v < sets.size(); ++v) {
            if (u == v) continue;
            const double w = brute_similarity(metric, sets[u], sets[v]);
            if (w > 0) out[u].push_back({static_cast<Index>(v), w});
        }
        std::sort(out[u].begin(), out[u].end(), [](const Neighbor& a, const Neighbor& b) {
            return a.weight != b.weight ? a.weight > b.weight : a.id < b.id;
        });
        if (out[u].size() > k_cap) out[u].resize(k_cap);
    }
    return out;
}

// w(u,e) = sum over the top-k neighbors a of u with r(a,e)=1 of c(u,a).
inline std::map<Index, double> brute_user_scores(const InteractionMatrix& m, SimilarityMetric metric, std::size_t k,
                                                 Index user, const std::set<Index>& candidates) {
    const auto rows = row_sets(m);
    const auto hood = brute_neighbors(rows, metric, k)[user];
    std::map<Index, double> out;
    for (auto e : candidates) {
        if (rows[user].count(e)) continue;
        double w = 0;
        for (const auto& a : hood) {
            if (rows[a.id].count(e)) w += a.weight;
        }
        if (w > 0) out[e] = w;
    }
    return out;
}

// w(u,e) = sum of c(e,j) over the n most similar items j to e recorded by u.
inline std::map<Index, double> brute_item_scores(const InteractionMatrix& m, SimilarityMetric metric,
                                                 std::size_t n_items, Index user, const std::set<Index>& candidates) {
    const auto rows = row_sets(m);
    const auto items = brute_neighbors(column_sets(m), metric, static_cast<std::size_t>(-1));
    std::map<Index, double> out;
    for (auto e : candidates) {
        if (rows[user].count(e)) continue;
        double w = 0;
        std::size_t taken = 0;
        for (const auto& j : items[e]) {
            if (taken == n_items) break;
            if (!rows[user].count(j.id)) continue;
            w += j.weight;
            ++taken;
        }
        if (w > 0) out[e] = w;
    }
    return out;
}

}  // namespace pvrec::testing

#include "pvrec/recommenders.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "pvrec/parallel.hpp"

namespace pvrec {
namespace {

bool entry_before(const ScoredEntry& a, const ScoredEntry& b) noexcept {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.item < b.item;
}

void sort_entries(std::vector<ScoredEntry>& entries) { std::sort(entries.begin(), entries.end(), entry_before); }

std::vector<Index> normalized(std::span<const Index> candidates, const InteractionMatrix& m) {
    std::vector<Index> out(candidates.begin(), candidates.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (!out.empty() && out.back() >= m.item_count()) throw std::invalid_argument("candidate index out of range");
    return out;
}

std::vector<ScoredList> empty_lists(const InteractionMatrix& m) {
    std::vector<ScoredList> lists(m.user_count());
    for (std::size_t u = 0; u < lists.size(); ++u) lists[u].user = static_cast<Index>(u);
    return lists;
}

// Sorted-merge difference: candidates not present in the user's row.
template <class F>
void for_each_unseen(std::span<const Index> row, std::span<const Index> sorted_candidates, F&& f) {
    auto r = row.begin();
    for (auto c : sorted_candidates) {
        while (r != row.end() && *r < c) ++r;
        if (r != row.end() && *r == c) continue;
        f(c);
    }
}

}  // namespace

std::vector<ScoredList> most_popular(const InteractionMatrix& m, std::span<const Index> candidates) {
    const auto cand = normalized(candidates, m);
    auto lists = empty_lists(m);
    for (auto& list : lists) {
        for_each_unseen(m.row(list.user), cand, [&](Index c) {
            list.entries.push_back({c, static_cast<double>(m.column(c).size())});
        });
        sort_entries(list.entries);
    }
    return lists;
}

std::vector<ScoredList> user_knn(const InteractionMatrix& m, const SimilarityGraph& graph, std::size_t k,
                                 std::span<const Index> candidates, bool second_level, unsigned threads) {
    if (k == 0) throw std::invalid_argument("user-knn needs k >= 1");
    if (graph.kind != GraphKind::User) throw std::invalid_argument("user-knn needs a user graph");
    if (graph.neighbors.size() != m.user_count()) throw std::invalid_argument("graph does not match the matrix");
    const auto cand = normalized(candidates, m);
    auto lists = empty_lists(m);

    parallel_for(m.user_count(), threads, [&](std::size_t u) {
        std::vector<Neighbor> hood;
        const auto& first = graph.neighbors[u];
        if (second_level) {
            hood = extend_second_level(graph, static_cast<Index>(u), k);
        } else {
            hood.assign(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(std::min(k, first.size())));
        }
        if (hood.empty()) return;

        thread_local std::vector<double> acc;
        acc.assign(m.item_count(), 0.0);
        for (const auto& a : hood) {
            for (auto i : m.row(a.id)) acc[i] += a.weight;
        }
        auto& entries = lists[u].entries;
        for_each_unseen(m.row(u), cand, [&](Index c) {
            if (acc[c] > 0.0) entries.push_back({c, acc[c]});
        });
        sort_entries(entries);
    });
    return lists;
}

std::vector<ScoredList> item_knn(const InteractionMatrix& m, const SimilarityGraph& graph, std::size_t n_items,
                                 std::span<const Index> candidates, unsigned threads) {
    if (n_items == 0) throw std::invalid_argument("item-knn needs n_items >= 1");
    if (graph.kind != GraphKind::Item) throw std::invalid_argument("item-knn needs an item graph");
    if (graph.neighbors.size() != m.item_count()) throw std::invalid_argument("graph does not match the matrix");
    const auto cand = normalized(candidates, m);
    auto lists = empty_lists(m);

    // With an uncapped graph the relation is symmetric, so walking the
    // neighbors of the user's own items reaches every (candidate, item) pair.
    const bool symmetric = graph.k_cap == kUnbounded;

    parallel_for(m.user_count(), threads, [&](std::size_t u) {
        const auto row = m.row(u);
        auto& entries = lists[u].entries;
        auto sum_top = [&](std::vector<Neighbor>& via) {
            std::sort(via.begin(), via.end(), neighbor_before);
            double w = 0.0;
            const std::size_t take = std::min(n_items, via.size());
            for (std::size_t j = 0; j < take; ++j) w += via[j].weight;
            return w;
        };

        if (symmetric) {
            thread_local std::vector<std::vector<Neighbor>> via;
            via.resize(m.item_count());
            for (auto j : row) {
                for (const auto& nb : graph.neighbors[j]) via[nb.id].push_back({j, nb.weight});
            }
            for_each_unseen(row, cand, [&](Index c) {
                if (via[c].empty()) return;
                const double w = sum_top(via[c]);
                if (w > 0.0) entries.push_back({c, w});
            });
            for (auto j : row) {
                for (const auto& nb : graph.neighbors[j]) via[nb.id].clear();
            }
        } else {
            for_each_unseen(row, cand, [&](Index c) {
                double w = 0.0;
                std::size_t taken = 0;
                for (const auto& nb : graph.neighbors[c]) {
                    if (taken == n_items) break;
                    if (!std::binary_search(row.begin(), row.end(), nb.id)) continue;
                    w += nb.weight;
                    ++taken;
                }
                if (w > 0.0) entries.push_back({c, w});
            });
        }
        sort_entries(entries);
    });
    return lists;
}

std::vector<ScoredList> als_score(const FactorModel& model, const InteractionMatrix& m,
                                  std::span<const Index> candidates, unsigned threads) {
    if (static_cast<std::size_t>(model.user_factors.rows()) != m.user_count() ||
        static_cast<std::size_t>(model.item_factors.rows()) != m.item_count()) {
        throw std::invalid_argument("factor model does not match the matrix");
    }
    const auto cand = normalized(candidates, m);
    auto lists = empty_lists(m);
    parallel_for(m.user_count(), threads, [&](std::size_t u) {
        if (!model.user_trained[u]) return;
        auto& entries = lists[u].entries;
        for_each_unseen(m.row(u), cand, [&](Index c) {
            entries.push_back({c, model.item_trained[c] ? model.score(u, c) : 0.0});
        });
        sort_entries(entries);
    });
    return lists;
}

std::vector<ScoredList> random_rec(const InteractionMatrix& m, std::span<const Index> candidates, std::uint64_t seed) {
    const auto cand = normalized(candidates, m);
    auto lists = empty_lists(m);
    for (auto& list : lists) {
        std::vector<Index> pool;
        for_each_unseen(m.row(list.user), cand, [&](Index c) { pool.push_back(c); });
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), list.user};
        std::mt19937_64 rng(seq);
        std::shuffle(pool.begin(), pool.end(), rng);
        const auto n = static_cast<double>(pool.size());
        for (std::size_t pos = 0; pos < pool.size(); ++pos) {
            list.entries.push_back({pool[pos], (n - static_cast<double>(pos)) / n});
        }
    }
    return lists;
}

std::vector<ScoredList> oracle_rec(const InteractionMatrix& m, std::span<const Index> candidates,
                                   std::span<const std::vector<Index>> truth) {
    if (truth.size() != m.user_count()) throw std::invalid_argument("oracle needs one truth set per user");
    const auto cand = normalized(candidates, m);
    auto lists = empty_lists(m);
    for (auto& list : lists) {
        const auto& t = truth[list.user];
        for_each_unseen(m.row(list.user), cand, [&](Index c) {
            list.entries.push_back({c, std::find(t.begin(), t.end(), c) != t.end() ? 1.0 : 0.0});
        });
        sort_entries(list.entries);
    }
    return lists;
}

std::vector<Index> recommend_topn(const ScoredList& scored, std::size_t n) {
    if (n == 0) throw std::invalid_argument("top-n needs n >= 1");
    std::vector<Index> out;
    const std::size_t take = std::min(n, scored.entries.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(scored.entries[i].item);
    return out;
}

SimilarityGraph complete_user_graph(const InteractionMatrix& m) {
    SimilarityGraph g;
    g.kind = GraphKind::User;
    g.metric = SimilarityMetric::Matching;
    g.k_cap = kUnbounded;
    g.neighbors.resize(m.user_count());
    for (std::size_t u = 0; u < m.user_count(); ++u) {
        for (std::size_t v = 0; v < m.user_count(); ++v) {
            if (u != v) g.neighbors[u].push_back({static_cast<Index>(v), 1.0});
        }
    }
    return g;
}

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::MostPopular: return "mostpopular";
        case Algorithm::UserKnn: return "user-knn";
        case Algorithm::ItemKnn: return "item-knn";
        case Algorithm::Als: return "als";
        case Algorithm::Random: return "random";
        case Algorithm::Oracle: return "oracle";
    }
    return "?";
}

namespace {
constexpr Algorithm kAlgorithms[] = {Algorithm::MostPopular, Algorithm::UserKnn, Algorithm::ItemKnn,
                                     Algorithm::Als,         Algorithm::Random,  Algorithm::Oracle};
}

std::optional<Algorithm> parse_algorithm(std::string_view token) noexcept {
    for (auto a : kAlgorithms) {
        if (token == to_string(a)) return a;
    }
    return std::nullopt;
}

std::string algorithm_names() {
    std::string out;
    for (auto a : kAlgorithms) {
        if (!out.empty()) out += ", ";
        out += to_string(a);
    }
    return out;
}

void AlgorithmSpec::validate() const {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (n_items == 0) throw std::invalid_argument("n_items must be >= 1");
    if (algorithm == Algorithm::Als) als.validate();
}

std::string AlgorithmSpec::describe() const {
    char buf[256];
    switch (algorithm) {
        case Algorithm::UserKnn:
            std::snprintf(buf, sizeof buf, "user-knn metric=%s k=%zu second_level=%d",
                          std::string(to_string(metric)).c_str(), k, second_level ? 1 : 0);
            return buf;
        case Algorithm::ItemKnn:
            std::snprintf(buf, sizeof buf, "item-knn metric=%s n_items=%zu", std::string(to_string(metric)).c_str(),
                          n_items);
            return buf;
        case Algorithm::Als:
            std::snprintf(buf, sizeof buf, "als f=%zu lambda=%g alpha=%g steps=%zu seed=%llu", als.factors, als.lambda,
                          als.alpha, als.steps, static_cast<unsigned long long>(als.seed));
            return buf;
        case Algorithm::Random:
            std::snprintf(buf, sizeof buf, "random seed=%llu", static_cast<unsigned long long>(seed));
            return buf;
        default:
            return std::string(to_string(algorithm));
    }
}

std::vector<ScoredList> score_users(const AlgorithmSpec& spec, const InteractionMatrix& m,
                                    std::span<const Index> candidates, std::span<const std::vector<Index>> truth,
                                    unsigned threads) {
    spec.validate();
    switch (spec.algorithm) {
        case Algorithm::MostPopular: return most_popular(m, candidates);
        case Algorithm::UserKnn: {
            const auto g = build_user_graph(m, spec.metric, spec.k, threads);
            return user_knn(m, g, spec.k, candidates, spec.second_level, threads);
        }
        case Algorithm::ItemKnn: {
            const auto g = build_item_graph(m, spec.metric, kUnbounded, threads);
            return item_knn(m, g, spec.n_items, candidates, threads);
        }
        case Algorithm::Als: {
            const auto model = als_train(m, spec.als, threads);
            return als_score(model, m, candidates, threads);
        }
        case Algorithm::Random: return random_rec(m, candidates, spec.seed);
        case Algorithm::Oracle: return oracle_rec(m, candidates, truth);
    }
    throw std::invalid_argument("unknown algorithm");
}

}  // namespace pvrec

#include "pvrec/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "pvrec/csv.hpp"
#include "pvrec/parallel.hpp"

namespace pvrec {

InteractionMatrix::InteractionMatrix(std::vector<UserId> users, std::vector<std::string> items,
                                     std::vector<std::vector<Index>> rows)
    : users_(std::move(users)), items_(std::move(items)), rows_(std::move(rows)) {
    if (rows_.size() != users_.size()) throw std::invalid_argument("one row per user is required");
    if (!std::is_sorted(users_.begin(), users_.end()) ||
        std::adjacent_find(users_.begin(), users_.end()) != users_.end()) {
        throw std::invalid_argument("user ids must be strictly ascending");
    }
    if (!std::is_sorted(items_.begin(), items_.end()) ||
        std::adjacent_find(items_.begin(), items_.end()) != items_.end()) {
        throw std::invalid_argument("item ids must be strictly ascending");
    }
    columns_.resize(items_.size());
    for (std::size_t u = 0; u < rows_.size(); ++u) {
        auto& row = rows_[u];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        if (!row.empty() && row.back() >= items_.size()) throw std::invalid_argument("item index out of range");
        for (auto i : row) columns_[i].push_back(static_cast<Index>(u));
        nnz_ += row.size();
    }
}

bool InteractionMatrix::has(std::size_t user, std::size_t item) const {
    const auto& row = rows_[user];
    return std::binary_search(row.begin(), row.end(), static_cast<Index>(item));
}

std::optional<Index> InteractionMatrix::user_index(const UserId& id) const {
    auto it = std::lower_bound(users_.begin(), users_.end(), id);
    if (it == users_.end() || *it != id) return std::nullopt;
    return static_cast<Index>(it - users_.begin());
}

std::optional<Index> InteractionMatrix::item_index(std::string_view id) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), id);
    if (it == items_.end() || *it != id) return std::nullopt;
    return static_cast<Index>(it - items_.begin());
}

std::string_view to_string(SimilarityMetric m) noexcept {
    switch (m) {
        case SimilarityMetric::Jaccard: return "jaccard";
        case SimilarityMetric::Dice: return "dice";
        case SimilarityMetric::Cosine: return "cosine";
        case SimilarityMetric::Matching: return "matching";
    }
    return "?";
}

std::optional<SimilarityMetric> parse_metric(std::string_view token) noexcept {
    for (auto m : {SimilarityMetric::Jaccard, SimilarityMetric::Dice, SimilarityMetric::Cosine,
                   SimilarityMetric::Matching}) {
        if (token == to_string(m)) return m;
    }
    return std::nullopt;
}

double similarity_from_counts(SimilarityMetric metric, std::size_t overlap, std::size_t size_a,
                              std::size_t size_b) noexcept {
    if (overlap == 0 || size_a == 0 || size_b == 0) return 0.0;
    const auto o = static_cast<double>(overlap);
    const auto a = static_cast<double>(size_a);
    const auto b = static_cast<double>(size_b);
    switch (metric) {
        case SimilarityMetric::Jaccard: return o / (a + b - o);
        case SimilarityMetric::Dice: return 2.0 * o / (a + b);
        case SimilarityMetric::Cosine: return o / std::sqrt(a * b);
        case SimilarityMetric::Matching: return o;
    }
    return 0.0;
}

double similarity(SimilarityMetric metric, std::span<const Index> a, std::span<const Index> b) {
    std::size_t overlap = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++overlap;
            ++ia;
            ++ib;
        }
    }
    return similarity_from_counts(metric, overlap, a.size(), b.size());
}

bool neighbor_before(const Neighbor& a, const Neighbor& b) noexcept {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.id < b.id;
}

namespace {

void keep_top(std::vector<Neighbor>& list, std::size_t k) {
    if (list.size() > k) {
        std::partial_sort(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k), list.end(), neighbor_before);
        list.resize(k);
    } else {
        std::sort(list.begin(), list.end(), neighbor_before);
    }
}

// Nodes are described by `features(node)`; `holders(feature)` is the inverted
// index from a feature back to the nodes that have it.
template <class Features, class Holders>
SimilarityGraph build_graph(GraphKind kind, std::size_t node_count, Features features, Holders holders,
                            SimilarityMetric metric, std::size_t k_cap, unsigned threads) {
    if (k_cap == 0) throw std::invalid_argument("k_cap must be positive");
    SimilarityGraph g;
    g.kind = kind;
    g.metric = metric;
    g.k_cap = k_cap;
    g.neighbors.resize(node_count);

    parallel_for(node_count, threads, [&](std::size_t u) {
        thread_local std::vector<std::uint32_t> overlap;
        thread_local std::vector<Index> touched;
        if (overlap.size() < node_count) overlap.resize(node_count, 0);
        touched.clear();
        const auto own = features(u);
        for (auto f : own) {
            for (auto v : holders(f)) {
                if (v == u) continue;
                if (overlap[v]++ == 0) touched.push_back(v);
            }
        }
        auto& list = g.neighbors[u];
        list.reserve(touched.size());
        for (auto v : touched) {
            const double w = similarity_from_counts(metric, overlap[v], own.size(), features(v).size());
            if (w > 0.0) list.push_back({v, w});
            overlap[v] = 0;
        }
        keep_top(list, k_cap);
    });
    return g;
}

}  // namespace

SimilarityGraph build_user_graph(const InteractionMatrix& m, SimilarityMetric metric, std::size_t k_cap,
                                 unsigned threads) {
    return build_graph(
        GraphKind::User, m.user_count(), [&](std::size_t u) { return m.row(u); },
        [&](Index i) { return m.column(i); }, metric, k_cap, threads);
}

SimilarityGraph build_item_graph(const InteractionMatrix& m, SimilarityMetric metric, std::size_t k_cap,
                                 unsigned threads) {
    return build_graph(
        GraphKind::Item, m.item_count(), [&](std::size_t i) { return m.column(i); },
        [&](Index u) { return m.row(u); }, metric, k_cap, threads);
}

std::vector<Neighbor> extend_second_level(const SimilarityGraph& g, Index node, std::size_t k) {
    if (k == 0) throw std::invalid_argument("neighborhood size must be positive");
    const auto& first = g.neighbors.at(node);
    std::vector<Neighbor> out(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(std::min(k, first.size())));
    if (first.size() >= k) return out;

    std::unordered_map<Index, double> second;
    auto is_first = [&](Index id) {
        return std::any_of(first.begin(), first.end(), [id](const Neighbor& n) { return n.id == id; });
    };
    for (const auto& a : first) {
        for (const auto& b : g.neighbors[a.id]) {
            if (b.id == node || is_first(b.id)) continue;
            const double c = a.weight * b.weight;
            auto [it, inserted] = second.try_emplace(b.id, c);
            if (!inserted && c > it->second) it->second = c;
        }
    }
    for (const auto& [id, c] : second) out.push_back({id, c});
    keep_top(out, k);
    return out;
}

void write_graph(std::ostream& out, const SimilarityGraph& g, std::span<const std::string> labels,
                 std::optional<std::size_t> second_level_k, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "node,neighbor,weight,level\n";
    char buf[64];
    for (std::size_t u = 0; u < g.neighbors.size(); ++u) {
        std::vector<Neighbor> list = g.neighbors[u];
        if (second_level_k && g.kind == GraphKind::User) list = extend_second_level(g, static_cast<Index>(u), *second_level_k);
        const auto& first = g.neighbors[u];
        for (const auto& n : list) {
            const bool level1 = std::any_of(first.begin(), first.end(), [&](const Neighbor& f) { return f.id == n.id; });
            std::snprintf(buf, sizeof buf, "%.17g", n.weight);
            csv::write_row(out, {labels[u], labels[n.id], buf, level1 ? "1" : "2"});
        }
    }
}

}  // namespace pvrec

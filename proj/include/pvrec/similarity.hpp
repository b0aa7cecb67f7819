#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvrec/ids.hpp"

namespace pvrec {

using Index = std::uint32_t;

/// Binary implicit feedback: user u "rated" item i iff i is in rows[u].
/// Users and items are kept in ascending id order, so index order and id
/// order coincide.
class InteractionMatrix {
public:
    InteractionMatrix() = default;

    /// `rows[u]` may be unsorted and contain duplicates; both are fixed here.
    /// Throws std::invalid_argument on out-of-range item indices or unsorted
    /// id lists.
    InteractionMatrix(std::vector<UserId> users, std::vector<std::string> items,
                      std::vector<std::vector<Index>> rows);

    std::size_t user_count() const noexcept { return users_.size(); }
    std::size_t item_count() const noexcept { return items_.size(); }

    const std::vector<UserId>& users() const noexcept { return users_; }
    const std::vector<std::string>& items() const noexcept { return items_; }

    std::span<const Index> row(std::size_t user) const { return rows_[user]; }
    /// Users who recorded `item`, ascending.
    std::span<const Index> column(std::size_t item) const { return columns_[item]; }

    bool has(std::size_t user, std::size_t item) const;

    std::optional<Index> user_index(const UserId& id) const;
    std::optional<Index> item_index(std::string_view id) const;

    std::size_t nonzeros() const noexcept { return nnz_; }

private:
    std::vector<UserId> users_;
    std::vector<std::string> items_;
    std::vector<std::vector<Index>> rows_;
    std::vector<std::vector<Index>> columns_;
    std::size_t nnz_ = 0;
};

enum class SimilarityMetric { Jaccard, Dice, Cosine, Matching };

std::string_view to_string(SimilarityMetric m) noexcept;
std::optional<SimilarityMetric> parse_metric(std::string_view token) noexcept;

/// Metric value from the overlap size and the two set sizes. Zero whenever
/// the overlap or either set is empty.
double similarity_from_counts(SimilarityMetric metric, std::size_t overlap, std::size_t size_a,
                              std::size_t size_b) noexcept;

/// Metric over two sorted, duplicate-free sets.
double similarity(SimilarityMetric metric, std::span<const Index> a, std::span<const Index> b);

struct Neighbor {
    Index id = 0;
    double weight = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Weight descending, then id ascending.
bool neighbor_before(const Neighbor& a, const Neighbor& b) noexcept;

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

enum class GraphKind { User, Item };

/// Positive-weight neighbor lists, one per node, each sorted by
/// `neighbor_before` and holding at most k_cap entries.
struct SimilarityGraph {
    GraphKind kind = GraphKind::User;
    SimilarityMetric metric = SimilarityMetric::Jaccard;
    std::size_t k_cap = kUnbounded;
    std::vector<std::vector<Neighbor>> neighbors;
};

/// Candidates are found through the item->users inverted index, so users
/// without any shared item are never compared.
SimilarityGraph build_user_graph(const InteractionMatrix& m, SimilarityMetric metric, std::size_t k_cap,
                                 unsigned threads = 1);
SimilarityGraph build_item_graph(const InteractionMatrix& m, SimilarityMetric metric, std::size_t k_cap,
                                 unsigned threads = 1);

/// Neighborhood of `node` of size at most k. When the first level already
/// has k entries it is returned as is (truncated); otherwise neighbors of
/// neighbors are added with coefficient c(node,a)*c(a,b), keeping the best
/// path when b is reachable through several a.
std::vector<Neighbor> extend_second_level(const SimilarityGraph& g, Index node, std::size_t k);

/// Writes `node,neighbor,weight,level` rows. Level-2 rows appear only when
/// `second_level_k` is set and the graph is a user graph.
void write_graph(std::ostream& out, const SimilarityGraph& g, std::span<const std::string> labels,
                 std::optional<std::size_t> second_level_k = std::nullopt, const std::string& comment = {});

}  // namespace pvrec

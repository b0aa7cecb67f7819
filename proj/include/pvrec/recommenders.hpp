#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvrec/als.hpp"
#include "pvrec/similarity.hpp"

namespace pvrec {

struct ScoredEntry {
    Index item = 0;
    double weight = 0.0;

    friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

/// Recommendations for one user, sorted by weight descending then item index
/// ascending. Items the user already recorded never appear.
struct ScoredList {
    Index user = 0;
    std::vector<ScoredEntry> entries;
};

/// Candidates are item indices of `m`; they need not be sorted. Every scorer
/// returns one list per user of `m`, in user order.

/// Popularity count over the training users. Lists every non-excluded
/// candidate, including those with weight 0.
std::vector<ScoredList> most_popular(const InteractionMatrix& m, std::span<const Index> candidates);

/// Sum of neighbor coefficients over neighbors who recorded the item, using
/// the top-k neighbors of `graph` (extended to second-level neighbors when
/// `second_level` is set and fewer than k exist). Only positive weights are
/// listed, so a user without neighbors gets an empty list.
std::vector<ScoredList> user_knn(const InteractionMatrix& m, const SimilarityGraph& graph, std::size_t k,
                                 std::span<const Index> candidates, bool second_level, unsigned threads = 1);

/// For candidate e and user u, sums c(e, j) over the n_items most similar
/// neighbors j of e that u recorded. Only positive weights are listed.
std::vector<ScoredList> item_knn(const InteractionMatrix& m, const SimilarityGraph& graph, std::size_t n_items,
                                 std::span<const Index> candidates, unsigned threads = 1);

/// Inner product of the factor rows. Items without training feedback score 0;
/// users without training feedback get an empty list.
std::vector<ScoredList> als_score(const FactorModel& model, const InteractionMatrix& m,
                                  std::span<const Index> candidates, unsigned threads = 1);

/// Seeded uniform shuffle of each user's candidates. The stream of user u
/// depends only on (seed, u).
std::vector<ScoredList> random_rec(const InteractionMatrix& m, std::span<const Index> candidates, std::uint64_t seed);

/// Weight 1 for the user's truth items, 0 for every other candidate.
std::vector<ScoredList> oracle_rec(const InteractionMatrix& m, std::span<const Index> candidates,
                                   std::span<const std::vector<Index>> truth);

/// First min(n, |entries|) item indices.
std::vector<Index> recommend_topn(const ScoredList& scored, std::size_t n);

/// Graph whose every user neighbors every other with coefficient 1; user_knn
/// on it with unbounded k is the popularity ranking.
SimilarityGraph complete_user_graph(const InteractionMatrix& m);

enum class Algorithm { MostPopular, UserKnn, ItemKnn, Als, Random, Oracle };

std::string_view to_string(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view token) noexcept;
/// "mostpopular, user-knn, ..." for diagnostics.
std::string algorithm_names();

struct AlgorithmSpec {
    Algorithm algorithm = Algorithm::MostPopular;
    SimilarityMetric metric = SimilarityMetric::Dice;
    std::size_t k = 300;
    std::size_t n_items = 300;
    bool second_level = false;
    AlsConfig als;
    std::uint64_t seed = 1;

    void validate() const;
    /// Compact description of the parameters that affect this algorithm.
    std::string describe() const;
};

/// Runs the configured scorer. `truth` is only read by the oracle.
std::vector<ScoredList> score_users(const AlgorithmSpec& spec, const InteractionMatrix& m,
                                    std::span<const Index> candidates, std::span<const std::vector<Index>> truth,
                                    unsigned threads = 1);

}  // namespace pvrec

#include <random>
#include <sstream>

#include "doctest.h"
#include "pvrec/similarity.hpp"
#include "support.hpp"

using namespace pvrec;

namespace {

InteractionMatrix matrix(std::vector<std::vector<Index>> rows, std::size_t items) {
    std::vector<UserId> users;
    for (std::size_t u = 0; u < rows.size(); ++u) users.emplace_back("u" + std::to_string(u + 1));
    std::vector<std::string> item_ids;
    for (std::size_t i = 0; i < items; ++i) item_ids.push_back("e" + std::to_string(i + 1));
    return InteractionMatrix(std::move(users), std::move(item_ids), std::move(rows));
}

std::vector<Index> random_set(std::mt19937_64& rng, std::size_t universe) {
    std::vector<Index> out;
    for (Index i = 0; i < universe; ++i) {
        if (rng() % 3 == 0) out.push_back(i);
    }
    return out;
}

}  // namespace

TEST_CASE("metric fixtures") {
    const std::vector<Index> a{1, 2};
    const std::vector<Index> b{2, 3};
    CHECK(similarity(SimilarityMetric::Jaccard, a, b) == 1.0 / 3.0);
    CHECK(similarity(SimilarityMetric::Dice, a, b) == 0.5);
    CHECK(similarity(SimilarityMetric::Cosine, a, b) == 0.5);
    CHECK(similarity(SimilarityMetric::Matching, a, b) == 1.0);

    const std::vector<Index> same{4, 7, 9};
    CHECK(similarity(SimilarityMetric::Jaccard, same, same) == 1.0);
    CHECK(similarity(SimilarityMetric::Dice, same, same) == 1.0);
    CHECK(similarity(SimilarityMetric::Cosine, same, same) == 1.0);
    CHECK(similarity(SimilarityMetric::Matching, same, same) == 3.0);

    const std::vector<Index> other{5, 8};
    const std::vector<Index> none;
    for (auto metric : {SimilarityMetric::Jaccard, SimilarityMetric::Dice, SimilarityMetric::Cosine,
                        SimilarityMetric::Matching}) {
        CHECK(similarity(metric, same, other) == 0.0);
        CHECK(similarity(metric, none, none) == 0.0);
        CHECK(similarity(metric, same, none) == 0.0);
        CHECK(parse_metric(to_string(metric)) == metric);
    }
    CHECK_FALSE(parse_metric("pearson"));
}

TEST_CASE("metric properties") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const auto a = random_set(rng, 12);
        const auto b = random_set(rng, 12);
        for (auto metric : {SimilarityMetric::Jaccard, SimilarityMetric::Dice, SimilarityMetric::Cosine,
                            SimilarityMetric::Matching}) {
            CHECK(similarity(metric, a, b) == similarity(metric, b, a));
        }
        if (a.empty() || b.empty()) continue;
        const double j = similarity(SimilarityMetric::Jaccard, a, b);
        const double d = similarity(SimilarityMetric::Dice, a, b);
        const double c = similarity(SimilarityMetric::Cosine, a, b);
        CHECK(j <= d);
        CHECK(d <= 1.0);
        CHECK(j <= c);
        CHECK(c <= 1.0);
    }
}

TEST_CASE("interaction matrix normalizes rows") {
    auto m = matrix({{2, 0, 2}, {}}, 3);
    CHECK(std::vector<Index>(m.row(0).begin(), m.row(0).end()) == std::vector<Index>{0, 2});
    CHECK(m.nonzeros() == 2);
    CHECK(m.column(2).size() == 1);
    CHECK(m.has(0, 2));
    CHECK_FALSE(m.has(1, 2));
    CHECK(m.item_index("e3") == 2u);
    CHECK_FALSE(m.item_index("e9"));
    CHECK_THROWS_AS(matrix({{5}}, 3), std::invalid_argument);
    CHECK_THROWS_AS(InteractionMatrix({UserId("b"), UserId("a")}, {}, {{}, {}}), std::invalid_argument);
}

TEST_CASE("user graph examples") {
    SUBCASE("overlap is required") {
        // u1={a,b}, u2={a,c}, u3={d}
        auto g = build_user_graph(matrix({{0, 1}, {0, 2}, {3}}, 4), SimilarityMetric::Jaccard, kUnbounded);
        REQUIRE(g.neighbors[0].size() == 1);
        CHECK(g.neighbors[0][0].id == 1);
        CHECK(g.neighbors[2].empty());
    }
    SUBCASE("single user") {
        auto g = build_user_graph(matrix({{0, 1}}, 2), SimilarityMetric::Dice, kUnbounded);
        CHECK(g.neighbors[0].empty());
    }
    SUBCASE("cap keeps the best") {
        auto g = build_user_graph(matrix({{0, 1}, {0, 1}, {0, 2}}, 3), SimilarityMetric::Jaccard, 1);
        REQUIRE(g.neighbors[0].size() == 1);
        CHECK(g.neighbors[0][0] == Neighbor{1, 1.0});
    }
}

TEST_CASE("item graph examples") {
    // e1 by {u1,u2}, e2 by {u2}, e3 by {u3}, e4 by nobody
    auto m = matrix({{0}, {0, 1}, {2}}, 4);
    auto g = build_item_graph(m, SimilarityMetric::Dice, kUnbounded);
    REQUIRE(g.neighbors[0].size() == 1);
    CHECK(g.neighbors[0][0].id == 1);
    CHECK(g.neighbors[0][0].weight == 2.0 / 3.0);
    CHECK(g.neighbors[2].empty());
    CHECK(g.neighbors[3].empty());
}

TEST_CASE("graphs equal an all-pairs computation") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t users = 1 + rng() % 50;
        const std::size_t items = 1 + rng() % 50;
        const auto m = testing::random_matrix(rng, users, items, 0.05 + 0.3 * (rng() % 100) / 100.0);
        const auto metric = static_cast<SimilarityMetric>(rng() % 4);
        const std::size_t cap = (trial % 3 == 0) ? kUnbounded : 1 + rng() % 10;
        const auto ug = build_user_graph(m, metric, cap, 1 + trial % 3);
        const auto ig = build_item_graph(m, metric, cap, 1 + trial % 2);
        CHECK(ug.neighbors == testing::brute_neighbors(testing::row_sets(m), metric, cap));
        CHECK(ig.neighbors == testing::brute_neighbors(testing::column_sets(m), metric, cap));

        const auto full = build_user_graph(m, metric, kUnbounded);
        for (std::size_t u = 0; u < users; ++u) {
            for (const auto& v : full.neighbors[u]) {
                const auto& back = full.neighbors[v.id];
                CHECK(std::any_of(back.begin(), back.end(), [&](const Neighbor& n) { return n.id == u; }));
                CHECK(v.weight > 0);
            }
        }
    }
}

TEST_CASE("second-level extension") {
    SimilarityGraph g;
    g.neighbors.resize(4);
    SUBCASE("adds products of coefficients") {
        g.neighbors[0] = {{1, 0.5}};
        g.neighbors[1] = {{0, 0.5}, {2, 0.4}};
        g.neighbors[2] = {{1, 0.4}};
        CHECK(extend_second_level(g, 0, 5) == std::vector<Neighbor>{{1, 0.5}, {2, 0.5 * 0.4}});
    }
    SUBCASE("full first level is returned as is") {
        g.neighbors[0] = {{1, 0.5}, {3, 0.1}};
        g.neighbors[1] = {{0, 0.5}, {2, 0.4}};
        CHECK(extend_second_level(g, 0, 2) == g.neighbors[0]);
        CHECK(extend_second_level(g, 0, 1) == std::vector<Neighbor>{{1, 0.5}});
    }
    SUBCASE("best path wins") {
        g.neighbors[0] = {{1, 0.5}, {2, 0.3}};
        g.neighbors[1] = {{3, 0.4}};
        g.neighbors[2] = {{3, 0.4}};
        const auto out = extend_second_level(g, 0, 5);
        REQUIRE(out.size() == 3);
        CHECK(out[2] == Neighbor{3, 0.5 * 0.4});
    }
    CHECK_THROWS(extend_second_level(g, 0, 0));
}

TEST_CASE("second-level coefficients never beat their path") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = testing::random_matrix(rng, 30, 40, 0.08);
        for (auto metric : {SimilarityMetric::Jaccard, SimilarityMetric::Dice, SimilarityMetric::Cosine}) {
            const auto g = build_user_graph(m, metric, 3);
            for (Index u = 0; u < m.user_count(); ++u) {
                const auto& first = g.neighbors[u];
                for (const auto& b : extend_second_level(g, u, 10)) {
                    if (std::any_of(first.begin(), first.end(), [&](const Neighbor& n) { return n.id == b.id; })) {
                        continue;
                    }
                    bool has_path = false;
                    for (const auto& a : first) {
                        for (const auto& ab : g.neighbors[a.id]) {
                            if (ab.id == b.id && b.weight == a.weight * ab.weight) {
                                has_path = true;
                                CHECK(b.weight <= std::min(a.weight, ab.weight));
                            }
                        }
                    }
                    CHECK(has_path);
                }
            }
        }
    }
}

TEST_CASE("graph dump") {
    SimilarityGraph g;
    g.neighbors = {{{1, 0.5}}, {{0, 0.5}, {2, 0.25}}, {{1, 0.25}}};
    const std::vector<std::string> labels{"u1", "u2", "u3"};
    std::ostringstream plain;
    write_graph(plain, g, labels);
    CHECK(plain.str() == "node,neighbor,weight,level\nu1,u2,0.5,1\nu2,u1,0.5,1\nu2,u3,0.25,1\nu3,u2,0.25,1\n");
    std::ostringstream extended;
    write_graph(extended, g, labels, 5);
    CHECK(extended.str().find("u1,u3,0.125,2") != std::string::npos);
}

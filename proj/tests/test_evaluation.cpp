#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pvrec/evaluation.hpp"
#include "pvrec/extraction.hpp"
#include "pvrec/report.hpp"
#include "pvrec/synthgen.hpp"
#include "support.hpp"

using namespace pvrec;
using pvrec::testing::rec;

namespace {

Dataset small_dataset() {
    constexpr auto kOnce = Periodicity::NoRepeat;
    Dataset d;
    d.recordings = {
        rec("r1", "u1", "ch1", kOnce, 300, 360, 10),
        rec("r2", "u1", "ch1", Periodicity::Weekly, 1200, 1260, 20),
        rec("r4", "u2", "ch2", kOnce, 2000, 2060, 30),
        rec("r8", "u4", "ch2", kOnce, 2000, 2060, 50),
        rec("r3", "u2", "ch1", Periodicity::Weekly, 1202, 1262, 500),
        rec("r5", "u3", "ch2", kOnce, 2000, 2060, 600),
        rec("r9", "u4", "ch2", kOnce, 2001, 2061, 650),
        rec("r6", "u1", "ch2", kOnce, 2000, 2060, 700),
    };
    d.events = run_pipeline(d.recordings, ExtractionConfig{});
    return d;
}

std::string event_on(const Dataset& d, const char* channel, Periodicity p) {
    for (const auto& e : d.events) {
        if (e.channel == ChannelId(channel) && e.periodicity == p) return e.id;
    }
    return {};
}

}  // namespace

TEST_CASE("temporal split") {
    const auto d = small_dataset();
    REQUIRE(d.events.size() == 3);
    const auto expired = event_on(d, "ch1", Periodicity::NoRepeat);
    const auto weekly = event_on(d, "ch1", Periodicity::Weekly);
    const auto future = event_on(d, "ch2", Periodicity::NoRepeat);

    const auto s = make_split(d.recordings, d.events, 400);
    CHECK(s.active == std::set<std::string>{weekly, future});
    CHECK(s.history.at(UserId("u1")) == std::set<std::string>{expired, weekly});
    CHECK(s.history.at(UserId("u2")) == std::set<std::string>{future});
    CHECK(s.history.at(UserId("u4")) == std::set<std::string>{future});
    CHECK(s.truth.at(UserId("u1")) == std::set<std::string>{future});
    CHECK(s.truth.at(UserId("u2")) == std::set<std::string>{weekly});
    CHECK(s.truth.at(UserId("u3")) == std::set<std::string>{future});
    CHECK((s.truth.count(UserId("u4")) == 0 || s.truth.at(UserId("u4")).empty()));
    CHECK_NOTHROW(audit_no_leakage(s, d.recordings, d.events));

    for (const auto& [user, truth] : s.truth) {
        for (const auto& e : truth) {
            CHECK(s.active.count(e) == 1);
            if (s.history.count(user)) CHECK(s.history.at(user).count(e) == 0);
        }
    }

    CHECK_THROWS_AS(make_split(d.recordings, d.events, 10), std::invalid_argument);
    CHECK_THROWS_AS(make_split(d.recordings, d.events, 700), std::invalid_argument);
    CHECK_THROWS_AS(make_split(d.recordings, d.events, -5), std::invalid_argument);
}

TEST_CASE("leakage audit catches a forged history") {
    const auto d = small_dataset();
    auto s = make_split(d.recordings, d.events, 400);
    s.history[UserId("u3")].insert(event_on(d, "ch2", Periodicity::NoRepeat));
    CHECK_THROWS_AS(audit_no_leakage(s, d.recordings, d.events), std::logic_error);
}

TEST_CASE("training view masks post-cut feedback") {
    const auto d = small_dataset();
    const auto s = make_split(d.recordings, d.events, 400);
    const auto view = make_training_view(s, d.recordings, d.events);
    CHECK(view.matrix.user_count() == 4);
    CHECK(view.matrix.item_count() == 3);
    CHECK(view.candidates.size() == 2);
    const auto u3 = *view.matrix.user_index(UserId("u3"));
    CHECK(view.matrix.row(u3).empty());
    CHECK(view.truth[u3].size() == 1);
    const auto future = *view.matrix.item_index(event_on(d, "ch2", Periodicity::NoRepeat));
    CHECK(view.matrix.column(future).size() == 2);  // u2 and u4, not u1/u3
}

TEST_CASE("precision and recall") {
    const std::vector<Index> rec5{1, 2, 3, 4, 5};
    const std::vector<Index> truth{2, 5, 8, 9};
    auto pr = precision_recall(rec5, truth, 5);
    CHECK(pr.precision == 0.4);
    CHECK(pr.recall == 0.5);

    const std::vector<Index> superset{9, 8, 5, 2, 1};
    CHECK(precision_recall(superset, truth, 4).recall == 1.0);
    const std::vector<Index> disjoint{10, 11};
    pr = precision_recall(disjoint, truth, 5);
    CHECK(pr.precision == 0.0);
    CHECK(pr.recall == 0.0);
    // only the first n count
    CHECK(precision_recall(superset, truth, 1).recall == 0.25);
    CHECK_THROWS_AS(precision_recall(rec5, truth, 0), std::invalid_argument);
    CHECK_THROWS_AS(precision_recall(rec5, {}, 3), std::invalid_argument);
}

TEST_CASE("kendall tau-b") {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> rev{4, 3, 2, 1};
    CHECK(kendall_tau_b(a, a) == doctest::Approx(1.0));
    CHECK(kendall_tau_b(a, rev) == doctest::Approx(-1.0));
    const std::vector<double> tied{1, 1, 2};
    const std::vector<double> inc{1, 2, 3};
    CHECK(kendall_tau_b(tied, inc) == doctest::Approx(2.0 / std::sqrt(6.0)));
    const std::vector<double> flat{5, 5, 5};
    CHECK(kendall_tau_b(flat, inc) == 0.0);
}

TEST_CASE("kendall tau-b agrees with the pairwise definition") {
    auto pairwise = [](const std::vector<double>& a, const std::vector<double>& b) {
        double c = 0, d = 0, only_a = 0, only_b = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = i + 1; j < a.size(); ++j) {
                const double s = (a[i] - a[j]) * (b[i] - b[j]);
                if (s > 0) c += 1;
                else if (s < 0) d += 1;
                else if (a[i] == a[j] && b[i] != b[j]) only_a += 1;
                else if (b[i] == b[j] && a[i] != a[j]) only_b += 1;
            }
        }
        const double den = std::sqrt((c + d + only_a) * (c + d + only_b));
        return den == 0 ? 0.0 : (c - d) / den;
    };
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = rng() % 40;
        const int levels = 1 + static_cast<int>(rng() % 6);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<double>(rng() % static_cast<unsigned>(levels));
            b[i] = static_cast<double>(rng() % static_cast<unsigned>(levels + 2));
        }
        CHECK(kendall_tau_b(a, b) == doctest::Approx(pairwise(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("evaluate on a small world") {
    WorldConfig w;
    w.users = 120;
    w.programs = 60;
    w.channels = 5;
    w.communities = 3;
    w.span_end = 8 * kMinutesPerWeek;
    const auto world = generate(w);
    Dataset d{world.recordings, run_pipeline(world.recordings, ExtractionConfig{})};

    std::vector<AlgorithmSpec> specs(4);
    specs[0].algorithm = Algorithm::Oracle;
    specs[1].algorithm = Algorithm::MostPopular;
    specs[2].algorithm = Algorithm::UserKnn;
    specs[3].algorithm = Algorithm::Random;
    const std::vector<Minutes> cuts{3 * kMinutesPerWeek, 5 * kMinutesPerWeek};
    const std::vector<std::size_t> ns{1, 5, 10, 100};
    const auto report = evaluate(d, specs, cuts, ns, 1);
    CHECK(report.rows.size() == (cuts.size() + 1) * specs.size() * ns.size());

    std::map<std::pair<std::string, std::string>, double> last_recall;
    for (const auto& row : report.rows) {
        CHECK(row.precision >= 0.0);
        CHECK(row.precision <= 1.0);
        CHECK(row.recall >= 0.0);
        CHECK(row.recall <= 1.0);
        CHECK(row.users_counted > 0);
        const auto key = std::pair{row.t ? std::to_string(*row.t) : "overall", row.config};
        if (last_recall.count(key)) CHECK(row.recall >= last_recall[key]);
        last_recall[key] = row.recall;
        if (row.algorithm == "oracle" && row.n == 100) CHECK(row.recall == 1.0);
    }

    std::ostringstream one, many;
    write_report_csv(one, report, "x");
    write_report_csv(many, evaluate(d, specs, cuts, ns, 3), "x");
    CHECK(one.str() == many.str());
    CHECK(one.str().rfind("# x\nt,algorithm,config,n,precision,recall,users_counted\n", 0) == 0);

    std::ostringstream svg;
    write_recall_svg(svg, report, std::nullopt, "cfg --> <b>");
    CHECK(svg.str().find("<svg") != std::string::npos);
    CHECK(svg.str().find("</svg>") != std::string::npos);
    CHECK(svg.str().find("-->", svg.str().find("cfg")) > svg.str().find("cfg") + 3);

    CHECK_THROWS_AS(evaluate(d, specs, {}, ns), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(d, specs, cuts, {}), std::invalid_argument);
    specs[2].k = 0;
    CHECK_THROWS_AS(evaluate(d, specs, cuts, ns), std::invalid_argument);
}

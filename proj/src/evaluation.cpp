#include "pvrec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace pvrec {

TemporalSplit make_split(std::span<const Recording> recordings, std::span<const Event> events, Minutes t) {
    if (recordings.empty()) throw std::invalid_argument("cannot split an empty dataset");
    const auto [lo, hi] = std::minmax_element(recordings.begin(), recordings.end(), [](const auto& a, const auto& b) {
        return a.created_at < b.created_at;
    });
    if (!(t > lo->created_at && t < hi->created_at)) {
        throw std::invalid_argument("cut time " + std::to_string(t) + " outside the dataset span (" +
                                    std::to_string(lo->created_at) + ", " + std::to_string(hi->created_at) + ")");
    }

    std::unordered_map<std::string, const Recording*> by_id;
    for (const auto& r : recordings) by_id.emplace(r.id, &r);

    TemporalSplit split;
    split.t = t;
    for (const auto& e : events) {
        const bool active = next_occurrence(e, t).has_value();
        if (active) split.active.insert(e.id);
        std::map<UserId, bool> before;  // user -> has a recording created before t
        for (const auto& rid : e.member_recordings) {
            auto it = by_id.find(rid);
            if (it == by_id.end()) throw std::invalid_argument("event " + e.id + " names unknown recording " + rid);
            bool& b = before[it->second->user];
            b = b || it->second->created_at < t;
        }
        for (const auto& [user, b] : before) {
            if (b) split.history[user].insert(e.id);
            else if (active) split.truth[user].insert(e.id);
        }
    }
    return split;
}

void audit_no_leakage(const TemporalSplit& split, std::span<const Recording> recordings,
                      std::span<const Event> events) {
    std::unordered_map<std::string, const Event*> event_by_id;
    for (const auto& e : events) event_by_id.emplace(e.id, &e);
    std::unordered_map<std::string, const Recording*> by_id;
    for (const auto& r : recordings) by_id.emplace(r.id, &r);
    for (const auto& [user, items] : split.history) {
        for (const auto& eid : items) {
            const Event& e = *event_by_id.at(eid);
            const bool ok = std::any_of(e.member_recordings.begin(), e.member_recordings.end(), [&](const auto& rid) {
                const Recording& r = *by_id.at(rid);
                return r.user == user && r.created_at < split.t;
            });
            if (!ok) throw std::logic_error("history of " + user.str() + " leaks post-cut event " + eid);
        }
    }
}

TrainingView make_training_view(const TemporalSplit& split, std::span<const Recording> recordings,
                                 std::span<const Event> events) {
    std::set<UserId> user_set;
    for (const auto& r : recordings) user_set.insert(r.user);
    std::vector<UserId> users(user_set.begin(), user_set.end());
    std::vector<std::string> items;
    items.reserve(events.size());
    for (const auto& e : events) items.push_back(e.id);
    std::sort(items.begin(), items.end());

    auto item_of = [&](const std::string& id) {
        auto it = std::lower_bound(items.begin(), items.end(), id);
        if (it == items.end() || *it != id) throw std::invalid_argument("split names unknown event " + id);
        return static_cast<Index>(it - items.begin());
    };
    auto to_indices = [&](const std::set<std::string>& ids) {
        std::vector<Index> out;
        for (const auto& id : ids) out.push_back(item_of(id));
        std::sort(out.begin(), out.end());
        return out;
    };

    std::vector<std::vector<Index>> rows(users.size());
    std::vector<std::vector<Index>> truth(users.size());
    for (std::size_t u = 0; u < users.size(); ++u) {
        if (auto h = split.history.find(users[u]); h != split.history.end()) rows[u] = to_indices(h->second);
        if (auto v = split.truth.find(users[u]); v != split.truth.end()) truth[u] = to_indices(v->second);
    }
    auto candidates = to_indices(split.active);
    return {InteractionMatrix(std::move(users), std::move(items), std::move(rows)), std::move(candidates),
            std::move(truth)};
}

PrecisionRecall precision_recall(std::span<const Index> recommended, std::span<const Index> truth, std::size_t n) {
    if (n == 0) throw std::invalid_argument("precision/recall needs n >= 1");
    if (truth.empty()) throw std::invalid_argument("precision/recall needs a nonempty truth set");
    const std::size_t take = std::min(n, recommended.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < take; ++i) {
        if (std::find(truth.begin(), truth.end(), recommended[i]) != truth.end()) ++hits;
    }
    return {static_cast<double>(hits) / static_cast<double>(n),
            static_cast<double>(hits) / static_cast<double>(truth.size())};
}

AveragedMetrics average_metrics(std::span<const ScoredList> scored, std::span<const std::vector<Index>> truth,
                                std::size_t n) {
    AveragedMetrics out;
    for (const auto& list : scored) {
        const auto& t = truth[list.user];
        if (t.empty()) continue;
        const auto pr = precision_recall(recommend_topn(list, n), t, n);
        out.precision += pr.precision;
        out.recall += pr.recall;
        ++out.users_counted;
    }
    if (out.users_counted > 0) {
        out.precision /= static_cast<double>(out.users_counted);
        out.recall /= static_cast<double>(out.users_counted);
    }
    return out;
}

EvalReport evaluate(const Dataset& dataset, std::span<const AlgorithmSpec> algorithms, std::span<const Minutes> t_list,
                    std::span<const std::size_t> n_list, unsigned threads) {
    if (t_list.empty()) throw std::invalid_argument("evaluation needs at least one cut time");
    if (n_list.empty()) throw std::invalid_argument("evaluation needs at least one list length");
    if (algorithms.empty()) throw std::invalid_argument("evaluation needs at least one algorithm");
    for (auto n : n_list) {
        if (n == 0) throw std::invalid_argument("list lengths must be >= 1");
    }
    for (const auto& spec : algorithms) spec.validate();

    EvalReport report;
    // overall[a][k] accumulates the per-t averages
    std::vector<std::vector<AveragedMetrics>> overall(algorithms.size(), std::vector<AveragedMetrics>(n_list.size()));
    for (auto t : t_list) {
        const auto split = make_split(dataset.recordings, dataset.events, t);
        audit_no_leakage(split, dataset.recordings, dataset.events);
        const auto view = make_training_view(split, dataset.recordings, dataset.events);
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            const auto scored = score_users(algorithms[a], view.matrix, view.candidates, view.truth, threads);
            for (std::size_t k = 0; k < n_list.size(); ++k) {
                const auto m = average_metrics(scored, view.truth, n_list[k]);
                report.rows.push_back({t, std::string(to_string(algorithms[a].algorithm)), algorithms[a].describe(),
                                       n_list[k], m.precision, m.recall, m.users_counted});
                overall[a][k].precision += m.precision;
                overall[a][k].recall += m.recall;
                overall[a][k].users_counted += m.users_counted;
            }
        }
    }
    const auto cuts = static_cast<double>(t_list.size());
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
        for (std::size_t k = 0; k < n_list.size(); ++k) {
            const auto& m = overall[a][k];
            report.rows.push_back({std::nullopt, std::string(to_string(algorithms[a].algorithm)),
                                   algorithms[a].describe(), n_list[k], m.precision / cuts, m.recall / cuts,
                                   m.users_counted});
        }
    }
    return report;
}

double kendall_tau_b(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("kendall tau needs paired samples");
    // Knight's algorithm: sort by (a, b), then count the inversions in b with
    // a merge sort.
    const std::size_t n = a.size();
    std::vector<std::pair<double, double>> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = {a[i], b[i]};
    std::sort(v.begin(), v.end());

    auto tied_pairs = [](auto first, auto last, auto equal) {
        long long total = 0;
        while (first != last) {
            auto run = first + 1;
            while (run != last && equal(*first, *run)) ++run;
            const long long len = run - first;
            total += len * (len - 1) / 2;
            first = run;
        }
        return total;
    };
    const long long pairs = static_cast<long long>(n) * static_cast<long long>(n - (n > 0)) / 2;
    const long long ties_a = tied_pairs(v.begin(), v.end(), [](auto& x, auto& y) { return x.first == y.first; });
    const long long ties_ab = tied_pairs(v.begin(), v.end(), [](auto& x, auto& y) { return x == y; });

    std::vector<double> ys(n);
    std::vector<double> scratch(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = v[i].second;
    long long swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (ys[j] < ys[i]) {
                    swaps += static_cast<long long>(mid - i);
                    scratch[k++] = ys[j++];
                } else {
                    scratch[k++] = ys[i++];
                }
            }
            while (i < mid) scratch[k++] = ys[i++];
            while (j < hi) scratch[k++] = ys[j++];
        }
        ys.swap(scratch);
    }
    const long long ties_b = tied_pairs(ys.begin(), ys.end(), [](double x, double y) { return x == y; });

    const double n1 = static_cast<double>(pairs - ties_a);
    const double n2 = static_cast<double>(pairs - ties_b);
    if (n1 == 0.0 || n2 == 0.0) return 0.0;
    const long long score = pairs - ties_a - ties_b + ties_ab - 2 * swaps;
    return static_cast<double>(score) / std::sqrt(n1 * n2);
}

}  // namespace pvrec

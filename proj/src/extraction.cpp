#include "pvrec/extraction.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

namespace pvrec {
namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

using GroupKey = std::pair<ChannelId, Periodicity>;

bool within(const TimingDistance& d, Minutes limit_b, Minutes limit_f) {
    return d.start < limit_b && d.end < limit_f;
}

Minutes distance_sum(const TimingDistance& d) { return d.start + d.end; }

void add_members(Event& e, std::span<const Recording> members) {
    for (const auto& r : members) {
        e.member_recordings.insert(r.id);
        e.supporters.insert(r.user);
        ++e.title_votes[r.title];
        e.created_at = std::min(e.created_at, r.created_at);
    }
    e.title = choose_title(e.title_votes);
}

// Merges every event of `group` that is connected under the collapse
// predicate, repeating until a pass makes no merge.
void collapse_group(std::vector<Event>& group, const ExtractionConfig& cfg) {
    for (;;) {
        std::sort(group.begin(), group.end(), [](const Event& a, const Event& b) { return id_older(a.id, b.id); });
        DisjointSets sets(group.size());
        bool merged = false;
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                auto d = timing_distance(group[i].timing, group[j].timing, group[i].periodicity);
                if (within(d, cfg.collapse_b, cfg.collapse_f)) merged |= sets.unite(i, j);
            }
        }
        if (!merged) return;

        std::vector<Event> next;
        std::vector<std::vector<std::size_t>> components(group.size());
        for (std::size_t i = 0; i < group.size(); ++i) components[sets.find(i)].push_back(i);
        for (std::size_t root = 0; root < group.size(); ++root) {
            const auto& comp = components[root];
            if (comp.empty()) continue;
            if (comp.size() == 1) {
                next.push_back(std::move(group[comp[0]]));
                continue;
            }
            // comp is in age order; the root is the oldest event
            std::vector<std::pair<Timing, std::size_t>> weighted;
            for (auto i : comp) weighted.emplace_back(group[i].timing, group[i].support());
            Event out = std::move(group[comp[0]]);
            out.timing = weighted_mean(weighted);
            for (std::size_t k = 1; k < comp.size(); ++k) {
                Event& other = group[comp[k]];
                out.supporters.insert(other.supporters.begin(), other.supporters.end());
                out.member_recordings.insert(other.member_recordings.begin(), other.member_recordings.end());
                for (const auto& [title, n] : other.title_votes) out.title_votes[title] += n;
                out.created_at = std::min(out.created_at, other.created_at);
            }
            out.title = choose_title(out.title_votes);
            next.push_back(std::move(out));
        }
        group = std::move(next);
    }
}

}  // namespace

void ExtractionConfig::validate() const {
    if (delta_b <= 0 || delta_f <= 0 || collapse_b <= 0 || collapse_f <= 0 || batch_length <= 0) {
        throw std::invalid_argument("extraction thresholds and batch length must be positive");
    }
}

const Recording& Cluster::centroid_recording() const {
    for (const auto& m : members) {
        if (m.id == centroid) return m;
    }
    throw std::logic_error("cluster centroid is not a member");
}

std::string elect_centroid(std::span<const Recording> members) {
    if (members.empty()) throw std::invalid_argument("cannot elect the centroid of an empty cluster");
    const Recording* best = nullptr;
    Minutes best_cost = 0;
    for (const auto& candidate : members) {
        Minutes cost = 0;
        for (const auto& other : members) {
            cost += distance_sum(timing_distance(candidate.timing, other.timing, candidate.periodicity));
        }
        const bool better =
            best == nullptr || cost < best_cost ||
            (cost == best_cost && std::tie(candidate.created_at, candidate.id) < std::tie(best->created_at, best->id));
        if (better) {
            best = &candidate;
            best_cost = cost;
        }
    }
    return best->id;
}

std::string choose_title(const std::map<std::string, std::size_t>& votes) {
    if (votes.empty()) throw std::invalid_argument("cannot choose a title from no recordings");
    // map iteration is lexicographic, so the first maximum wins ties
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

std::string choose_title(std::span<const Recording> members) {
    std::map<std::string, std::size_t> votes;
    for (const auto& r : members) ++votes[r.title];
    return choose_title(votes);
}

std::vector<Cluster> cluster_batch(std::span<const Recording> recordings, const ExtractionConfig& cfg) {
    std::map<GroupKey, std::vector<const Recording*>> groups;
    for (const auto& r : recordings) groups[{r.channel, r.periodicity}].push_back(&r);

    std::vector<Cluster> clusters;
    for (auto& [key, group] : groups) {
        std::sort(group.begin(), group.end(), [](const Recording* a, const Recording* b) { return a->id < b->id; });
        DisjointSets sets(group.size());
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                auto d = timing_distance(group[i]->timing, group[j]->timing, key.second);
                if (within(d, cfg.delta_b, cfg.delta_f)) sets.unite(i, j);
            }
        }
        std::vector<std::vector<Recording>> parts(group.size());
        for (std::size_t i = 0; i < group.size(); ++i) parts[sets.find(i)].push_back(*group[i]);
        for (auto& part : parts) {
            if (part.empty()) continue;
            Cluster c;
            c.channel = key.first;
            c.periodicity = key.second;
            c.centroid = elect_centroid(part);
            c.members = std::move(part);
            clusters.push_back(std::move(c));
        }
    }
    std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        const auto& ca = a.centroid_recording();
        const auto& cb = b.centroid_recording();
        return std::tie(a.channel, a.periodicity, ca.timing.start, a.centroid) <
               std::tie(b.channel, b.periodicity, cb.timing.start, b.centroid);
    });
    return clusters;
}

EventIdSequence EventIdSequence::after(std::span<const Event> events) {
    std::uint64_t max_seq = 0;
    for (const auto& e : events) {
        if (e.id.size() < 2 || e.id[0] != 'e') continue;
        std::uint64_t seq = 0;
        bool numeric = true;
        for (std::size_t i = 1; i < e.id.size() && numeric; ++i) {
            if (e.id[i] < '0' || e.id[i] > '9') numeric = false;
            else seq = seq * 10 + static_cast<std::uint64_t>(e.id[i] - '0');
        }
        if (numeric) max_seq = std::max(max_seq, seq);
    }
    return EventIdSequence(max_seq + 1);
}

std::string EventIdSequence::next() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "e%08llu", static_cast<unsigned long long>(next_++));
    return buf;
}

bool id_older(const std::string& a, const std::string& b) noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

Timing weighted_mean(std::span<const std::pair<Timing, std::size_t>> timings) {
    if (timings.empty()) throw std::invalid_argument("weighted mean of no timings");
    const Frame frame = timings.front().first.frame;
    std::size_t ref = 0;
    for (std::size_t i = 1; i < timings.size(); ++i) {
        if (timings[i].first.frame != frame) throw std::invalid_argument("weighted mean across frames");
        if (timings[i].second > timings[ref].second) ref = i;
    }

    const bool cyclic = frame != Frame::Absolute;
    const Minutes period = cyclic ? period_length(frame) : 0;
    auto offset = [&](Minutes x, Minutes anchor) {
        if (!cyclic) return x - anchor;
        return floor_mod(x - anchor + period / 2, period) - period / 2;
    };

    Minutes total = 0;
    Minutes sum_start = 0;
    Minutes sum_end = 0;
    const Timing& anchor = timings[ref].first;
    for (const auto& [t, w] : timings) {
        const auto weight = static_cast<Minutes>(w);
        total += weight;
        sum_start += weight * offset(t.start, anchor.start);
        sum_end += weight * offset(t.end, anchor.end);
    }
    if (total <= 0) throw std::invalid_argument("weighted mean with zero total weight");

    auto rounded = [total](Minutes sum) { return floor_div(2 * sum + total, 2 * total); };
    Timing out{anchor.start + rounded(sum_start), anchor.end + rounded(sum_end), frame};
    if (cyclic) {
        out.start = floor_mod(out.start, period);
        out.end = floor_mod(out.end, period);
        if (out.end == out.start) out.end = floor_mod(out.start + 1, period);
    } else if (out.end <= out.start) {
        out.end = out.start + 1;
    }
    return out;
}

std::vector<Event> aggregate(std::span<const Cluster> clusters, std::vector<Event> existing,
                             const ExtractionConfig& cfg, EventIdSequence& ids) {
    std::map<GroupKey, std::vector<std::size_t>> index;
    for (std::size_t i = 0; i < existing.size(); ++i) {
        index[{existing[i].channel, existing[i].periodicity}].push_back(i);
    }

    for (const auto& cluster : clusters) {
        const Recording& centroid = cluster.centroid_recording();
        auto& candidates = index[{cluster.channel, cluster.periodicity}];

        std::size_t best = existing.size();
        Minutes best_cost = 0;
        for (auto i : candidates) {
            auto d = timing_distance(existing[i].timing, centroid.timing, cluster.periodicity);
            if (!within(d, cfg.delta_b, cfg.delta_f)) continue;
            const Minutes cost = distance_sum(d);
            if (best == existing.size() || cost < best_cost ||
                (cost == best_cost && id_older(existing[i].id, existing[best].id))) {
                best = i;
                best_cost = cost;
            }
        }

        if (best == existing.size()) {
            Event e;
            e.id = ids.next();
            e.channel = cluster.channel;
            e.periodicity = cluster.periodicity;
            e.timing = centroid.timing;
            e.created_at = centroid.created_at;
            add_members(e, cluster.members);
            candidates.push_back(existing.size());
            existing.push_back(std::move(e));
            continue;
        }

        Event& e = existing[best];
        const std::pair<Timing, std::size_t> parts[] = {{e.timing, e.support()},
                                                        {centroid.timing, cluster.members.size()}};
        e.timing = weighted_mean(parts);
        add_members(e, cluster.members);
    }
    return existing;
}

std::vector<Event> aggregate(std::span<const Cluster> clusters, std::vector<Event> existing,
                             const ExtractionConfig& cfg) {
    auto ids = EventIdSequence::after(existing);
    return aggregate(clusters, std::move(existing), cfg, ids);
}

std::vector<Event> collapse(std::vector<Event> events, const ExtractionConfig& cfg) {
    std::map<GroupKey, std::vector<Event>> groups;
    for (auto& e : events) groups[{e.channel, e.periodicity}].push_back(std::move(e));
    std::vector<Event> out;
    for (auto& [key, group] : groups) {
        collapse_group(group, cfg);
        for (auto& e : group) out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) { return id_older(a.id, b.id); });
    return out;
}

std::vector<Event> run_pipeline(std::span<const Recording> recordings, const ExtractionConfig& cfg) {
    cfg.validate();
    for (std::size_t i = 1; i < recordings.size(); ++i) {
        if (recordings[i].created_at < recordings[i - 1].created_at) {
            throw std::invalid_argument("recordings are not sorted by created_at (at " + recordings[i].id + ")");
        }
    }

    // The store is kept per group so each batch only revisits the groups it
    // touched; untouched groups are already collapsed.
    std::map<GroupKey, std::vector<Event>> store;
    EventIdSequence ids;
    std::size_t begin = 0;
    while (begin < recordings.size()) {
        const Minutes window = floor_div(recordings[begin].created_at, cfg.batch_length);
        std::size_t end = begin;
        while (end < recordings.size() && floor_div(recordings[end].created_at, cfg.batch_length) == window) ++end;

        const auto clusters = cluster_batch(recordings.subspan(begin, end - begin), cfg);
        std::size_t c = 0;
        while (c < clusters.size()) {
            std::size_t d = c;
            while (d < clusters.size() && clusters[d].channel == clusters[c].channel &&
                   clusters[d].periodicity == clusters[c].periodicity) {
                ++d;
            }
            auto& group = store[{clusters[c].channel, clusters[c].periodicity}];
            group = aggregate(std::span(clusters).subspan(c, d - c), std::move(group), cfg, ids);
            collapse_group(group, cfg);
            c = d;
        }
        begin = end;
    }

    std::vector<Event> out;
    for (auto& [key, group] : store) {
        for (auto& e : group) out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const Event& a, const Event& b) { return id_older(a.id, b.id); });
    return out;
}

}  // namespace pvrec

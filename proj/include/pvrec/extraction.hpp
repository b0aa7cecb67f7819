#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pvrec/model.hpp"

namespace pvrec {

/// Thresholds for turning recordings into events. Clustering links two
/// recordings when both their start and end distances are strictly below
/// delta_b / delta_f; collapsing merges events closer than collapse_b /
/// collapse_f. Recordings are ingested in batch_length windows of created_at.
struct ExtractionConfig {
    Minutes delta_b = 15;
    Minutes delta_f = 15;
    Minutes collapse_b = 15;
    Minutes collapse_f = 15;
    Minutes batch_length = 60;

    /// Throws std::invalid_argument unless every field is positive.
    void validate() const;
};

/// Recordings of one (channel, periodicity) group linked by timing proximity.
struct Cluster {
    std::vector<Recording> members;  // sorted by recording id
    std::string centroid;
    ChannelId channel;
    Periodicity periodicity = Periodicity::NoRepeat;

    const Recording& centroid_recording() const;
};

/// Single-linkage partition of each (channel, periodicity) group. Output is
/// ordered by (channel, periodicity, centroid start, centroid id) and does not
/// depend on the order of the input.
std::vector<Cluster> cluster_batch(std::span<const Recording> recordings, const ExtractionConfig& cfg);

/// Member minimising the summed start+end distance to the others; ties go to
/// the earliest created_at, then the smallest id. Throws on an empty set.
std::string elect_centroid(std::span<const Recording> members);

/// Most frequent title, ties broken lexicographically. Throws on empty input.
std::string choose_title(std::span<const Recording> members);
std::string choose_title(const std::map<std::string, std::size_t>& votes);

/// Event ids are "e" followed by a zero-padded sequence number, so an id that
/// sorts first (see `id_older`) belongs to the older event.
class EventIdSequence {
public:
    explicit EventIdSequence(std::uint64_t next = 1) : next_(next) {}
    /// Continues after the largest sequence number found among `events`.
    static EventIdSequence after(std::span<const Event> events);
    std::string next();

private:
    std::uint64_t next_;
};

/// Natural ordering of generated ids: shorter first, then lexicographic.
bool id_older(const std::string& a, const std::string& b) noexcept;

/// Support-weighted mean of timings sharing a frame. Cyclic offsets are
/// unwrapped into the half-period window around the heaviest entry (the
/// first one on ties) before averaging. Results are rounded half-up to whole
/// minutes and kept non-degenerate.
Timing weighted_mean(std::span<const std::pair<Timing, std::size_t>> timings);

/// Folds freshly clustered recordings into the event store. Each cluster is
/// absorbed by the nearest event of the same channel and periodicity within
/// (delta_b, delta_f) of its centroid, or becomes a new event.
std::vector<Event> aggregate(std::span<const Cluster> clusters, std::vector<Event> existing,
                             const ExtractionConfig& cfg, EventIdSequence& ids);
std::vector<Event> aggregate(std::span<const Cluster> clusters, std::vector<Event> existing,
                             const ExtractionConfig& cfg);

/// Merges events of a (channel, periodicity) group whose timings are within
/// (collapse_b, collapse_f), transitively, until no pair qualifies. The merged
/// event keeps the oldest id. Output is sorted by id.
std::vector<Event> collapse(std::vector<Event> events, const ExtractionConfig& cfg);

/// Full pipeline over recordings sorted by created_at: per batch window,
/// cluster, aggregate into the store, then collapse. Throws
/// std::invalid_argument on unsorted input.
std::vector<Event> run_pipeline(std::span<const Recording> recordings, const ExtractionConfig& cfg);

}  // namespace pvrec

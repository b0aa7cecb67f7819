#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "pvrec/ids.hpp"
#include "pvrec/time.hpp"

namespace pvrec {

/// One user's scheduled capture of a channel slot.
struct Recording {
    std::string id;
    UserId user;
    ChannelId channel;
    Periodicity periodicity = Periodicity::NoRepeat;
    std::string title;
    Timing timing;
    Minutes created_at = 0;

    friend bool operator==(const Recording&, const Recording&) = default;
};

/// Discrete recommendable element aggregated from similar recordings.
///
/// `supporters` is always the set of distinct users over
/// `member_recordings`. `title_votes` counts the titles users gave the member
/// recordings; the displayed title is re-derived from it on every merge.
struct Event {
    std::string id;
    std::set<UserId> supporters;
    ChannelId channel;
    std::string title;
    Timing timing;
    Periodicity periodicity = Periodicity::NoRepeat;
    std::set<std::string> member_recordings;
    std::map<std::string, std::size_t> title_votes;
    Minutes created_at = 0;

    std::size_t support() const noexcept { return member_recordings.size(); }

    friend bool operator==(const Event&, const Event&) = default;
};

/// Next broadcast start strictly after `t`, or nullopt once a one-off event
/// has started.
std::optional<Minutes> next_occurrence(const Event& e, Minutes t);

}  // namespace pvrec

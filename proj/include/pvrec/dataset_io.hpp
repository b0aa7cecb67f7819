#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pvrec/model.hpp"

namespace pvrec {

struct ParseError {
    std::size_t line = 0;
    std::string message;

    std::string describe() const { return "line " + std::to_string(line) + ": " + message; }
};

template <class Row>
struct ParseResult {
    std::vector<Row> rows;
    std::vector<ParseError> errors;

    bool ok() const noexcept { return errors.empty(); }
};

/// Recording id -> event id.
struct Membership {
    std::string recording_id;
    std::string event_id;
};

inline constexpr std::string_view kRecordingsHeader =
    "id,user,channel,periodicity,title,start,end,created_at";
inline constexpr std::string_view kEventsHeader =
    "id,channel,periodicity,title,start,end,supporters,member_count,created_at";
inline constexpr std::string_view kMembershipHeader = "recording_id,event_id";

// Leading lines starting with '#' are comments and are skipped by every
// reader; writers emit `comment` (if nonempty) as such a line.

/// Rows are returned in file order. Bad rows are skipped and reported with
/// their line number; parsing continues past them.
ParseResult<Recording> parse_recordings(std::istream& in);
void write_recordings(std::ostream& out, std::span<const Recording> recordings,
                      const std::string& comment = {});

/// Events read back from CSV carry supporters but no member recording ids or
/// title votes; attach those with `apply_membership`.
ParseResult<Event> parse_events(std::istream& in);
void write_events(std::ostream& out, std::span<const Event> events, const std::string& comment = {});

ParseResult<Membership> parse_membership(std::istream& in);
void write_membership(std::ostream& out, std::span<const Event> events, const std::string& comment = {});

/// Fills member_recordings/title_votes of `events` from a membership table.
/// Throws std::runtime_error on a dangling id or a supporter mismatch.
void apply_membership(std::vector<Event>& events, std::span<const Membership> membership,
                      std::span<const Recording> recordings);

}  // namespace pvrec

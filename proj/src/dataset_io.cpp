#include "pvrec/dataset_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "pvrec/csv.hpp"

namespace pvrec {
namespace {

bool parse_int(const std::string& s, Minutes& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && !s.empty();
}

std::string join_fields(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

// Skips comment and blank lines, then checks the header. Returns false (and
// records an error) when the header is missing or wrong.
template <class Row>
bool read_header(std::istream& in, std::string_view expected, std::size_t& line,
                 ParseResult<Row>& result) {
    std::vector<std::string> fields;
    std::size_t first = 0;
    for (;;) {
        if (in.peek() == '#') {
            std::string comment;
            std::getline(in, comment);
            ++line;
            continue;
        }
        if (!csv::read_record(in, fields, line, first)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (join_fields(fields) != expected) {
            result.errors.push_back({first, "expected header `" + std::string(expected) + "`"});
            return false;
        }
        return true;
    }
    result.errors.push_back({line + 1, "missing header `" + std::string(expected) + "`"});
    return false;
}

void write_comment(std::ostream& out, const std::string& comment) {
    if (comment.empty()) return;
    out << "# ";
    for (char c : comment) out << (c == '\n' ? ' ' : c);
    out << '\n';
}

template <class Row, class F>
ParseResult<Row> parse_rows(std::istream& in, std::string_view header, std::size_t arity, F&& convert) {
    ParseResult<Row> result;
    std::size_t line = 0;
    if (!read_header(in, header, line, result)) return result;
    std::vector<std::string> fields;
    std::size_t first = 0;
    for (;;) {
        try {
            if (!csv::read_record(in, fields, line, first)) break;
        } catch (const std::exception& e) {
            result.errors.push_back({first, e.what()});
            break;
        }
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != arity) {
            result.errors.push_back({first, "expected " + std::to_string(arity) + " fields, got " +
                                                std::to_string(fields.size())});
            continue;
        }
        Row row;
        if (std::string err = convert(fields, row); !err.empty()) {
            result.errors.push_back({first, std::move(err)});
            continue;
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::string convert_timing(const std::string& periodicity, const std::string& start,
                           const std::string& end, Periodicity& p, Timing& timing) {
    auto parsed = parse_periodicity(periodicity);
    if (!parsed) return "unknown periodicity '" + periodicity + "'";
    p = *parsed;
    timing.frame = frame_of(p);
    if (!parse_int(start, timing.start)) return "bad integer in start: '" + start + "'";
    if (!parse_int(end, timing.end)) return "bad integer in end: '" + end + "'";
    return validate(timing);
}

}  // namespace

ParseResult<Recording> parse_recordings(std::istream& in) {
    return parse_rows<Recording>(in, kRecordingsHeader, 8, [](const auto& f, Recording& r) -> std::string {
        r.id = f[0];
        r.user = UserId(f[1]);
        r.channel = ChannelId(f[2]);
        r.title = f[4];
        if (r.id.empty()) return "empty recording id";
        if (r.user.empty()) return "empty user id";
        if (r.channel.empty()) return "empty channel id";
        if (auto err = convert_timing(f[3], f[5], f[6], r.periodicity, r.timing); !err.empty()) return err;
        if (!parse_int(f[7], r.created_at)) return "bad integer in created_at: '" + f[7] + "'";
        if (r.periodicity == Periodicity::NoRepeat && r.created_at >= r.timing.start) {
            return "created_at must precede the start of a no-repeat recording";
        }
        return {};
    });
}

void write_recordings(std::ostream& out, std::span<const Recording> recordings, const std::string& comment) {
    write_comment(out, comment);
    out << kRecordingsHeader << '\n';
    for (const auto& r : recordings) {
        csv::write_row(out, {r.id, r.user.str(), r.channel.str(), std::string(to_string(r.periodicity)),
                             r.title, std::to_string(r.timing.start), std::to_string(r.timing.end),
                             std::to_string(r.created_at)});
    }
}

ParseResult<Event> parse_events(std::istream& in) {
    return parse_rows<Event>(in, kEventsHeader, 9, [](const auto& f, Event& e) -> std::string {
        e.id = f[0];
        e.channel = ChannelId(f[1]);
        e.title = f[3];
        if (e.id.empty()) return "empty event id";
        if (auto err = convert_timing(f[2], f[4], f[5], e.periodicity, e.timing); !err.empty()) return err;
        std::size_t pos = 0;
        const std::string& s = f[6];
        while (pos <= s.size()) {
            auto next = s.find(';', pos);
            if (next == std::string::npos) next = s.size();
            if (next > pos) e.supporters.insert(UserId(s.substr(pos, next - pos)));
            pos = next + 1;
        }
        if (e.supporters.empty()) return "event without supporters";
        Minutes count = 0;
        if (!parse_int(f[7], count) || count < 1) return "bad member_count: '" + f[7] + "'";
        if (!parse_int(f[8], e.created_at)) return "bad integer in created_at: '" + f[8] + "'";
        return {};
    });
}

void write_events(std::ostream& out, std::span<const Event> events, const std::string& comment) {
    write_comment(out, comment);
    out << kEventsHeader << '\n';
    for (const auto& e : events) {
        std::string supporters;
        for (const auto& u : e.supporters) {
            if (!supporters.empty()) supporters += ';';
            supporters += u.str();
        }
        csv::write_row(out, {e.id, e.channel.str(), std::string(to_string(e.periodicity)), e.title,
                             std::to_string(e.timing.start), std::to_string(e.timing.end), supporters,
                             std::to_string(e.support()), std::to_string(e.created_at)});
    }
}

ParseResult<Membership> parse_membership(std::istream& in) {
    return parse_rows<Membership>(in, kMembershipHeader, 2, [](const auto& f, Membership& m) -> std::string {
        m.recording_id = f[0];
        m.event_id = f[1];
        if (m.recording_id.empty() || m.event_id.empty()) return "empty id";
        return {};
    });
}

void write_membership(std::ostream& out, std::span<const Event> events, const std::string& comment) {
    write_comment(out, comment);
    out << kMembershipHeader << '\n';
    for (const auto& e : events) {
        for (const auto& r : e.member_recordings) csv::write_row(out, {r, e.id});
    }
}

void apply_membership(std::vector<Event>& events, std::span<const Membership> membership,
                      std::span<const Recording> recordings) {
    std::unordered_map<std::string, std::size_t> event_index;
    for (std::size_t i = 0; i < events.size(); ++i) {
        events[i].member_recordings.clear();
        events[i].title_votes.clear();
        event_index.emplace(events[i].id, i);
    }
    std::unordered_map<std::string, const Recording*> by_id;
    for (const auto& r : recordings) by_id.emplace(r.id, &r);

    std::vector<std::set<UserId>> seen(events.size());
    for (const auto& m : membership) {
        auto e = event_index.find(m.event_id);
        if (e == event_index.end()) throw std::runtime_error("membership names unknown event " + m.event_id);
        auto r = by_id.find(m.recording_id);
        if (r == by_id.end()) throw std::runtime_error("membership names unknown recording " + m.recording_id);
        Event& ev = events[e->second];
        ev.member_recordings.insert(m.recording_id);
        ++ev.title_votes[r->second->title];
        seen[e->second].insert(r->second->user);
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (seen[i] != events[i].supporters) {
            throw std::runtime_error("supporters of event " + events[i].id + " disagree with membership");
        }
    }
}

}  // namespace pvrec

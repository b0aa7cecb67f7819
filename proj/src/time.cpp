#include "pvrec/time.hpp"

#include <cstdlib>
#include <stdexcept>

namespace pvrec {

std::string_view to_string(Periodicity p) noexcept {
    switch (p) {
        case Periodicity::NoRepeat: return "no-repeat";
        case Periodicity::Weekly: return "weekly";
        case Periodicity::Daily: return "daily";
        case Periodicity::MonFri: return "mon-fri";
        case Periodicity::MonSat: return "mon-sat";
    }
    return "?";
}

std::string_view to_string(Frame f) noexcept {
    switch (f) {
        case Frame::Absolute: return "absolute";
        case Frame::Week: return "week";
        case Frame::Day: return "day";
    }
    return "?";
}

std::optional<Periodicity> parse_periodicity(std::string_view token) noexcept {
    for (auto p : {Periodicity::NoRepeat, Periodicity::Weekly, Periodicity::Daily,
                   Periodicity::MonFri, Periodicity::MonSat}) {
        if (token == to_string(p)) return p;
    }
    return std::nullopt;
}

Frame frame_of(Periodicity p) noexcept {
    switch (p) {
        case Periodicity::NoRepeat: return Frame::Absolute;
        case Periodicity::Weekly: return Frame::Week;
        default: return Frame::Day;
    }
}

bool is_periodic(Periodicity p) noexcept { return p != Periodicity::NoRepeat; }

Minutes period_length(Frame f) {
    switch (f) {
        case Frame::Week: return kMinutesPerWeek;
        case Frame::Day: return kMinutesPerDay;
        case Frame::Absolute: break;
    }
    throw std::invalid_argument("absolute frame has no period");
}

Minutes period_length(Periodicity p) {
    if (p == Periodicity::NoRepeat) throw std::invalid_argument("no-repeat has no period");
    return period_length(frame_of(p));
}

Minutes floor_mod(Minutes a, Minutes m) noexcept {
    Minutes r = a % m;
    return r < 0 ? r + m : r;
}

Minutes floor_div(Minutes a, Minutes m) noexcept {
    return (a - floor_mod(a, m)) / m;
}

int weekday(Minutes absolute) noexcept {
    return static_cast<int>(floor_mod(floor_div(absolute, kMinutesPerDay), 7));
}

std::string validate(const Timing& t) {
    if (t.frame == Frame::Absolute) {
        if (t.end <= t.start) return "end must be after start";
        return {};
    }
    const Minutes p = period_length(t.frame);
    auto in_range = [p](Minutes x) { return x >= 0 && x < p; };
    if (!in_range(t.start) || !in_range(t.end)) {
        return "timing out of range [0," + std::to_string(p) + ")";
    }
    if (t.start == t.end) return "zero-length slot";
    return {};
}

Minutes duration(const Timing& t) {
    if (t.frame == Frame::Absolute) return t.end - t.start;
    return floor_mod(t.end - t.start, period_length(t.frame));
}

Minutes circular_distance(Minutes x, Minutes y, Minutes period) noexcept {
    const Minutes d = floor_mod(x - y, period);
    return d < period - d ? d : period - d;
}

TimingDistance timing_distance(const Timing& a, const Timing& b, Periodicity p) {
    const Frame f = frame_of(p);
    if (a.frame != f || b.frame != f) {
        throw std::invalid_argument("timing frame does not match periodicity " +
                                    std::string(to_string(p)));
    }
    if (f == Frame::Absolute) {
        return {std::llabs(a.start - b.start), std::llabs(a.end - b.end)};
    }
    const Minutes period = period_length(f);
    return {circular_distance(a.start, b.start, period),
            circular_distance(a.end, b.end, period)};
}

bool admits_weekday(Periodicity p, int wd) noexcept {
    switch (p) {
        case Periodicity::MonFri: return wd <= 4;
        case Periodicity::MonSat: return wd <= 5;
        default: return true;
    }
}

std::optional<Minutes> next_start(const Timing& timing, Periodicity p, Minutes after) {
    if (p == Periodicity::NoRepeat) {
        if (timing.start > after) return timing.start;
        return std::nullopt;
    }
    const Minutes period = period_length(p);
    Minutes candidate = after - floor_mod(after, period) + timing.start;
    if (candidate <= after) candidate += period;
    while (!admits_weekday(p, weekday(candidate))) candidate += kMinutesPerDay;
    return candidate;
}

}  // namespace pvrec

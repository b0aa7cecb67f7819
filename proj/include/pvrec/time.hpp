#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pvrec {

/// All times are integer minutes. Absolute minute 0 is a Monday 00:00.
using Minutes = std::int64_t;

inline constexpr Minutes kMinutesPerDay = 1440;
inline constexpr Minutes kMinutesPerWeek = 7 * kMinutesPerDay;

enum class Periodicity { NoRepeat, Weekly, Daily, MonFri, MonSat };

/// Reference frame a timing is expressed in.
enum class Frame { Absolute, Week, Day };

std::string_view to_string(Periodicity p) noexcept;
std::string_view to_string(Frame f) noexcept;
std::optional<Periodicity> parse_periodicity(std::string_view token) noexcept;

Frame frame_of(Periodicity p) noexcept;
bool is_periodic(Periodicity p) noexcept;

/// Cycle length of a periodic frame. Throws std::invalid_argument for
/// NoRepeat, which has no period.
Minutes period_length(Periodicity p);
Minutes period_length(Frame f);

/// Start/end of a recording or event. On cyclic frames end may be smaller
/// than start when the slot wraps past midnight or the end of the week.
struct Timing {
    Minutes start = 0;
    Minutes end = 0;
    Frame frame = Frame::Absolute;

    friend bool operator==(const Timing&, const Timing&) = default;
};

/// Empty string when the timing is consistent with its frame, otherwise a
/// short description of the violation.
std::string validate(const Timing& t);

/// Length of the slot; for cyclic frames (end - start) mod period.
Minutes duration(const Timing& t);

struct TimingDistance {
    Minutes start = 0;
    Minutes end = 0;

    friend bool operator==(const TimingDistance&, const TimingDistance&) = default;
};

/// Plain absolute differences on the absolute frame, circular distance on
/// cyclic frames. Throws std::invalid_argument if either timing is not in the
/// frame implied by the periodicity.
TimingDistance timing_distance(const Timing& a, const Timing& b, Periodicity p);

/// min(|x-y|, P-|x-y|) for offsets in [0, P).
Minutes circular_distance(Minutes x, Minutes y, Minutes period) noexcept;

Minutes floor_mod(Minutes a, Minutes m) noexcept;
Minutes floor_div(Minutes a, Minutes m) noexcept;

/// 0 = Monday ... 6 = Sunday.
int weekday(Minutes absolute) noexcept;

/// Whether a daily-frame periodicity fires on the given weekday.
bool admits_weekday(Periodicity p, int weekday) noexcept;

/// Smallest absolute time strictly after `after` at which a slot with this
/// timing and periodicity starts; nullopt for an expired one-off slot.
std::optional<Minutes> next_start(const Timing& timing, Periodicity p, Minutes after);

}  // namespace pvrec

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pvrec/model.hpp"

namespace pvrec {

/// Parameters of a synthetic recording log. Users and programs are split into
/// communities; a user records an in-community program with probability
/// 1 - (1 - affinity)^appeal and any other program with
/// 1 - (1 - noise)^appeal, where appeal is a per-program lognormal factor of
/// mean 1 (appeal_sd = 0 makes every program equally appealing).
struct WorldConfig {
    std::uint64_t seed = 7;
    std::size_t channels = 20;
    std::size_t programs = 500;
    std::size_t users = 2000;
    std::size_t communities = 10;
    double affinity = 0.3;
    double noise = 0.02;
    double jitter_sd = 3.0;
    double appeal_sd = 1.5;
    Minutes span_start = 0;
    Minutes span_end = 26 * kMinutesPerWeek;
    /// Earliest a recording can be set before a program's debut.
    Minutes lead = 14 * kMinutesPerDay;
    /// Weights for NoRepeat, Weekly, Daily, MonFri, MonSat.
    std::array<double, 5> periodicity_mix{0.3, 0.4, 0.15, 0.1, 0.05};
    /// Fraction of recordings whose title is a lowercase variant.
    double title_noise = 0.1;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;

    /// Mostly one-off programs announced shortly before they air, so most
    /// candidates at any cut time have little or no earlier feedback.
    static WorldConfig cold_start();
};

struct Program {
    std::string id;
    ChannelId channel;
    Periodicity periodicity = Periodicity::NoRepeat;
    std::string title;
    Timing timing;
    std::size_t community = 0;
    double appeal = 1.0;
    /// One-off programs: broadcast start. Periodic ones: first day they can
    /// be scheduled.
    Minutes debut = 0;
};

struct TruthRow {
    std::string recording_id;
    std::string program_id;
};

struct World {
    std::vector<Program> programs;
    std::vector<Recording> recordings;  // sorted by created_at
    std::vector<TruthRow> truth;
};

/// Deterministic for a given config. Program slots on a shared channel and
/// periodicity start at least an hour apart; recording timings are the
/// program timing plus rounded Gaussian jitter (wrapped on cyclic frames).
World generate(const WorldConfig& cfg);

void write_truth(std::ostream& out, std::span<const TruthRow> truth, const std::string& comment = {});

}  // namespace pvrec

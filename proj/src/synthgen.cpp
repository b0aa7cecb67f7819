#include "pvrec/synthgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "pvrec/csv.hpp"

namespace pvrec {
namespace {

constexpr Periodicity kPeriodicities[] = {Periodicity::NoRepeat, Periodicity::Weekly, Periodicity::Daily,
                                          Periodicity::MonFri, Periodicity::MonSat};
constexpr Minutes kDurations[] = {30, 45, 60, 90, 120};
constexpr int kMaxSlotAttempts = 10000;

std::string padded(const char* prefix, std::size_t value, std::size_t count) {
    const int width = static_cast<int>(std::to_string(std::max<std::size_t>(count, 1)).size());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, value);
    return buf;
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string lowercase(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

void WorldConfig::validate() const {
    if (channels == 0 || programs == 0 || users == 0 || communities == 0) {
        throw std::invalid_argument("channels, programs, users and communities must be positive");
    }
    if (!probability(affinity) || !probability(noise) || !probability(title_noise)) {
        throw std::invalid_argument("affinity, noise and title_noise must lie in [0, 1]");
    }
    if (!(jitter_sd >= 0.0) || !(appeal_sd >= 0.0)) throw std::invalid_argument("jitter_sd and appeal_sd must be >= 0");
    if (span_end - span_start < 2 * kMinutesPerDay) throw std::invalid_argument("span must cover at least two days");
    if (lead <= 0) throw std::invalid_argument("lead must be positive");
    double total = 0.0;
    for (double w : periodicity_mix) {
        if (!(w >= 0.0)) throw std::invalid_argument("periodicity weights must be >= 0");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("periodicity weights must not all be zero");
}

WorldConfig WorldConfig::cold_start() {
    WorldConfig cfg;
    cfg.periodicity_mix = {0.9, 0.1, 0.0, 0.0, 0.0};
    cfg.lead = 3 * kMinutesPerDay;
    return cfg;
}

World generate(const WorldConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform_int = [&](Minutes lo, Minutes hi) {  // inclusive
        return std::uniform_int_distribution<Minutes>(lo, hi)(rng);
    };
    std::discrete_distribution<int> pick_periodicity(cfg.periodicity_mix.begin(), cfg.periodicity_mix.end());

    World world;
    std::set<std::tuple<std::size_t, int, Minutes>> used_slots;  // (channel, periodicity, slot start)
    const Minutes first_debut = cfg.span_start + kMinutesPerDay;
    const Minutes last_debut = cfg.span_end - kMinutesPerDay;

    for (std::size_t p = 0; p < cfg.programs; ++p) {
        Program prog;
        prog.id = padded("p", p + 1, cfg.programs);
        const auto channel = static_cast<std::size_t>(uniform_int(0, static_cast<Minutes>(cfg.channels) - 1));
        prog.channel = ChannelId(padded("ch", channel + 1, cfg.channels));
        prog.periodicity = kPeriodicities[pick_periodicity(rng)];
        prog.title = "Program " + std::to_string(p + 1);
        prog.community = static_cast<std::size_t>(uniform_int(0, static_cast<Minutes>(cfg.communities) - 1));
        prog.appeal = std::exp(cfg.appeal_sd * gauss(rng) - cfg.appeal_sd * cfg.appeal_sd / 2.0);

        // slots start on the hour, so two programs of a group are >= 60 min apart
        const Frame frame = frame_of(prog.periodicity);
        const Minutes duration = kDurations[uniform_int(0, std::size(kDurations) - 1)];
        Minutes start = 0;
        int attempts = 0;
        for (;; ++attempts) {
            if (attempts == kMaxSlotAttempts) {
                throw std::invalid_argument("not enough free slots for " + prog.id + "; add channels or widen the span");
            }
            if (frame == Frame::Absolute) {
                start = floor_div(uniform_int(first_debut, last_debut), 60) * 60;
            } else {
                start = uniform_int(0, period_length(frame) / 60 - 1) * 60;
            }
            if (used_slots.emplace(channel, static_cast<int>(prog.periodicity), start).second) break;
        }
        if (frame == Frame::Absolute) {
            prog.timing = {start, start + duration, frame};
            prog.debut = start;
        } else {
            prog.timing = {start, floor_mod(start + duration, period_length(frame)), frame};
            prog.debut = uniform_int(first_debut, last_debut);
        }
        world.programs.push_back(std::move(prog));
    }

    std::vector<std::size_t> user_community(cfg.users);
    for (auto& c : user_community) c = static_cast<std::size_t>(uniform_int(0, static_cast<Minutes>(cfg.communities) - 1));

    auto jitter = [&] {
        return cfg.jitter_sd > 0.0 ? static_cast<Minutes>(std::llround(cfg.jitter_sd * gauss(rng))) : Minutes{0};
    };

    struct Draft {
        Recording rec;
        std::size_t program;
    };
    std::vector<Draft> drafts;
    for (std::size_t u = 0; u < cfg.users; ++u) {
        const UserId user(padded("u", u + 1, cfg.users));
        for (std::size_t p = 0; p < world.programs.size(); ++p) {
            const Program& prog = world.programs[p];
            const double base = prog.community == user_community[u] ? cfg.affinity : cfg.noise;
            const double chance = 1.0 - std::pow(1.0 - base, prog.appeal);
            if (unit(rng) >= chance) continue;

            Recording r;
            r.user = user;
            r.channel = prog.channel;
            r.periodicity = prog.periodicity;
            r.title = unit(rng) < cfg.title_noise ? lowercase(prog.title) : prog.title;
            r.timing = prog.timing;
            const Minutes ds = jitter();
            const Minutes de = jitter();
            if (prog.timing.frame == Frame::Absolute) {
                r.timing.start += ds;
                r.timing.end = std::max(r.timing.end + de, r.timing.start + 1);
                const Minutes latest = r.timing.start - 1;
                const Minutes earliest = std::min(latest, std::max(cfg.span_start, r.timing.start - cfg.lead));
                r.created_at = uniform_int(earliest, latest);
            } else {
                const Minutes period = period_length(prog.timing.frame);
                r.timing.start = floor_mod(r.timing.start + ds, period);
                r.timing.end = floor_mod(r.timing.end + de, period);
                if (r.timing.end == r.timing.start) r.timing.end = floor_mod(r.timing.start + 1, period);
                const Minutes earliest = std::max(cfg.span_start, prog.debut - cfg.lead);
                r.created_at = uniform_int(earliest, cfg.span_end - 1);
            }
            drafts.push_back({std::move(r), p});
        }
    }

    std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
        return std::tie(a.rec.created_at, a.rec.user, a.program) < std::tie(b.rec.created_at, b.rec.user, b.program);
    });
    world.recordings.reserve(drafts.size());
    world.truth.reserve(drafts.size());
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        drafts[i].rec.id = padded("r", i + 1, drafts.size());
        world.truth.push_back({drafts[i].rec.id, world.programs[drafts[i].program].id});
        world.recordings.push_back(std::move(drafts[i].rec));
    }
    return world;
}

void write_truth(std::ostream& out, std::span<const TruthRow> truth, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "recording_id,program_id\n";
    for (const auto& t : truth) csv::write_row(out, {t.recording_id, t.program_id});
}

}  // namespace pvrec

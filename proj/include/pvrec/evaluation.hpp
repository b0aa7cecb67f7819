#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pvrec/model.hpp"
#include "pvrec/recommenders.hpp"

namespace pvrec {

/// Recordings plus the event catalog extracted from all of them. Events must
/// carry their member recording ids.
struct Dataset {
    std::vector<Recording> recordings;
    std::vector<Event> events;
};

/// State of the catalog at cut time t.
///
/// `active` holds events still recommendable at t (one-off events starting
/// after t, every periodic event). `history[u]` holds events u set up before
/// t; `truth[u]` holds active events u set up at or after t and not before.
struct TemporalSplit {
    Minutes t = 0;
    std::set<std::string> active;
    std::map<UserId, std::set<std::string>> history;
    std::map<UserId, std::set<std::string>> truth;
};

/// Membership of an event in history vs truth is decided by the created_at of
/// the user's member recordings. Throws std::invalid_argument unless t lies
/// strictly inside the span of created_at values.
TemporalSplit make_split(std::span<const Recording> recordings, std::span<const Event> events, Minutes t);

/// Throws std::logic_error if any history pair lacks a member recording by
/// that user created before t.
void audit_no_leakage(const TemporalSplit& split, std::span<const Recording> recordings,
                      std::span<const Event> events);

/// The split in index space: matrix rows are histories over every user and
/// every event of the catalog (events first supported after t are cold
/// columns), candidates are the active events, truth is per user.
struct TrainingView {
    InteractionMatrix matrix;
    std::vector<Index> candidates;
    std::vector<std::vector<Index>> truth;
};

TrainingView make_training_view(const TemporalSplit& split, std::span<const Recording> recordings,
                                 std::span<const Event> events);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

/// hits over the first n recommendations; precision = hits/n, recall =
/// hits/|truth|. Throws std::invalid_argument for n == 0 or empty truth.
PrecisionRecall precision_recall(std::span<const Index> recommended, std::span<const Index> truth, std::size_t n);

/// Macro-averaged precision/recall at top-n over users with nonempty truth.
struct AveragedMetrics {
    double precision = 0.0;
    double recall = 0.0;
    std::size_t users_counted = 0;
};

AveragedMetrics average_metrics(std::span<const ScoredList> scored, std::span<const std::vector<Index>> truth,
                                std::size_t n);

struct EvalRow {
    std::optional<Minutes> t;  // nullopt for the overall mean over cut times
    std::string algorithm;
    std::string config;
    std::size_t n = 0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t users_counted = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
};

/// For every cut time, rebuilds the interaction matrix from pre-t data,
/// scores every algorithm and records per-n macro averages; then appends the
/// unweighted mean over cut times as the overall rows (users_counted summed).
/// Throws std::invalid_argument on empty t_list/n_list or invalid specs.
EvalReport evaluate(const Dataset& dataset, std::span<const AlgorithmSpec> algorithms, std::span<const Minutes> t_list,
                    std::span<const std::size_t> n_list, unsigned threads = 1);

/// Kendall tau-b between two paired score vectors; 0 when either side is
/// constant.
double kendall_tau_b(std::span<const double> a, std::span<const double> b);

}  // namespace pvrec

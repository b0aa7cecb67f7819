// pvrec: synthetic PVR logs -> events -> recommendations -> evaluation.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pvrec/csv.hpp"
#include "pvrec/dataset_io.hpp"
#include "pvrec/evaluation.hpp"
#include "pvrec/extraction.hpp"
#include "pvrec/report.hpp"
#include "pvrec/synthgen.hpp"

namespace fs = std::filesystem;
using namespace pvrec;

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    unsigned threads = 0;

    // synth
    WorldConfig world;
    bool cold_start = false;
    bool lead_given = false;
    std::vector<double> mix;
    std::string out_dir;

    // extract / evaluate
    std::string input;
    std::string output;
    std::string members;
    ExtractionConfig extraction;

    // recommend
    std::string events_path;
    std::string recordings_path;
    Minutes cut = 0;
    std::size_t top_n = 10;
    std::string graph_out;

    // algorithms
    std::vector<std::string> algos{"user-knn"};
    std::string metric = "dice";
    std::size_t k = 300;
    std::size_t n_items = 300;
    bool second_level = false;
    std::size_t factors = 100;
    double lambda = 500.0;
    double alpha = 40.0;
    std::size_t steps = 15;
    std::uint64_t seed = 1;

    std::vector<Minutes> t_list;
    std::vector<std::size_t> n_list{1, 2, 3, 5, 10, 15, 20, 30};
};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? ";" : "") << values[i];
    return out.str();
}

std::string extraction_echo(const ExtractionConfig& c) {
    return "delta_b=" + std::to_string(c.delta_b) + " delta_f=" + std::to_string(c.delta_f) +
           " collapse_b=" + std::to_string(c.collapse_b) + " collapse_f=" + std::to_string(c.collapse_f) +
           " batch_length=" + std::to_string(c.batch_length);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("cannot open input file '" + path + "'");
    return in;
}

template <class Row>
std::vector<Row> require_ok(ParseResult<Row> parsed, const std::string& path) {
    if (!parsed.ok()) {
        std::string msg;
        for (const auto& e : parsed.errors) msg += path + ":" + std::to_string(e.line) + ": " + e.message + "\n";
        msg.pop_back();
        throw CliError(msg);
    }
    return std::move(parsed.rows);
}

std::vector<Recording> load_recordings(const std::string& path) {
    auto in = open_input(path);
    auto rows = require_ok(parse_recordings(in), path);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Recording& a, const Recording& b) { return a.created_at < b.created_at; });
    return rows;
}

std::vector<AlgorithmSpec> algorithm_specs(const Options& o) {
    auto metric = parse_metric(o.metric);
    if (!metric) throw CliError("unknown --metric '" + o.metric + "' (valid: jaccard, dice, cosine, matching)");
    std::vector<AlgorithmSpec> specs;
    for (const auto& name : o.algos) {
        auto algo = parse_algorithm(name);
        if (!algo) throw CliError("unknown --algo '" + name + "' (valid: " + algorithm_names() + ")");
        AlgorithmSpec s;
        s.algorithm = *algo;
        s.metric = *metric;
        s.k = o.k;
        s.n_items = o.n_items;
        s.second_level = o.second_level;
        s.als = {o.factors, o.lambda, o.alpha, o.steps, o.seed};
        s.seed = o.seed;
        s.validate();
        specs.push_back(s);
    }
    return specs;
}

std::string algorithm_echo(const Options& o) {
    return "algo=" + join(o.algos) + " metric=" + o.metric + " k=" + std::to_string(o.k) +
           " n_items=" + std::to_string(o.n_items) + " second_level=" + (o.second_level ? "1" : "0") +
           " f=" + std::to_string(o.factors) + " lambda=" + fmt_double(o.lambda) + " alpha=" + fmt_double(o.alpha) +
           " steps=" + std::to_string(o.steps) + " seed=" + std::to_string(o.seed);
}

void run_synth(Options& o) {
    WorldConfig w = o.world;
    if (o.cold_start) {
        const auto preset = WorldConfig::cold_start();
        w.periodicity_mix = preset.periodicity_mix;
        if (!o.lead_given) w.lead = preset.lead;
    }
    if (!o.mix.empty()) {
        if (o.mix.size() != 5) throw CliError("--mix takes five weights: no-repeat,weekly,daily,mon-fri,mon-sat");
        std::copy(o.mix.begin(), o.mix.end(), w.periodicity_mix.begin());
    }
    const World world = generate(w);

    std::string echo = "pvrec synth seed=" + std::to_string(w.seed) + " users=" + std::to_string(w.users) +
                       " programs=" + std::to_string(w.programs) + " channels=" + std::to_string(w.channels) +
                       " communities=" + std::to_string(w.communities) + " affinity=" + fmt_double(w.affinity) +
                       " noise=" + fmt_double(w.noise) + " jitter_sd=" + fmt_double(w.jitter_sd) +
                       " appeal_sd=" + fmt_double(w.appeal_sd) + " title_noise=" + fmt_double(w.title_noise) +
                       " span=" + std::to_string(w.span_start) + ":" + std::to_string(w.span_end) +
                       " lead=" + std::to_string(w.lead) + " mix=" +
                       join(std::vector<double>(w.periodicity_mix.begin(), w.periodicity_mix.end()));

    fs::create_directories(o.out_dir);
    csv::write_file_atomic(fs::path(o.out_dir) / "recordings.csv",
                           [&](std::ostream& out) { write_recordings(out, world.recordings, echo); });
    csv::write_file_atomic(fs::path(o.out_dir) / "truth.csv",
                           [&](std::ostream& out) { write_truth(out, world.truth, echo); });
    std::cerr << "synth: " << world.recordings.size() << " recordings of " << world.programs.size()
              << " programs written to " << o.out_dir << "\n";
}

void run_extract(Options& o) {
    const auto recordings = load_recordings(o.input);
    const auto events = run_pipeline(recordings, o.extraction);
    const std::string echo = "pvrec extract input=" + o.input + " " + extraction_echo(o.extraction);
    if (o.members.empty()) o.members = o.output + ".members.csv";
    csv::write_file_atomic(o.output, [&](std::ostream& out) { write_events(out, events, echo); });
    csv::write_file_atomic(o.members, [&](std::ostream& out) { write_membership(out, events, echo); });
    std::cerr << "extract: " << recordings.size() << " recordings -> " << events.size() << " events\n";
}

void run_recommend(Options& o) {
    const auto recordings = load_recordings(o.recordings_path);
    std::vector<Event> events;
    {
        auto in = open_input(o.events_path);
        events = require_ok(parse_events(in), o.events_path);
    }
    if (o.members.empty()) o.members = o.events_path + ".members.csv";
    {
        auto in = open_input(o.members);
        const auto membership = require_ok(parse_membership(in), o.members);
        try {
            apply_membership(events, membership, recordings);
        } catch (const std::runtime_error& e) {
            throw CliError(o.members + ": " + e.what());
        }
    }
    const auto specs = algorithm_specs(o);
    if (specs.size() != 1) throw CliError("recommend takes exactly one --algo");
    const auto split = make_split(recordings, events, o.cut);
    const auto view = make_training_view(split, recordings, events);
    const auto scored = score_users(specs[0], view.matrix, view.candidates, view.truth, o.threads);

    const std::string echo = "pvrec recommend events=" + o.events_path + " recordings=" + o.recordings_path +
                             " t=" + std::to_string(o.cut) + " n=" + std::to_string(o.top_n) + " " +
                             algorithm_echo(o);
    csv::write_file_atomic(o.output, [&](std::ostream& out) {
        out << "# " << echo << "\nuser,rank,event,weight\n";
        char buf[64];
        for (const auto& list : scored) {
            const auto top = recommend_topn(list, o.top_n);
            for (std::size_t r = 0; r < top.size(); ++r) {
                std::snprintf(buf, sizeof buf, "%.17g", list.entries[r].weight);
                csv::write_row(out, {view.matrix.users()[list.user].str(), std::to_string(r + 1),
                                     view.matrix.items()[top[r]], buf});
            }
        }
    });
    if (!o.graph_out.empty()) {
        const auto& spec = specs[0];
        if (spec.algorithm != Algorithm::UserKnn && spec.algorithm != Algorithm::ItemKnn) {
            throw CliError("--graph-out needs --algo user-knn or item-knn");
        }
        const bool users = spec.algorithm == Algorithm::UserKnn;
        const auto g = users ? build_user_graph(view.matrix, spec.metric, spec.k, o.threads)
                             : build_item_graph(view.matrix, spec.metric, kUnbounded, o.threads);
        std::vector<std::string> labels;
        if (users) {
            for (const auto& u : view.matrix.users()) labels.push_back(u.str());
        } else {
            labels = view.matrix.items();
        }
        const auto second = users && spec.second_level ? std::optional<std::size_t>(spec.k) : std::nullopt;
        csv::write_file_atomic(o.graph_out, [&](std::ostream& out) { write_graph(out, g, labels, second, echo); });
    }
    std::cerr << "recommend: lists for " << scored.size() << " users at t=" << o.cut << "\n";
}

std::vector<Minutes> default_cuts(const std::vector<Recording>& recordings) {
    const Minutes lo = recordings.front().created_at;
    const Minutes hi = recordings.back().created_at;
    std::vector<Minutes> cuts;
    for (int q = 1; q <= 4; ++q) cuts.push_back(lo + (hi - lo) * (q + 1) / 6);
    return cuts;
}

void run_evaluate(Options& o) {
    Dataset data;
    data.recordings = load_recordings(o.input);
    if (data.recordings.empty()) throw CliError(o.input + ": no recordings");
    data.events = run_pipeline(data.recordings, o.extraction);
    const auto specs = algorithm_specs(o);
    if (o.t_list.empty()) o.t_list = default_cuts(data.recordings);

    const auto report = evaluate(data, specs, o.t_list, o.n_list, o.threads);
    const std::string echo = "pvrec evaluate input=" + o.input + " " + extraction_echo(o.extraction) + " " +
                             algorithm_echo(o) + " t=" + join(o.t_list) + " n=" + join(o.n_list);

    fs::create_directories(o.out_dir);
    csv::write_file_atomic(fs::path(o.out_dir) / "report.csv",
                           [&](std::ostream& out) { write_report_csv(out, report, echo); });
    for (const auto& cut : report_cuts(report)) {
        const std::string name = cut ? "recall_t" + std::to_string(*cut) + ".svg" : "recall_overall.svg";
        csv::write_file_atomic(fs::path(o.out_dir) / name,
                               [&](std::ostream& out) { write_recall_svg(out, report, cut, echo); });
    }
    for (const auto& row : report.rows) {
        if (!row.t) {
            std::cerr << "overall " << row.config << " n=" << row.n << " precision=" << row.precision
                      << " recall=" << row.recall << "\n";
        }
    }
}

void add_algorithm_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--algo", o.algos, "mostpopular, user-knn, item-knn, als, random, oracle")->delimiter(',');
    cmd->add_option("--metric", o.metric, "jaccard, dice, cosine or matching")->capture_default_str();
    cmd->add_option("--k", o.k, "user-knn neighbors")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--n-items", o.n_items, "item-knn neighbors per candidate")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--second-level", o.second_level, "extend short user neighborhoods with second-level neighbors");
    cmd->add_option("--f", o.factors, "ALS factors")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", o.lambda, "ALS regularization")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--alpha", o.alpha, "ALS confidence slope")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--steps", o.steps, "ALS sweeps")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "seed for random and ALS")->capture_default_str();
}

void add_extraction_flags(CLI::App* cmd, Options& o) {
    auto& e = o.extraction;
    cmd->add_option("--delta-b", e.delta_b, "clustering start threshold (min)")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--delta-f", e.delta_f, "clustering end threshold (min)")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--collapse-b", e.collapse_b, "collapse start threshold (min)")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--collapse-f", e.collapse_f, "collapse end threshold (min)")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--batch-length", e.batch_length, "ingestion window (min)")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"pvrec - recommendations from personal video recorder logs"};
    app.require_subcommand(1);
    app.add_option("--threads", o.threads, "worker threads (0 = logical CPUs)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic recordings log and its ground truth");
    synth->add_option("-o,--out", o.out_dir, "output directory")->required();
    synth->add_option("--seed", o.world.seed)->capture_default_str();
    synth->add_option("--users", o.world.users)->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--programs", o.world.programs)->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--channels", o.world.channels)->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--communities", o.world.communities)->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--affinity", o.world.affinity)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    synth->add_option("--noise", o.world.noise)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    synth->add_option("--jitter-sd", o.world.jitter_sd)->capture_default_str()->check(CLI::NonNegativeNumber);
    synth->add_option("--appeal-sd", o.world.appeal_sd)->capture_default_str()->check(CLI::NonNegativeNumber);
    synth->add_option("--title-noise", o.world.title_noise)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    synth->add_option("--span-start", o.world.span_start)->capture_default_str();
    synth->add_option("--span-end", o.world.span_end)->capture_default_str();
    synth->add_option("--lead", o.world.lead, "max minutes a recording is set before a debut")->capture_default_str();
    synth->add_option("--mix", o.mix, "weights no-repeat,weekly,daily,mon-fri,mon-sat")->delimiter(',');
    synth->add_flag("--cold-start", o.cold_start, "mostly one-off programs announced shortly before airing");

    auto* extract = app.add_subcommand("extract", "turn recordings into events");
    extract->add_option("-i,--input", o.input, "recordings CSV")->required();
    extract->add_option("-o,--output", o.output, "events CSV")->required();
    extract->add_option("--members", o.members, "recording->event CSV (default: <output>.members.csv)");
    add_extraction_flags(extract, o);

    auto* recommend = app.add_subcommand("recommend", "top-n recommendations at a cut time");
    recommend->add_option("-e,--events", o.events_path, "events CSV")->required();
    recommend->add_option("-r,--recordings", o.recordings_path, "recordings CSV")->required();
    recommend->add_option("--members", o.members, "recording->event CSV (default: <events>.members.csv)");
    recommend->add_option("-t,--t", o.cut, "cut time (absolute minutes)")->required();
    recommend->add_option("-n,--n", o.top_n, "list length")->capture_default_str()->check(CLI::PositiveNumber);
    recommend->add_option("-o,--output", o.output, "recommendations CSV")->required();
    recommend->add_option("--graph-out", o.graph_out, "also dump the similarity graph");
    add_algorithm_flags(recommend, o);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "time-sliced precision/recall report");
    evaluate_cmd->add_option("-i,--input", o.input, "recordings CSV")->required();
    evaluate_cmd->add_option("-o,--out", o.out_dir, "output directory")->required();
    evaluate_cmd->add_option("--t", o.t_list, "cut times (default: 4 evenly spaced)")->delimiter(',');
    evaluate_cmd->add_option("--n", o.n_list, "list lengths")->delimiter(',')->capture_default_str();
    add_algorithm_flags(evaluate_cmd, o);
    add_extraction_flags(evaluate_cmd, o);

    CLI11_PARSE(app, argc, argv);
    o.lead_given = synth->count("--lead") > 0;

    try {
        if (synth->parsed()) run_synth(o);
        else if (extract->parsed()) run_extract(o);
        else if (recommend->parsed()) run_recommend(o);
        else if (evaluate_cmd->parsed()) run_evaluate(o);
    } catch (const std::exception& e) {
        std::cerr << "pvrec: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

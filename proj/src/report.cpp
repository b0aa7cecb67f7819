#include "pvrec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pvrec/csv.hpp"

namespace pvrec {
namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// "--" is not allowed inside an XML comment
std::string comment_safe(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '-' && !out.empty() && out.back() == '-') out += ' ';
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

double nice_ceiling(double v) {
    if (v <= 0.0) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double step : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (step * mag >= v) return step * mag;
    }
    return 10.0 * mag;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

void write_report_csv(std::ostream& out, const EvalReport& report, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
    out << kReportHeader << '\n';
    for (const auto& r : report.rows) {
        csv::write_row(out, {r.t ? std::to_string(*r.t) : "overall", r.algorithm, r.config, std::to_string(r.n),
                             fixed(r.precision, 6), fixed(r.recall, 6), std::to_string(r.users_counted)});
    }
}

std::vector<std::optional<Minutes>> report_cuts(const EvalReport& report) {
    std::vector<std::optional<Minutes>> cuts;
    for (const auto& r : report.rows) {
        if (r.t && std::find(cuts.begin(), cuts.end(), r.t) == cuts.end()) cuts.push_back(r.t);
    }
    cuts.push_back(std::nullopt);
    return cuts;
}

void write_recall_svg(std::ostream& out, const EvalReport& report, std::optional<Minutes> t,
                      const std::string& comment) {
    struct Series {
        std::string label;
        std::vector<std::pair<std::size_t, double>> points;
    };
    std::vector<Series> series;
    std::size_t max_n = 1;
    double max_recall = 0.0;
    for (const auto& r : report.rows) {
        if (r.t != t) continue;
        auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.label == r.config; });
        if (it == series.end()) {
            series.push_back({r.config, {}});
            it = series.end() - 1;
        }
        it->points.emplace_back(r.n, r.recall);
        max_n = std::max(max_n, r.n);
        max_recall = std::max(max_recall, r.recall);
    }
    for (auto& s : series) std::sort(s.points.begin(), s.points.end());

    constexpr double width = 720, height = 440;
    constexpr double left = 60, right = 240, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const double y_max = nice_ceiling(max_recall);
    const double x_min = 1.0;
    const double x_span = std::max(1.0, static_cast<double>(max_n) - x_min);
    auto px = [&](double n) { return left + (n - x_min) / x_span * plot_w; };
    auto py = [&](double r) { return top + plot_h - r / y_max * plot_h; };

    if (!comment.empty()) out << "<!-- " << comment_safe(comment) << " -->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const std::string title = t ? "Recall at cut t=" + std::to_string(*t) : std::string("Recall, mean over cut times");
    out << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << xml_escape(title) << "</text>\n";

    // axes and grid
    out << "<g stroke=\"#cccccc\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double y = py(y_max * i / 5.0);
        out << "<line x1=\"" << fixed(left, 2) << "\" y1=\"" << fixed(y, 2) << "\" x2=\"" << fixed(left + plot_w, 2)
            << "\" y2=\"" << fixed(y, 2) << "\"/>\n";
    }
    out << "</g>\n";
    out << "<g stroke=\"black\"><line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\"/><line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
        << "\" y2=\"" << top + plot_h << "\"/></g>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = y_max * i / 5.0;
        out << "<text x=\"" << fixed(left - 6, 2) << "\" y=\"" << fixed(py(v) + 4, 2) << "\" text-anchor=\"end\">"
            << fixed(v, 3) << "</text>\n";
    }
    std::vector<std::size_t> ticks;
    for (const auto& s : series) {
        for (const auto& p : s.points) ticks.push_back(p.first);
    }
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
    for (auto n : ticks) {
        out << "<text x=\"" << fixed(px(static_cast<double>(n)), 2) << "\" y=\"" << fixed(top + plot_h + 18, 2)
            << "\" text-anchor=\"middle\">" << n << "</text>\n";
    }
    out << "<text x=\"" << fixed(left + plot_w / 2, 2) << "\" y=\"" << fixed(height - 10, 2)
        << "\" text-anchor=\"middle\">n (recommended items)</text>\n";
    out << "<text transform=\"translate(16," << fixed(top + plot_h / 2, 2)
        << ") rotate(-90)\" text-anchor=\"middle\">recall</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < series[s].points.size(); ++i) {
            const auto& [n, r] = series[s].points[i];
            if (i) out << ' ';
            out << fixed(px(static_cast<double>(n)), 2) << ',' << fixed(py(r), 2);
        }
        out << "\"/>\n";
        for (const auto& [n, r] : series[s].points) {
            out << "<circle cx=\"" << fixed(px(static_cast<double>(n)), 2) << "\" cy=\"" << fixed(py(r), 2)
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = top + 10 + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << fixed(left + plot_w + 12, 2) << "\" y1=\"" << fixed(ly, 2) << "\" x2=\""
            << fixed(left + plot_w + 32, 2) << "\" y2=\"" << fixed(ly, 2) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fixed(left + plot_w + 36, 2) << "\" y=\"" << fixed(ly + 4, 2) << "\" font-size=\"10\">"
            << xml_escape(series[s].label) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace pvrec

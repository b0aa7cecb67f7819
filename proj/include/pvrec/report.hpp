#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pvrec/evaluation.hpp"

namespace pvrec {

inline constexpr std::string_view kReportHeader = "t,algorithm,config,n,precision,recall,users_counted";

/// One row per (t, algorithm, n); t is "overall" for the mean rows. Numbers
/// use fixed formatting so identical reports are byte-identical.
void write_report_csv(std::ostream& out, const EvalReport& report, const std::string& comment = {});

/// Distinct cut times in report order, followed by nullopt for "overall".
std::vector<std::optional<Minutes>> report_cuts(const EvalReport& report);

/// Standalone SVG line chart of recall against n, one line per algorithm
/// config, for the rows at cut time `t` (nullopt = overall rows).
void write_recall_svg(std::ostream& out, const EvalReport& report, std::optional<Minutes> t,
                      const std::string& comment = {});

}  // namespace pvrec

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pvrec::csv {

/// Reads one record, honouring double-quoted fields (which may contain
/// commas, quotes doubled as "" and newlines). `line` is advanced past every
/// physical line consumed and `first_line` receives the record's starting
/// line. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line,
                 std::size_t& first_line);

std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Writes through a sibling temp file and renames it over `path`, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& body);

}  // namespace pvrec::csv

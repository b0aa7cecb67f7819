#include "pvrec/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace pvrec::csv {

bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line,
                 std::size_t& first_line) {
    fields.clear();
    std::string physical;
    if (!std::getline(in, physical)) return false;
    ++line;
    first_line = line;

    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    for (;;) {
        if (i == physical.size()) {
            if (!quoted) break;
            // quoted field spans a newline
            std::string next;
            if (!std::getline(in, next)) throw std::runtime_error("unterminated quoted field");
            ++line;
            field += '\n';
            physical = std::move(next);
            i = 0;
            continue;
        }
        const char c = physical[i++];
        if (quoted) {
            if (c == '"') {
                if (i < physical.size() && physical[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' && i == physical.size()) {
            // tolerate CRLF
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return true;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos && !field.starts_with('#')) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& body) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        body(out);
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace pvrec::csv

#include "nldiff/csv.hpp"

#include <ostream>
#include <sstream>

#include "nldiff/errors.hpp"

namespace nldiff {
namespace {

void write_cell(std::ostream& os, const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) {
        os << cell;
        return;
    }
    os << '"';
    for (char c : cell) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

void write_row(std::ostream& os, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        write_cell(os, row[i]);
    }
    os << '\n';
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) fail(ErrorKind::InvalidParams, "CSV row width differs from header");
    rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
    write_row(os, header);
    for (const auto& r : rows) write_row(os, r);
}

std::string CsvTable::str() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

CsvTable CsvTable::parse(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string cell;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            record.push_back(std::move(cell));
            cell.clear();
            any = true;
        } else if (c == '\n') {
            record.push_back(std::move(cell));
            cell.clear();
            records.push_back(std::move(record));
            record.clear();
            any = false;
        } else {
            cell += c;
            any = true;
        }
    }
    if (quoted) fail(ErrorKind::ConfigError, "unterminated quoted CSV cell");
    if (any) {
        record.push_back(std::move(cell));
        records.push_back(std::move(record));
    }
    if (records.empty()) fail(ErrorKind::ConfigError, "CSV text has no header");
    CsvTable t;
    t.header = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != t.header.size()) {
            fail(ErrorKind::ConfigError, "CSV record " + std::to_string(i + 1) + " has the wrong width");
        }
        t.rows.push_back(std::move(records[i]));
    }
    return t;
}

}  // namespace nldiff

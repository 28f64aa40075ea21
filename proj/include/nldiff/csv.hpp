#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nldiff {

/// A header plus string cells, written with ',' separators and '\n' line
/// ends.  Cells containing a comma, quote or newline are quoted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string str() const;
    void write(std::ostream& os) const;

    /// Throws ConfigError on malformed input or ragged rows.
    static CsvTable parse(const std::string& text);
};

}  // namespace nldiff

#ifndef FECAP_CSV_HPP
#define FECAP_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace fecap::csv {

// Shortest round-trip decimal representation; keeps outputs byte-stable.
void write_value(std::ostream& os, double v);
std::string format_value(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Parses a numeric CSV with a header line.  Throws std::runtime_error with
// line information on malformed input.
Table read_table(std::istream& is);
Table read_table_file(const std::string& path);

} // namespace fecap::csv

#endif

#include "fecap/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fecap::csv {

std::string format_value(double v) {
    // shortest form that parses back exactly
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_value(std::ostream& os, double v) { os << format_value(v); }

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

Table read_table(std::istream& is) {
    Table tab;
    std::string line;
    int line_no = 0;
    if (!std::getline(is, line))
        throw std::runtime_error("csv: empty input");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tab.columns = split_line(line);

    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != tab.columns.size())
            throw std::runtime_error("csv: line " + std::to_string(line_no) +
                                     ": expected " +
                                     std::to_string(tab.columns.size()) +
                                     " fields, got " +
                                     std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            char* end = nullptr;
            const double x = std::strtod(f.c_str(), &end);
            if (end == f.c_str() || *end != '\0')
                throw std::runtime_error("csv: line " + std::to_string(line_no) +
                                         ": not a number: '" + f + "'");
            row.push_back(x);
        }
        tab.rows.push_back(std::move(row));
    }
    return tab;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    return read_table(in);
}

} // namespace fecap::csv

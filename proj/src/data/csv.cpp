#include "driftguard/data/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "driftguard/error.hpp"

namespace driftguard::data {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_value(const std::string& cell, std::size_t line) {
    const std::string t = trim(cell);
    if (t.empty()) throw ParseError(line, "empty value");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) {
        throw ParseError(line, "cannot parse value \"" + t + "\"");
    }
    if (!std::isfinite(v)) throw InputError("line " + std::to_string(line) + ": non-finite value");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

TimeSeries read_csv(std::istream& in, std::string label) {
    std::vector<double> values;
    std::vector<Timestamp> stamps;
    std::string raw;
    std::size_t line = 0;
    int columns = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string row = trim(raw);
        if (row.empty()) continue;
        if (columns == 0 && (row == "timestamp,value" || row == "value")) {
            columns = row == "value" ? 1 : 2;
            continue;
        }
        const auto comma = row.find(',');
        const int here = comma == std::string::npos ? 1 : 2;
        if (columns == 0) columns = here;
        if (here != columns || (comma != std::string::npos && row.find(',', comma + 1) != std::string::npos)) {
            throw ParseError(line, "expected " + std::to_string(columns) + " column(s)");
        }
        if (columns == 1) {
            values.push_back(parse_value(row, line));
        } else {
            try {
                stamps.push_back(parse_timestamp(trim(row.substr(0, comma))));
            } catch (const InputError& e) {
                throw ParseError(line, e.what());
            }
            values.push_back(parse_value(row.substr(comma + 1), line));
        }
    }
    return TimeSeries(std::move(values), std::move(stamps), std::move(label));
}

TimeSeries load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return read_csv(in, path.stem().string());
}

void write_csv(const TimeSeries& series, std::ostream& out) {
    out << (series.has_timestamps() ? "timestamp,value\n" : "value\n");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.has_timestamps()) out << format_timestamp(series.timestamps()[i]) << ',';
        out << format_double(series[i]) << '\n';
    }
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    write_csv(series, out);
}

}  // namespace driftguard::data

#pragma once

#include <filesystem>
#include <iosfwd>

#include "driftguard/data/time_series.hpp"

namespace driftguard::data {

// Accepted layout: optional header "timestamp,value" or "value", then one
// observation per line. LF or CRLF. Written files always carry the header,
// use LF and print values with 17 significant digits.

TimeSeries read_csv(std::istream& in, std::string label = {});
TimeSeries load_csv(const std::filesystem::path& path);

void write_csv(const TimeSeries& series, std::ostream& out);
void write_csv(const TimeSeries& series, const std::filesystem::path& path);

/// "%.17g" rendering shared by every CSV writer in the project.
std::string format_double(double v);

}  // namespace driftguard::data

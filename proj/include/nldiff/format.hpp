#pragma once

#include <string>

namespace nldiff {

/// Shortest decimal string that round-trips to the same double ('.' decimal,
/// no locale).  Non-finite values print as nan, inf, -inf.
std::string format_double(double v);

}  // namespace nldiff

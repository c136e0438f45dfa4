#pragma once

#include <string>
#include <string_view>

namespace qpp {

/// Classic Porter (1980) suffix stripper, following the reference C
/// implementation including its two published departures ("bli" -> "ble"
/// and "logi" -> "log"). Input is expected to be a lowercase ASCII word;
/// anything containing characters outside [a-z] is returned unchanged.
std::string porter_stem(std::string_view word);

} // namespace qpp

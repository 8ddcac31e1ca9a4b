#pragma once

#include <iosfwd>
#include <string>

#include "ucr/types.hpp"

namespace ucr {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the subset of the MATPOWER case format used here (baseMVA, bus,
// gen, branch, gencost). Quantities are converted to per-unit. Out-of-service
// rows and generators with nonpositive capacity are dropped.
PowerNetwork parse_matpower(std::istream& text);
PowerNetwork parse_matpower_file(const std::string& path);

// Canonical JSON instance files. Round-trips are bit-exact and serialization
// is byte-deterministic.
void write_instance(const UcInstance& inst, std::ostream& sink);
UcInstance read_instance(std::istream& source);
void write_instance_file(const UcInstance& inst, const std::string& path);
UcInstance read_instance_file(const std::string& path);

}  // namespace ucr

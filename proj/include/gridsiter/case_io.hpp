#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "gridsiter/grid.hpp"

namespace gridsiter {

/// Malformed case text. The message carries the line and field path.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads and validates a JSON case file.
GridCase load_case(const std::filesystem::path& path);

/// Parses case JSON text. Unknown keys are rejected.
GridCase parse_case(const std::string& text);

/// Canonical JSON text for a case (stable key order, round-trip doubles).
std::string case_to_json(const CaseData& data, int indent = 1);

void write_case(const GridCase& grid, const std::filesystem::path& path);

/// Converts a MATPOWER case (.m text) into case data. Static bus demand Pd
/// becomes a constant series of `hours` values per load bus.
CaseData convert_matpower(std::istream& in, int hours = 24);

}  // namespace gridsiter

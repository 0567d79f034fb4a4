#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ids/exact_info.hpp"

namespace ids {

/// Reads a finite model from the key-value text format described in
/// docs/model_file.md. Throws InputError with the line number on malformed
/// input.
FiniteModel parse_model(std::istream& in);
FiniteModel read_model_file(const std::filesystem::path& path);

/// Writes a model in the same format; values use 17 significant digits so
/// parse_model(write_model(m)) reproduces m exactly.
void write_model(const FiniteModel& model, std::ostream& out);
std::string model_to_string(const FiniteModel& model);

}  // namespace ids

#pragma once

// Touchstone v1.1 (.sNp, "# Hz S RI R <z0>") and CSV export of SParamGrid.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "sdlnet/extraction.hpp"

namespace sdlnet {

std::string touchstone_extension(std::size_t ports);

void write_touchstone(const SParamGrid& grid, std::ostream& os);
void write_touchstone(const SParamGrid& grid, const std::filesystem::path& path);

/// Reads a Touchstone v1.1 file with `ports` ports. Port labels and schedule
/// id are recovered from the writer's comment lines when present.
SParamGrid read_touchstone(std::istream& is, std::size_t ports);
/// Port count taken from the .sNp extension.
SParamGrid read_touchstone(const std::filesystem::path& path);

/// freq_hz, then S<to><from>_re, S<to><from>_im in row-major port order.
void write_csv(const SParamGrid& grid, std::ostream& os);
void write_csv(const SParamGrid& grid, const std::filesystem::path& path);

}  // namespace sdlnet

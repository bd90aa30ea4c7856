#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "klconst/types.hpp"

namespace klconst {

// Text formats. Numbers are written with 17 significant digits so a
// save/load cycle reproduces every double exactly.
//
// Codebook:       "K N", then N lines "re_0 im_0 ... re_{K-1} im_{K-1}".
// Constellation:  "K N_levels N_directions sigma2_design", then N_levels
//                 amplitude lines, then N_directions vector lines as above.
//
// Blank lines and lines starting with '#' are ignored. Vectors whose norm is
// within 1e-6 of one are accepted and renormalized; anything else is a
// LoadError carrying the offending line number.

void write_unitary(std::ostream& os, const UnitarySet& set);
UnitarySet read_unitary(std::istream& is, const std::string& source = "<stream>");

void save_unitary(const UnitarySet& set, const std::filesystem::path& path);
UnitarySet load_unitary(const std::filesystem::path& path);

void write_constellation(std::ostream& os, const MultiLevelConstellation& c);
MultiLevelConstellation read_constellation(std::istream& is, const std::string& source = "<stream>");

void save_constellation(const MultiLevelConstellation& c, const std::filesystem::path& path);
MultiLevelConstellation load_constellation(const std::filesystem::path& path);

// "%.17g"
std::string format_exact(double x);

} // namespace klconst

#pragma once

#include <string>

#include "egm/grid.hpp"

namespace egm {

/// CSV dump, header
///   tau,x,y,z,re_f,im_f,re_F1,im_F1,re_F2,im_F2,re_F3,im_F3
/// with tau-major row order and round-trip-exact number formatting.
void dump_field_csv(const std::string& path, const BiquatField& field);

/// Loads a CSV dump, reconstructing the uniform grid from the coordinate
/// columns. Throws ConfigError on irregular spacing or malformed rows.
BiquatField load_field_csv(const std::string& path);

} // namespace egm

#pragma once

#include <filesystem>

#include "eigenwave/field.hpp"

namespace eigenwave {

// EWF1 layout: one ASCII header line "EWF1 nx nz hx hz x0 z0\n" followed by
// nx*nz little-endian IEEE-754 doubles in node order.

void write_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field(const std::filesystem::path& path);

/// `x,z,value` rows, 17 significant digits.
void write_field_csv(const std::filesystem::path& path, const ScalarField& field);

/// 8-bit binary PGM quick look, linear min-max scaling, row iz = 0 at the top.
void write_field_pgm(const std::filesystem::path& path, const ScalarField& field);

} // namespace eigenwave

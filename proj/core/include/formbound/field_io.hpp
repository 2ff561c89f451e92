#pragma once

#include <string>

#include "formbound/field.hpp"

namespace formbound {

/// Flat binary field format FBND1: magic "FBND1", then d and n as
/// little-endian u64, L as little-endian f64, then n^d row-major f64 samples.
void write_fbnd(const ScalarField& f, const std::string& path);
ScalarField read_fbnd(const std::string& path,
                      std::size_t memory_budget = TorusGrid::default_memory_budget);

/// CSV export (index coordinates + value) for small grids.
void write_csv(const ScalarField& f, const std::string& path);

}  // namespace formbound

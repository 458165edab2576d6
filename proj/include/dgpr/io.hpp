#pragma once

#include <string>
#include <vector>

#include "dgpr/grid.hpp"
#include "dgpr/spectral.hpp"

namespace dgpr {

/// Binary trajectory dump, format "DGPR" version 1. All integers and
/// doubles are little-endian regardless of host order; frames are stored
/// flat in cell order (x fastest). Throws std::runtime_error when the file
/// cannot be opened and std::invalid_argument on inconsistent trajectories.
void write_trajectory(const std::string& path, const Trajectory& traj);

/// Reads a version-1 dump, validating magic, version, dimensions and
/// payload length. Throws std::runtime_error on anything malformed.
Trajectory read_trajectory(const std::string& path);

/// One row per cell: x[,y],u with full round-trip precision.
void write_field_csv(const std::string& path, const Field& f);

/// One row per dyadic block: K, norm, log2_norm, informative.
void write_spectrum_csv(const std::string& path, const DyadicSpectrum& spectrum);

/// Generic numeric table at full precision; header is written verbatim.
void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace dgpr

#pragma once

#include "nsstat/flow_parameters.hpp"
#include "nsstat/trajectory.hpp"

#include <string>

namespace nsstat {

/*
 * Trajectory container, little-endian:
 *   "SNTC" | u32 version | forcing snapshot record (time 0) | one snapshot record per sample |
 *   footer: u64 count | u32 flags (bit 0: ledger present) | f64 begin | f64 end |
 *           u64 provenance length | provenance bytes |
 *           per sample: u64 record offset | f64 time | f64 int ||u||^2 | f64 int (f, u) |
 *   u64 footer offset | "SNTI"
 */
struct StoredTrajectory {
  Trajectory trajectory;
  FlowParameters parameters;
};

std::string encode_trajectory(const Trajectory& traj, const FlowParameters& p);
StoredTrajectory decode_trajectory(const std::string& bytes);

void write_trajectory(const std::string& path, const Trajectory& traj, const FlowParameters& p);
StoredTrajectory read_trajectory(const std::string& path);

}  // namespace nsstat

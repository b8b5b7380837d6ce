#pragma once

#include <string>
#include <vector>

#include "roco/simulation.hpp"

namespace roco {

/// Formats with 17 significant digits so values survive a CSV round trip.
std::string format_double(double value);

/// Writes the per-step trajectories with header
///   t,x,u,u_base,u_oco,w_hat,d,p,q,v,cost,m_norm
/// expanding vector signals as x0,x1,... when their dimension exceeds one.
void write_trajectory_csv(const std::string& path, const SimulationResult& result);

/// Writes total cost, divergence flag and divergence step.
void write_summary(const std::string& path, const SimulationResult& result);

/// Writes the sweep table with header beta,avg_cost,diverged; diverged
/// rows carry the sentinel `diverged` instead of a cost.
void write_sweep_csv(const std::string& path, const std::vector<BetaSweepRow>& rows);

}  // namespace roco

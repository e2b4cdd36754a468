#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irslos/multiplexing.hpp"
#include "irslos/optimize.hpp"
#include "irslos/scenario.hpp"

namespace irslos {

// Inclusive linear range; count 0 is an empty range and count 1 holds `start` only.
struct Range {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    std::vector<double> values() const;
    void validate(const std::string& what) const;
};

// Comment lines: scenario hash and metadata, written above every CSV header.
void write_csv_preamble(std::ostream& os, const Scenario& s);

void cmd_rayleigh(const Scenario& s, std::ostream& os);

enum class ChannelKind { h, h_t, h_r, closed };
void cmd_channel(const Scenario& s, ChannelKind kind, std::ostream& os);

enum class SweepOrientation {
    fixed,         // scenario orientation at every distance
    single_hop_x,  // per-distance single-hop setting, psi = pi/2 beyond the Rayleigh distance
    single_hop_y,
    axis_x,        // psi = pi/2, gamma = gamma-bar at every distance
    axis_y,
};

// Rows `d_t,eig_1..eig_N`, eigenvalues of (1/QxQy) H_t^H H_t in descending order.
void cmd_eigensweep(const Scenario& s, const Range& d_t, SweepOrientation mode, std::ostream& os);

struct GramTolerances {
    double off = 1e-6;
    double diag = 1e-8;
};

// Columns d_t,d_r,in_region_x,in_region_y,gram_pass; gram_pass is -1 without `verify`.
void cmd_fmr_map(const Scenario& s, const Range& d_t, const Range& d_r, bool verify, const GramTolerances& tol,
                 std::ostream& os);

// Orientation settings of one region at (d_t, d_r), with the Gram check of the resulting channel.
void cmd_fmr_orient(const Scenario& s, double d_t, double d_r, Axis axis, const GramTolerances& tol,
                    std::ostream& os);

struct OptimizeRun {
    int run = 0;
    std::uint64_t seed = 0;
    std::string init;
    double mi_bits = 0.0;
    double upper_bound_bits = 0.0;
    double focusing_mi_bits = 0.0;
    std::string stop_reason;
    OptTrace trace;
    std::string overlay;
};

struct OptimizeReport {
    std::vector<OptimizeRun> runs;
    int best = 0;
};

// Run 0 starts from the scenario's own focusing and orientation, run k >= 1 from random_init(seed + k).
// With runs = 0 the declared configuration is only evaluated.
OptimizeReport run_optimize(const Scenario& s, int runs, std::uint64_t seed, const AlternatingStop& stop);
void write_optimize_summary(const Scenario& s, const OptimizeReport& r, std::ostream& os);
void write_trace_csv(const Scenario& s, const OptimizeRun& run, std::ostream& os);

// Scenario the overlay of a run describes; its MI is the reported one.
Scenario converged_scenario(const Scenario& s, const CVector& theta, const Orientation& m);

// Plot script for a CSV produced by `command`.
std::string gnuplot_hints(const std::string& command, const std::string& csv_path);

}  // namespace irslos

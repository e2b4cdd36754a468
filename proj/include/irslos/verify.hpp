#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irslos/commands.hpp"

namespace irslos {

struct CheckResult {
    std::string name;
    bool pass = false;
    double metric = 0.0;  // the quantity compared against the threshold
    std::string detail;
};

// Reference configurations. Distances default to 10 m where the figure sweeps them.
Scenario fig2_scenario();
Scenario fig5_scenario();
Scenario fig6_scenario(double omega_t, double omega_r);
// RE response geometry; both hops at distance d.
Scenario fig4_scenario(double frequency_hz, double d);
// N_t = N_r = 3, Q = 7, SNR set for a few bits of MI.
Scenario small_scenario();

// Odd N_t, N_r in [min_n, max_n] and odd Q_x, Q_y in [min_n, max_q]; noise chosen so rho eta0^2 (QxQy)^2 is in [0.1, 100].
Scenario random_scenario(std::uint64_t seed, int max_n = 7, int max_q = 15, int min_n = 1);

// Max over entries of |a - b| / max(|b|, floor).
double max_relative_error(const CMatrix& a, const CMatrix& b, double floor = 0.0);
// Floor for cascaded channels: 1e-3 of the coherent peak eta0 QxQy, so exact array-factor zeros
// are compared against that scale instead of against themselves.
double cascade_error_floor(const ChannelSet& c, const IrsLayout& irs);

CheckResult check_rayleigh_golden(double lambda_scale = 1.0);
CheckResult check_far_field_boundaries();
CheckResult check_closed_form(int n_random, std::uint64_t seed);
CheckResult check_fmr_soundness(int grid, const GramTolerances& tol);
CheckResult check_axis_aligned_rectangle();
CheckResult check_single_hop(int n_distances);
CheckResult check_gradient(int cases, std::uint64_t seed);
CheckResult check_optimizer(int seeds, std::uint64_t seed);
CheckResult check_relaxed_optimum(int grid);
CheckResult check_response_spread();

struct VerifyOptions {
    double lambda_scale = 1.0;
    bool filtered = false;             // run only `checks`
    std::vector<std::string> checks;   // names from golden_check_names()
    GramTolerances tol;
    std::uint64_t seed = 1;
};

std::vector<std::string> golden_check_names();
std::vector<CheckResult> run_golden_suite(const VerifyOptions& opt, std::ostream& warnings);
// Oracles that apply to any scenario: closed form, Gram energy, bound dominance, gradient.
std::vector<CheckResult> run_scenario_checks(const Scenario& s, const VerifyOptions& opt);

// CSV `check,pass,metric,detail`.
void write_verify_report(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace irslos

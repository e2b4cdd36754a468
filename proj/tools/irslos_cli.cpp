#include <omp.h>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "irslos/commands.hpp"
#include "irslos/scenario_io.hpp"
#include "irslos/verify.hpp"

using namespace irslos;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitVerify = 2;

struct Globals {
    std::string scenario;
    std::string out;
    std::uint64_t seed = 1;
    int threads = 0;
    double tol_off = 1e-6;
    double tol_diag = 1e-8;
    bool gnuplot = false;
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw std::runtime_error("cannot write " + path);
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

Scenario load(const Globals& g) {
    if (g.scenario.empty()) throw CLI::RequiredError("--scenario");
    return parse_scenario(g.scenario);
}

void hints(const Globals& g, const std::string& command) {
    if (g.gnuplot) std::cerr << gnuplot_hints(command, g.out.empty() ? "-" : g.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cascaded LoS MIMO channel and IRS optimisation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--scenario", g.scenario, "Scenario file");
    app.add_option("--out", g.out, "Output CSV path (stdout when omitted)");
    app.add_option("--seed", g.seed, "Base seed");
    app.add_option("--threads", g.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    app.add_option("--tol-off", g.tol_off, "Gram off-diagonal tolerance, relative to the target gain");
    app.add_option("--tol-diag", g.tol_diag, "Gram diagonal tolerance, relative");
    app.add_flag("--gnuplot-hints", g.gnuplot, "Print a gnuplot script for the output to stderr");

    auto* rayleigh = app.add_subcommand("rayleigh", "Rayleigh distances and far-field boundaries");

    auto* channel = app.add_subcommand("channel", "Dump a channel matrix as row,col,re,im");
    std::string kind = "h";
    channel->add_option("--kind", kind, "h | ht | hr | closed")
        ->check(CLI::IsMember({"h", "ht", "hr", "closed"}));

    auto* eig = app.add_subcommand("eigensweep", "Eigenvalues of (1/QxQy) H_t^H H_t against D_t");
    Range eig_range{1.0, 60.0, 60};
    std::string eig_mode = "fixed";
    eig->add_option("--from", eig_range.start, "First D_t (m)");
    eig->add_option("--to", eig_range.stop, "Last D_t (m)");
    eig->add_option("--count", eig_range.count, "Number of distances");
    eig->add_option("--orientation", eig_mode, "fixed | single-hop-x | single-hop-y | axis-x | axis-y")
        ->check(CLI::IsMember({"fixed", "single-hop-x", "single-hop-y", "axis-x", "axis-y"}));

    auto* fmap = app.add_subcommand("fmr-map", "Region membership over a (D_t, D_r) grid");
    Range map_t{0, 0, 20}, map_r{0, 0, 20};
    bool map_verify = false;
    fmap->add_option("--dt-from", map_t.start);
    fmap->add_option("--dt-to", map_t.stop);
    fmap->add_option("--dt-count", map_t.count);
    fmap->add_option("--dr-from", map_r.start);
    fmap->add_option("--dr-to", map_r.stop);
    fmap->add_option("--dr-count", map_r.count);
    fmap->add_flag("--verify", map_verify, "Build each in-region channel and run the Gram check");

    auto* forient = app.add_subcommand("fmr-orient", "Orientation settings at one (D_t, D_r) point");
    double o_dt = 0, o_dr = 0;
    std::string o_axis = "x";
    forient->add_option("--d-t", o_dt, "Tx-IRS distance (m)")->required();
    forient->add_option("--d-r", o_dr, "IRS-Rx distance (m)")->required();
    forient->add_option("--axis", o_axis, "x | y")->check(CLI::IsMember({"x", "y"}));

    auto* opt = app.add_subcommand("optimize", "Alternating MM / gradient MI maximisation");
    int runs = 5;
    AlternatingStop stop;
    opt->add_option("--runs", runs, "Number of runs; 0 evaluates the declared configuration")
        ->check(CLI::NonNegativeNumber);
    opt->add_option("--max-rounds", stop.max_rounds);
    opt->add_option("--eps", stop.eps, "Round improvement threshold (bits)");

    auto* verify = app.add_subcommand("verify", "Golden checks, or scenario oracles with --scenario");
    std::string checks;
    double lambda_scale = 1.0;
    auto* checks_opt = verify->add_option("--checks", checks, "Comma-separated check names");
    verify->add_option("--lambda-scale", lambda_scale, "Scale the wavelength of the golden Rayleigh check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (g.threads > 0) omp_set_num_threads(g.threads);
        Output out(g.out);
        std::ostream& os = out.stream();
        const GramTolerances tol{g.tol_off, g.tol_diag};

        if (*rayleigh) {
            cmd_rayleigh(load(g), os);
            hints(g, "rayleigh");
        } else if (*channel) {
            const ChannelKind k = kind == "ht" ? ChannelKind::h_t
                                  : kind == "hr" ? ChannelKind::h_r
                                  : kind == "closed" ? ChannelKind::closed
                                                     : ChannelKind::h;
            cmd_channel(load(g), k, os);
            hints(g, "channel");
        } else if (*eig) {
            const SweepOrientation m = eig_mode == "single-hop-x"   ? SweepOrientation::single_hop_x
                                       : eig_mode == "single-hop-y" ? SweepOrientation::single_hop_y
                                       : eig_mode == "axis-x"       ? SweepOrientation::axis_x
                                       : eig_mode == "axis-y"       ? SweepOrientation::axis_y
                                                                    : SweepOrientation::fixed;
            cmd_eigensweep(load(g), eig_range, m, os);
            hints(g, "eigensweep");
        } else if (*fmap) {
            const Scenario s = load(g);
            // Unset ranges span the Rayleigh rectangle with a 25% margin.
            if (map_t.stop <= 0 || map_r.stop <= 0) {
                const FmrBound b = fmr_inner_bound(s);
                const double tm = 1.25 * std::max(b.d_t_rayleigh_x, b.d_t_rayleigh_y);
                const double rm = 1.25 * std::max(b.d_r_rayleigh_x, b.d_r_rayleigh_y);
                if (map_t.stop <= 0) map_t = {tm / std::max(1, map_t.count), tm, map_t.count};
                if (map_r.stop <= 0) map_r = {rm / std::max(1, map_r.count), rm, map_r.count};
            }
            cmd_fmr_map(s, map_t, map_r, map_verify, tol, os);
            hints(g, "fmr-map");
        } else if (*forient) {
            cmd_fmr_orient(load(g), o_dt, o_dr, o_axis == "y" ? Axis::y : Axis::x, tol, os);
        } else if (*opt) {
            const Scenario s = load(g);
            const OptimizeReport r = run_optimize(s, runs, g.seed, stop);
            write_optimize_summary(s, r, os);
            if (!g.out.empty()) {
                for (const OptimizeRun& run : r.runs) {
                    std::ofstream t(g.out + ".run" + std::to_string(run.run) + ".trace.csv");
                    write_trace_csv(s, run, t);
                }
                std::ofstream ov(g.out + ".overlay.scn");
                ov << "# converged configuration of run " << r.runs[r.best].run << "\n" << r.runs[r.best].overlay;
            }
            hints(g, "optimize");
        } else if (*verify) {
            VerifyOptions vo;
            vo.lambda_scale = lambda_scale;
            vo.tol = tol;
            vo.seed = g.seed;
            if (checks_opt->count() > 0) {
                vo.filtered = true;
                std::stringstream ss(checks);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) vo.checks.push_back(item);
            }
            std::vector<CheckResult> res;
            if (!g.scenario.empty()) {
                const Scenario s = load(g);
                os << "# scenario_hash=" << scenario_hash(s) << "\n";
                res = run_scenario_checks(s, vo);
            } else {
                os << "# suite=golden\n";
                res = run_golden_suite(vo, std::cerr);
            }
            write_verify_report(res, os);
            for (const CheckResult& c : res)
                if (!c.pass) return kExitVerify;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}

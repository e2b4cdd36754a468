#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "irslos/multiplexing.hpp"
#include "irslos/optimize.hpp"
#include "irslos/verify.hpp"

using namespace irslos;

namespace {

CMatrix random_matrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> n;
    CMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cd(n(rng), n(rng));
    return m;
}

CVector random_phases(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0, kTwoPi);
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = std::polar(1.0, u(rng));
    return v;
}

bool non_decreasing(const OptTrace& t, double slack = 1e-9) {
    double prev = t.initial_mi_bits;
    for (const TraceEntry& e : t.entries) {
        if (e.mi_bits < prev - slack) return false;
        prev = e.mi_bits;
    }
    return true;
}

double smallest_eigenvalue(const CMatrix& a) {
    return Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

// Single antennas: the channel is orientation independent.
Scenario siso() {
    Scenario s;
    s.wave.wavelength = 0.005;
    s.tx = ArrayPose::make(1, 0.1, 8.0, 0.5, 0.4, 0.2, 1.0);
    s.rx = ArrayPose::make(1, 0.1, 6.0, 2.5, 0.7, 0.1, 2.0);
    s.irs = IrsLayout::make(5, 5, 0.05, 0.05, 0.05, 0.05);
    const double e0 = scenario_eta0(s);
    s.power.noise_power = e0 * e0 * 625.0 / 10.0;
    return s;
}

// Fig. 5 geometry inside region x with FMR orientations, at high SNR.
Scenario in_fmr_high_snr() {
    const Scenario base = fig5_scenario();
    const FmrBound b = fmr_inner_bound(base);
    const double dt = 0.6 * b.d_t_rayleigh_x, dr = 0.6 * b.d_r_rayleigh_x;
    Scenario s = apply_orientation(base, fmr_orientations(b, dt, dr, Axis::x), dt, dr);
    const double e0 = scenario_eta0(s);
    s.power.noise_power = e0 * e0 * std::pow(s.irs.count(), 2) / 1e6;
    return s;
}

}  // namespace

TEST_CASE("mutual information basics") {
    const PowerConfig p{2.0, 0.5};
    CHECK(mutual_information(CMatrix::Zero(3, 3), p) == 0.0);
    CMatrix d = CMatrix::Zero(3, 3);
    d(0, 0) = std::polar(0.7, 0.3), d(1, 1) = std::polar(0.7, 2.0), d(2, 2) = std::polar(0.7, -1.0);
    CHECK(mutual_information(d, p) == doctest::Approx(3 * std::log2(1 + 4.0 * 0.49)).epsilon(1e-14));
}

TEST_CASE("determinant and singular-value forms of MI agree") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 50; ++i) {
        const int r = 1 + i % 5, c = 1 + (i / 5) % 5;
        const CMatrix h = random_matrix(rng, r, c);
        const PowerConfig p{1.0, std::pow(10.0, (i % 7) - 3.0)};
        CHECK(mutual_information(h, p) == doctest::Approx(mutual_information_det(h, p)).epsilon(1e-10));
    }
}

TEST_CASE("MI never exceeds the singular-value bound") {
    std::mt19937_64 rng(12);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const Scenario s = random_scenario(seed, 5, 9);
        const CMatrix ht = tx_irs_channel(s), hr = irs_rx_channel(s);
        const double e0 = scenario_eta0(s);
        const CVector theta = seed % 2 ? theta_of(reflective_focusing(s)) : random_phases(rng, s.irs.count());
        CHECK(mutual_information(cascade(ht, theta, hr, e0), s.power) <= mi_upper_bound(ht, hr, e0, s.power) + 1e-9);
    }
}

TEST_CASE("single-stream bound is attained by focusing") {
    const Scenario s = siso();
    const ChannelSet c = assemble(s, reflective_focusing(s));
    const double bound = mi_upper_bound(c.h_t, c.h_r, c.eta0, s.power);
    const double mu2 = s.irs.count();
    CHECK(bound == doctest::Approx(std::log2(1 + s.power.snr() * c.eta0 * c.eta0 * mu2 * mu2)).epsilon(1e-12));
    CHECK(mutual_information(c.h, s.power) == doctest::Approx(bound).epsilon(1e-9));
}

TEST_CASE("relaxed optimum allocations") {
    const SingularAllocation hi = relaxed_optimum(SnrRegime::high, 2, 2, 3, 3);
    CHECK(hi.mu_t_sq == std::vector<double>{9, 9});
    CHECK(hi.mu_r_sq == std::vector<double>{9, 9});
    const SingularAllocation lo = relaxed_optimum(SnrRegime::low, 2, 2, 3, 3);
    CHECK(lo.mu_t_sq == std::vector<double>{18, 0});
    CHECK(lo.mu_r_sq == std::vector<double>{18, 0});
    const SingularAllocation h4 = relaxed_optimum(SnrRegime::high, 4, 2, 3, 5);
    REQUIRE(h4.mu_t_sq.size() == 4);
    CHECK(h4.mu_t_sq[0] == doctest::Approx(30.0));
    CHECK(h4.mu_t_sq[2] == 0.0);
    double sum = 0.0;
    for (double v : h4.mu_t_sq) sum += v;
    CHECK(sum == doctest::Approx(4 * 15.0));
    CHECK_THROWS_AS(relaxed_optimum(SnrRegime::high, 2, 3, 3, 3), std::invalid_argument);
}

TEST_CASE("relaxed optimum beats the exhaustive grid at both SNR extremes") {
    const CheckResult r = check_relaxed_optimum(49);
    CHECK(r.pass);
}

TEST_CASE("MM auxiliaries are Hermitian PSD") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scenario s = random_scenario(seed, 5, 7);
        std::mt19937_64 rng(seed);
        const CMatrix ht = tx_irs_channel(s), hr = irs_rx_channel(s);
        const MmAuxiliaries a = mm_auxiliaries(ht, hr, random_phases(rng, s.irs.count()), scenario_eta0(s), s.power);
        CHECK(a.phi.rows() == s.tx.n_antennas);
        CHECK(a.phi.cols() == s.rx.n_antennas);
        CHECK((a.sigma - a.sigma.adjoint()).norm() <= 1e-12 * a.sigma.norm());
        CHECK((a.lambda - a.lambda.adjoint()).norm() <= 1e-12 * a.lambda.norm());
        CHECK(smallest_eigenvalue(a.sigma) >= -1e-10 * a.sigma.norm());
        CHECK(smallest_eigenvalue(a.lambda) >= -1e-10 * a.lambda.norm());
        CHECK(a.alpha.size() == s.irs.count());
    }
}

TEST_CASE("MM auxiliaries in the noise-dominated limit") {
    Scenario s = random_scenario(3, 5, 7);
    s.power.noise_power = 1e30;
    const MmAuxiliaries a = mm_auxiliaries(tx_irs_channel(s), irs_rx_channel(s),
                                           theta_of(reflective_focusing(s)), scenario_eta0(s), s.power);
    const double P = s.power.per_antenna_power;
    CHECK(a.phi.norm() < 1e-20);
    CHECK((a.sigma - P * CMatrix::Identity(s.tx.n_antennas, s.tx.n_antennas)).norm() < 1e-20);
    CHECK(a.lambda.norm() < 1e-20);
    CHECK(a.alpha.norm() < 1e-20);
}

TEST_CASE("MM step on a pure linear term") {
    std::mt19937_64 rng(2);
    const int n = 6;
    const CVector v = random_matrix(rng, n, 1);
    const CVector th = random_phases(rng, n);
    const CVector out = mm_step(CMatrix::Zero(n, n), -v, th, 0.0);
    for (int i = 0; i < n; ++i) CHECK(std::abs(out(i) - v(i) / std::abs(v(i))) < 1e-15);
    // Already optimal: a fixed point.
    const CVector again = mm_step(CMatrix::Zero(n, n), -v, out, 0.0);
    CHECK((again - out).norm() < 1e-15);
}

TEST_CASE("MM step keeps theta where q vanishes") {
    const CVector th = CVector::Constant(2, std::polar(1.0, 0.4));
    const CVector out = mm_step(CMatrix::Zero(2, 2), CVector::Zero(2), th, 0.0);
    CHECK((out - th).norm() == 0.0);
}

TEST_CASE("MM step never increases the QCQP objective") {
    std::mt19937_64 rng(1000);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const int n = 2 + i % 9;
        const CMatrix g = random_matrix(rng, n, n);
        const CMatrix lam = g * g.adjoint();
        const CVector alpha = random_matrix(rng, n, 1);
        const CVector th = random_phases(rng, n);
        const CVector next = mm_step(lam, alpha, th, largest_eigenvalue(lam));
        CHECK(unit_modulus(next, 1e-12));
        const double before = qcqp_objective(lam, alpha, th), after = qcqp_objective(lam, alpha, next);
        if (after > before + 1e-10 * std::abs(before)) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("largest eigenvalue by power iteration is a tight upper bound") {
    std::mt19937_64 rng(8);
    const CMatrix g = random_matrix(rng, 80, 80);
    const CMatrix a = g * g.adjoint();
    const double ref = Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues()(79);
    const double got = largest_eigenvalue(a);
    CHECK(got >= ref * (1 - 1e-12));
    CHECK(got <= ref * (1 + 1e-4));
}

TEST_CASE("theta optimisation for one stream reaches coherent combining") {
    const Scenario s = siso();
    std::mt19937_64 rng(5);
    const ThetaResult r = optimize_theta(s, random_phases(rng, s.irs.count()));
    const CMatrix h = cascade(tx_irs_channel(s), r.theta, irs_rx_channel(s), scenario_eta0(s));
    CHECK(std::abs(h(0, 0)) == doctest::Approx(scenario_eta0(s) * s.irs.count()).epsilon(1e-3));
    CHECK(non_decreasing(r.trace));
}

TEST_CASE("theta optimisation traces are non-decreasing") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const Scenario s = random_scenario(seed, 5, 7);
        const RandomInit ri = random_init(s, seed);
        const ThetaResult r = optimize_theta(s, ri.theta);
        CHECK(non_decreasing(r.trace));
        CHECK(mutual_information(cascade(tx_irs_channel(s), r.theta, irs_rx_channel(s), scenario_eta0(s)),
                                 s.power) >= r.trace.initial_mi_bits - 1e-9);
    }
}

TEST_CASE("focusing inside the region is already optimal for theta") {
    const Scenario s = in_fmr_high_snr();
    const ChannelSet c = assemble(s, reflective_focusing(s));
    const double start = mutual_information(c.h, s.power);
    CHECK(start == doctest::Approx(mi_upper_bound(c.h_t, c.h_r, c.eta0, s.power)).epsilon(1e-9));
    const ThetaResult r = optimize_theta(s, c.theta);
    const double end = mutual_information(cascade(c.h_t, r.theta, c.h_r, c.eta0), s.power);
    CHECK(std::abs(end - start) < 1e-6);
}

TEST_CASE("orientation box mapping") {
    const Orientation m{3 * kPi / 4, 0.4, -2.0, 2.9};
    const Orientation b = to_box(m);
    CHECK(b[0] == doctest::Approx(-kPi / 4));
    CHECK(b[1] == doctest::Approx(kPi - 0.4));
    CHECK(b[2] == doctest::Approx(-2.0 + kPi));
    CHECK(b[3] == doctest::Approx(kPi - 2.9));
    // Same physical arrays, so the same MI.
    const Scenario s = random_scenario(9, 5, 7);
    const CVector th = theta_of(reflective_focusing(s));
    CHECK(mi_at(s, th, m) == doctest::Approx(mi_at(s, th, b)).epsilon(1e-9));
    const Orientation p = project_box({2.0, -0.1, -2.0, 3.5});
    CHECK(p == Orientation{kPi / 2, 0.0, -kPi / 2, kPi});
}

TEST_CASE("analytic gradient matches central differences") {
    const CheckResult r = check_gradient(20, 1);
    CHECK(r.pass);
    CHECK(r.metric < 1e-5);
}

TEST_CASE("gradient in psi vanishes at pi/2") {
    // Flipping psi about pi/2 only multiplies each antenna column by a phase.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Scenario s = random_scenario(seed, 5, 7, 3);
        const RandomInit ri = random_init(s, seed);
        Orientation m = ri.m;
        m[1] = kPi / 2;
        m[3] = kPi / 2;
        const Orientation g = mi_gradient(s, ri.theta, m);
        const double scale = std::max({std::abs(g[0]), std::abs(g[2]), 1e-3});
        CHECK(std::abs(g[1]) < 1e-8 * scale);
        CHECK(std::abs(g[3]) < 1e-8 * scale);
    }
}

TEST_CASE("orientation-independent channel has zero gradient") {
    const Scenario s = siso();
    const CVector th = theta_of(reflective_focusing(s));
    const Orientation m = orientation_of(s);
    for (double v : mi_gradient(s, th, m)) CHECK(std::abs(v) < 1e-14);
    for (double v : finite_difference_gradient(s, th, m, 1e-6)) CHECK(v == 0.0);
}

TEST_CASE("finite differences converge at second order") {
    const Scenario s = random_scenario(31, 5, 7, 3);
    const RandomInit ri = random_init(s, 31);
    const Orientation g = mi_gradient(s, ri.theta, ri.m);
    auto err = [&](double h) {
        const Orientation fd = finite_difference_gradient(s, ri.theta, ri.m, h);
        double e = 0.0;
        for (int k = 0; k < 4; ++k) e = std::max(e, std::abs(fd[k] - g[k]));
        return e;
    };
    const double ratio = err(2e-2) / err(1e-2);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("finite differences respect Tx/Rx swap symmetry") {
    Scenario s = random_scenario(14, 5, 7, 3);
    s.rx = s.tx;  // H_r = H_t^T at swapped orientations
    const CVector th = theta_of(reflective_focusing(s));
    const Orientation m{0.3, 1.1, -0.7, 2.0}, w{-0.7, 2.0, 0.3, 1.1};
    CHECK(mi_at(s, th, m) == doctest::Approx(mi_at(s, th, w)).epsilon(1e-12));
    const Orientation a = finite_difference_gradient(s, th, m, 1e-5), b = finite_difference_gradient(s, th, w, 1e-5);
    CHECK(a[0] == doctest::Approx(b[2]).epsilon(1e-6));
    CHECK(a[1] == doctest::Approx(b[3]).epsilon(1e-6));
    CHECK(a[2] == doctest::Approx(b[0]).epsilon(1e-6));
    CHECK(a[3] == doctest::Approx(b[1]).epsilon(1e-6));
}

TEST_CASE("orientation descent is monotone") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Scenario s = random_scenario(seed, 5, 7, 3);
        const RandomInit ri = random_init(s, seed + 50);
        const OrientationResult r = optimize_orientation(s, ri.theta, ri.m);
        CHECK(non_decreasing(r.trace, 0.0));
        CHECK(mi_at(s, ri.theta, r.m) >= mi_at(s, ri.theta, ri.m) - 1e-12);
    }
}

TEST_CASE("orientation descent stops at a stationary point") {
    const Scenario s = siso();
    const CVector th = theta_of(reflective_focusing(s));
    const Orientation m = to_box(orientation_of(s));
    const OrientationResult r = optimize_orientation(s, th, m);
    CHECK(r.m == m);
    CHECK(r.trace.entries.size() == 1);
    CHECK(r.trace.stop_reason == "stationary");
}

TEST_CASE("orientation descent from FMR orientations stays near the bound") {
    const Scenario s = in_fmr_high_snr();
    const ChannelSet c = assemble(s, reflective_focusing(s));
    const double bound = mi_upper_bound(c.h_t, c.h_r, c.eta0, s.power);
    const OrientationResult r = optimize_orientation(s, c.theta, orientation_of(s));
    const double mi = mi_at(s, c.theta, r.m);
    CHECK(mi >= bound - 1e-4);
    CHECK(mi <= bound + 1e-9);
}

TEST_CASE("alternating optimisation") {
    const Scenario s = small_scenario();
    const RandomInit ri = random_init(s, 3);

    AlternatingStop none;
    none.max_rounds = 0;
    const AlternatingResult z = alternating_optimize(s, ri.theta, ri.m, none);
    CHECK(z.theta == ri.theta);
    CHECK(z.m == ri.m);
    CHECK(z.trace.entries.empty());

    const Scenario start = with_orientation(s, ri.m);
    const CVector focus = theta_of(reflective_focusing(start));
    const AlternatingResult r = alternating_optimize(s, focus, ri.m);
    CHECK(non_decreasing(r.trace));
    CHECK(r.mi_bits >= mi_at(s, focus, ri.m) - 1e-9);
    const Scenario end = with_orientation(s, r.m);
    CHECK(r.mi_bits <= mi_upper_bound(tx_irs_channel(end), irs_rx_channel(end), scenario_eta0(end), s.power) + 1e-9);
}

TEST_CASE("random initialisation is seeded and inside the box") {
    const Scenario s = small_scenario();
    const RandomInit a = random_init(s, 77), b = random_init(s, 77), c = random_init(s, 78);
    CHECK(a.theta == b.theta);
    CHECK(a.m == b.m);
    CHECK(a.m != c.m);
    CHECK(unit_modulus(a.theta, 1e-15));
    CHECK(project_box(a.m) == a.m);
}

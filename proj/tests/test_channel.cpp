#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "irslos/channel.hpp"
#include "irslos/multiplexing.hpp"
#include "irslos/verify.hpp"

using namespace irslos;

namespace {

using ld = long double;

constexpr double kEps = 2.220446049250313e-16;

// Second-order link distance rebuilt in long double from the frame definition.
ld approx_distance_ld(const ArrayPose& a, const IrsLayout& irs, int p, int k, int l) {
    const ld sp = std::sin((ld)a.elevation), cp = std::cos((ld)a.elevation);
    const ld sw = std::sin((ld)a.azimuth), cw = std::cos((ld)a.azimuth);
    const ld nz[3] = {sp * cw, sp * sw, cp};
    const ld ny[3] = {cp * cw, cp * sw, -sp};
    const ld nx[3] = {ny[1] * nz[2] - ny[2] * nz[1], ny[2] * nz[0] - ny[0] * nz[2], ny[0] * nz[1] - ny[1] * nz[0]};
    const ld m[2] = {(ld)k * irs.spacing_x, (ld)l * irs.spacing_y};
    const ld r = (ld)p * a.spacing;
    const ld sg = std::sin((ld)a.orient_elevation);
    const ld u1 = r * sg * std::cos((ld)a.orient_azimuth) - (m[0] * nx[0] + m[1] * nx[1]);
    const ld u2 = r * sg * std::sin((ld)a.orient_azimuth) - (m[0] * ny[0] + m[1] * ny[1]);
    const ld axial = r * std::cos((ld)a.orient_elevation) - (m[0] * nz[0] + m[1] * nz[1]);
    const ld d = a.distance;
    return d + axial + (u1 * u1 + u2 * u2) / (2 * d);
}

cd oracle_entry(const ArrayPose& a, const IrsLayout& irs, ld lam, int p, int k, int l) {
    const ld two_pi = 6.283185307179586476925286766559L;
    const ld ph = std::fmod(two_pi * approx_distance_ld(a, irs, p, k, l) / lam, two_pi);
    return {static_cast<double>(std::cos(ph)), static_cast<double>(-std::sin(ph))};
}

// Max entry error against the oracle, for H_t (rows = REs) or H_r (columns = REs).
double oracle_error(const CMatrix& h, const ArrayPose& a, const IrsLayout& irs, double lam, bool rx_side) {
    double worst = 0.0;
    for (int k = -half_span(irs.q_x); k <= half_span(irs.q_x); ++k)
        for (int l = -half_span(irs.q_y); l <= half_span(irs.q_y); ++l)
            for (int p = -half_span(a.n_antennas); p <= half_span(a.n_antennas); ++p) {
                const int row = re_row(irs, k, l), col = p + half_span(a.n_antennas);
                const cd v = rx_side ? h(col, row) : h(row, col);
                worst = std::max(worst, std::abs(v - oracle_entry(a, irs, lam, p, k, l)));
            }
    return worst;
}

Scenario single_link() {
    Scenario s;
    s.wave.wavelength = 0.005;
    s.tx = ArrayPose::make(1, 0.1, 7.3, 0.4, 0.6, 0.0, kPi / 2);
    s.rx = ArrayPose::make(1, 0.1, 11.9, 2.4, 0.3, 0.0, kPi / 2);
    s.irs = IrsLayout::make(1, 1, 0.1, 0.1, 0.1, 0.1);
    return s;
}

}  // namespace

TEST_CASE("channel entries have unit modulus and exact Frobenius energy") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scenario s = random_scenario(seed);
        const CMatrix ht = tx_irs_channel(s), hr = irs_rx_channel(s);
        CHECK(ht.rows() == s.irs.count());
        CHECK(ht.cols() == s.tx.n_antennas);
        CHECK(hr.rows() == s.rx.n_antennas);
        CHECK(hr.cols() == s.irs.count());
        CHECK(unit_modulus(ht, 1e-12));
        CHECK(unit_modulus(hr, 1e-12));
        CHECK(ht.squaredNorm() == doctest::Approx(s.tx.n_antennas * s.irs.count()).epsilon(1e-12));
        CHECK(hr.squaredNorm() == doctest::Approx(s.rx.n_antennas * s.irs.count()).epsilon(1e-12));
    }
}

TEST_CASE("single RE and antenna gives the centre phase") {
    const Scenario s = single_link();
    const CMatrix ht = tx_irs_channel(s), hr = irs_rx_channel(s);
    CHECK(std::abs(ht(0, 0) - std::polar(1.0, -kTwoPi * 7.3 / 0.005)) < 1e-12);
    CHECK(std::abs(hr(0, 0) - std::polar(1.0, -kTwoPi * 11.9 / 0.005)) < 1e-12);
}

TEST_CASE("channel builders match the long-double oracle on the Fig. 2 geometry") {
    const Scenario s = fig2_scenario();
    // Four ulps of the carrier phase 2 pi D / lambda bound the double-precision entries.
    auto tol = [](const ArrayPose& a, double lam) { return 4 * kEps * kTwoPi * a.distance / lam; };
    CHECK(tol(s.tx, s.wave.wavelength) < 1.2e-11);
    CHECK(oracle_error(tx_irs_channel(s), s.tx, s.irs, s.wave.wavelength, false) < tol(s.tx, s.wave.wavelength));
    CHECK(oracle_error(irs_rx_channel(s), s.rx, s.irs, s.wave.wavelength, true) < tol(s.rx, s.wave.wavelength));
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        const Scenario r = random_scenario(seed);
        CHECK(oracle_error(tx_irs_channel(r), r.tx, r.irs, r.wave.wavelength, false) < tol(r.tx, r.wave.wavelength));
        CHECK(oracle_error(irs_rx_channel(r), r.rx, r.irs, r.wave.wavelength, true) < tol(r.rx, r.wave.wavelength));
    }
}

TEST_CASE("parallel and serial builders agree exactly") {
    const Scenario s = random_scenario(3);
    CHECK(tx_irs_channel(s) == serial::tx_irs_channel(s.tx, s.irs, s.wave));
    CHECK(irs_rx_channel(s) == serial::irs_rx_channel(s.rx, s.irs, s.wave));
}

TEST_CASE("reflective focusing combines the centre link coherently") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Scenario s = random_scenario(seed);
        const ChannelSet c = assemble(s, reflective_focusing(s));
        const int q0 = half_span(s.rx.n_antennas), p0 = half_span(s.tx.n_antennas);
        const double peak = c.eta0 * s.irs.count();
        CHECK(std::abs(c.h(q0, p0)) == doctest::Approx(peak).epsilon(1e-9));
        // Triple sum evaluated directly.
        cd sum = 0.0;
        for (int r = 0; r < s.irs.count(); ++r) sum += c.h_t(r, p0) * c.theta(r) * c.h_r(q0, r);
        CHECK(std::abs(c.eta0 * sum - c.h(q0, p0)) < 1e-12 * peak);
    }
}

TEST_CASE("focusing of a single RE is the summed centre distance") {
    const Scenario s = single_link();
    const FocusingState f = reflective_focusing(s);
    REQUIRE(f.betas.size() == 1);
    CHECK(std::remainder(f.betas(0) - kTwoPi * (7.3 + 11.9) / 0.005, kTwoPi) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("focusing on a generic link makes that entry coherent") {
    const Scenario s = random_scenario(42, 7, 9, 3);
    const int nt = s.tx.n_antennas, nr = s.rx.n_antennas;
    for (int p = -half_span(nt); p <= half_span(nt); ++p)
        for (int q = -half_span(nr); q <= half_span(nr); ++q) {
            const ChannelSet c = assemble(s, focusing_for(s, p, q));
            CHECK(std::abs(c.h(q + half_span(nr), p + half_span(nt))) ==
                  doctest::Approx(c.eta0 * s.irs.count()).epsilon(1e-9));
        }
}

TEST_CASE("zero focusing on one RE multiplies both hops") {
    const Scenario s = single_link();
    const ChannelSet c = assemble(s, zero_focusing(s));
    const cd expect = c.eta0 * std::polar(1.0, -kTwoPi * (7.3 + 11.9) / 0.005);
    CHECK(std::abs(c.h(0, 0) - expect) < 1e-12 * c.eta0);
}

TEST_CASE("cascade Frobenius norm is bounded by the coherent gain") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Scenario s = random_scenario(seed);
        const ChannelSet c = assemble(s, reflective_focusing(s));
        const double bound = c.eta0 * s.irs.count() * std::sqrt(double(s.tx.n_antennas * s.rx.n_antennas));
        CHECK(c.h.norm() <= bound * (1 + 1e-12));
        const CMatrix direct = c.eta0 * c.h_r * c.theta.asDiagonal() * c.h_t;
        CHECK((direct - c.h).norm() <= 1e-10 * c.h.norm());
    }
    // One antenna on each side and one RE: the bound is attained.
    const Scenario s = single_link();
    const ChannelSet c = assemble(s, zero_focusing(s));
    CHECK(c.h.norm() == doctest::Approx(c.eta0));
}

TEST_CASE("cascade rejects mismatched dimensions") {
    const CMatrix ht = CMatrix::Ones(9, 3), hr = CMatrix::Ones(3, 7);
    CHECK_THROWS_AS(cascade(ht, CVector::Ones(9), hr, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(cascade(ht, CVector::Ones(7), CMatrix::Ones(3, 9), 1.0), std::invalid_argument);
}

TEST_CASE("unit-modulus theta preserves singular values of H_r theta") {
    const Scenario s = random_scenario(8);
    const CMatrix hr = irs_rx_channel(s);
    const CVector theta = theta_of(reflective_focusing(s));
    const Eigen::VectorXd a = Eigen::JacobiSVD<CMatrix>(hr).singularValues();
    const Eigen::VectorXd b = Eigen::JacobiSVD<CMatrix>(hr * theta.asDiagonal()).singularValues();
    CHECK((a - b).norm() < 1e-9 * a.norm());
}

TEST_CASE("coupling constants") {
    const Scenario s = fig2_scenario();
    const CouplingConstants c = coupling_constants(s);
    CHECK(c.a_tx == doctest::Approx(std::sqrt(0.8125)).epsilon(1e-12));
    CHECK(std::cos(c.gbar_tx) == doctest::Approx(std::sin(s.tx.azimuth) / c.a_tx));
    CHECK(std::cos(c.gbar_tx) * std::cos(c.gbar_tx) + std::sin(c.gbar_tx) * std::sin(c.gbar_tx) ==
          doctest::Approx(1.0));

    const ArrayPose normal = ArrayPose::make(3, 0.1, 5, 1.1, 0.0, 0, kPi / 2);
    const AxisGeometry g = axis_geometry(normal);
    CHECK(g.a_x == doctest::Approx(1.0));
    CHECK(g.a_y == doctest::Approx(1.0));

    CHECK_THROWS_AS(axis_geometry(ArrayPose::make(3, 0.1, 5, 0.0, kPi / 2, 0, kPi / 2)), std::domain_error);

    // At the Rayleigh distance with aligned orientation the constant is exactly one.
    Scenario r = s;
    const double dr = s.tx.spacing * s.irs.spacing_x * s.irs.q_x * c.a_tx / s.wave.wavelength;
    r.tx = s.tx.with_distance(dr).with_orientation(c.gbar_tx, kPi / 2);
    CHECK(coupling_constants(r).c_tx == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Dirichlet ratio") {
    CHECK(dirichlet(0.0, 15) == doctest::Approx(15.0));
    CHECK(dirichlet(15.0, 15) == doctest::Approx(15.0));  // removable singularity, cos sum
    CHECK(std::abs(dirichlet(1.0, 15)) < 1e-12);
    for (double u : {0.3, 1.7, -2.2, 7.5}) {
        double sum = 0.0;
        for (int k = -7; k <= 7; ++k) sum += std::cos(kTwoPi * u * k / 15);
        CHECK(dirichlet(u, 15) == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("closed form equals the assembled channel on the Fig. 2 geometry") {
    const Scenario s = fig2_scenario();
    const ChannelSet c = assemble(s, reflective_focusing(s));
    const CMatrix cf = closed_form_channel(s);
    CHECK(max_relative_error(cf, c.h, cascade_error_floor(c, s.irs)) < 1e-9);
    // Centre entry: both Dirichlet ratios at their limits.
    CHECK(std::abs(cf(2, 2)) == doctest::Approx(c.eta0 * 225).epsilon(1e-12));
}

TEST_CASE("closed form equals the assembled channel on random geometries") {
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
        const Scenario s = random_scenario(seed);
        const ChannelSet c = assemble(s, reflective_focusing(s));
        CHECK(max_relative_error(closed_form_channel(s), c.h, cascade_error_floor(c, s.irs)) < 1e-8);
    }
}

TEST_CASE("unit coupling constants give a permutation-shaped channel") {
    // Symmetric Tx and Rx at their x-axis Rayleigh distance, orientations on the gamma-bar axes.
    Scenario s = fig6_scenario(3 * kPi / 2, kPi / 2);
    const AxisGeometry t = axis_geometry(s.tx), r = axis_geometry(s.rx);
    const double dt = s.tx.spacing * s.irs.spacing_x * s.irs.q_x * t.a_x / s.wave.wavelength;
    const double dr = s.rx.spacing * s.irs.spacing_x * s.irs.q_x * r.a_x / s.wave.wavelength;
    s.tx = s.tx.with_distance(dt).with_orientation(t.gbar_x, kPi / 2);
    s.rx = s.rx.with_distance(dr).with_orientation(r.gbar_x, kPi / 2);
    const CouplingConstants cc = coupling_constants(s);
    REQUIRE(cc.c_tx == doctest::Approx(1.0));
    REQUIRE(cc.c_rx == doctest::Approx(1.0));
    REQUIRE(cc.c_ty == doctest::Approx(cc.c_ry).epsilon(1e-12));
    const CMatrix h = closed_form_channel(s);
    const double peak = scenario_eta0(s) * s.irs.count();
    for (int q = -2; q <= 2; ++q)
        for (int p = -2; p <= 2; ++p) {
            const double m = std::abs(h(q + 2, p + 2));
            if (q == -p)
                CHECK(m == doctest::Approx(peak).epsilon(1e-12));
            else
                CHECK(m < 1e-9 * peak);
        }
}

TEST_CASE("matrix CSV") {
    CMatrix m(1, 2);
    m << cd(1.5, -2.0), cd(0.1, 0.0);
    std::ostringstream os;
    write_matrix_csv(os, m, "abc");
    CHECK(os.str() == "# scenario_hash=abc\nrow,col,re,im\n0,0,1.5,-2\n0,1,0.10000000000000001,0\n");
}

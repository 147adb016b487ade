#include <doctest.h>

#include "eitmem/spectra.hpp"
#include "eitmem/util.hpp"

using namespace eitmem;
namespace sp = eitmem::spectra;

namespace {

MediumParams fig3a_medium() {
    MediumParams m = MediumParams::lambda_d1(822.0);
    m.gamma21 = 0.0004;
    m.gamma31 = 1.07;
    return m;
}

FieldParams fig3a_field() {
    FieldParams f;
    f.omega_c = 7.41;
    f.delta_c = -0.012;
    return f;
}

}  // namespace

TEST_CASE("lambda response limits") {
    MediumParams m = MediumParams::lambda_d1(100.0);
    FieldParams f;
    f.omega_c = 2.0;

    SUBCASE("perfect transparency on the dark state") {
        m.gamma21 = 0.0;
        CHECK(std::abs(sp::lambda_response(0.0, m, f)) == doctest::Approx(0.0));
    }
    SUBCASE("two-level absorption with the control off") {
        m.gamma31 = 0.5;
        FieldParams f0;
        const Complex fv = sp::lambda_response(0.0, m, f0);
        CHECK(fv.real() == doctest::Approx(-m.optical_depth / 2.0));
        CHECK(fv.imag() == doctest::Approx(0.0));
        // intensity transmission e^{-D}
        CHECK(std::exp(2.0 * fv.real()) == doctest::Approx(std::exp(-100.0)));
    }
    SUBCASE("quadratic coefficient matches -4 D gamma31 / omega_c^4") {
        m.gamma21 = 0.0;
        m.gamma31 = 0.8;
        const double h = 1e-3;
        const Complex fm = sp::lambda_response(-h, m, f);
        const Complex f0 = sp::lambda_response(0.0, m, f);
        const Complex fp = sp::lambda_response(+h, m, f);
        // Taylor coefficient, i.e. half the second derivative
        const Complex c2 = 0.5 * (fp - 2.0 * f0 + fm) / (h * h);
        const double expected = -4.0 * m.optical_depth * m.gamma31 / std::pow(f.omega_c, 4);
        CHECK(c2.real() == doctest::Approx(expected).epsilon(1e-3));
    }
    SUBCASE("exact pole with all damping off") {
        MediumParams z = MediumParams::lambda_d1(10.0);
        z.gamma21 = z.gamma31 = 0.0;
        FieldParams fz;
        fz.omega_c = 2.0;
        // omega such that the denominator vanishes: omega^2 = omega_c^2/4
        CHECK_THROWS_AS(sp::lambda_response(1.0, z, fz), NumericalError);
    }
}

TEST_CASE("eit spectrum reproduces the reference lineshapes") {
    SUBCASE("zero optical depth is unit transmission") {
        MediumParams m = MediumParams::lambda_d1(0.0);
        FieldParams f;
        f.omega_c = 2.0;
        const auto s = sp::eit_spectrum(ArrayXd::LinSpaced(101, -6, 6), m, f);
        CHECK(s.transmission.minCoeff() == doctest::Approx(1.0));
        CHECK(s.transmission.maxCoeff() == doctest::Approx(1.0));
    }
    SUBCASE("high-OD fit parameters give a near-unity transparency peak") {
        const auto s = sp::eit_spectrum(sp::default_grid(fig3a_medium(), fig3a_field()),
                                        fig3a_medium(), fig3a_field());
        CHECK(s.peak_transparency > 0.97);
        CHECK(s.peak_transparency <= 1.0 + 1e-12);
        // absorption is complete at the Autler-Townes resonance
        Eigen::Index i2 = 0;
        (s.delta_p - fig3a_field().omega_c / 2.0).abs().minCoeff(&i2);
        CHECK(s.transmission[i2] < 1e-10);
        // transparency sits near the control detuning
        CHECK(std::abs(sp::resonance_shift(s) - fig3a_field().delta_c) < 0.02);
    }
    SUBCASE("moderate-OD parameters reproduce the published window width") {
        MediumParams m = MediumParams::lambda_d1(351.0);
        m.gamma21 = 0.00024;
        m.gamma31 = 0.82;
        FieldParams f;
        f.omega_c = 2.05;
        f.delta_c = 0.0075;
        const auto s = sp::eit_spectrum(sp::default_grid(m, f), m, f);
        CHECK(s.peak_transparency > 0.9);
        const double bw_expected = std::sqrt(kLn2 / 2.0) * sqr(2.05) / std::sqrt(351.0 * 0.82);
        CHECK(s.fwhm_eit == doctest::Approx(bw_expected).epsilon(0.15));
    }
}

TEST_CASE("eit bandwidth closed form and numeric width") {
    MediumParams m = fig3a_medium();
    FieldParams f = fig3a_field();
    f.delta_c = 0.0;
    const auto bw = sp::eit_bandwidth(m, f);
    CHECK(bw.closed_form == doctest::Approx(1.090).epsilon(1e-3));
    CHECK(bw.numeric_fwhm == doctest::Approx(bw.closed_form).epsilon(0.10));

    SUBCASE("quadratic scaling with the control field") {
        FieldParams f2 = f;
        f2.omega_c = 2.0 * f.omega_c;
        const auto bw2 = sp::eit_bandwidth(m, f2);
        CHECK(bw2.closed_form == doctest::Approx(4.0 * bw.closed_form));
    }
    SUBCASE("zero optical depth is an error") {
        CHECK_THROWS_AS(sp::eit_bandwidth(MediumParams::lambda_d1(0.0), f),
                        ValidationError);
    }
}

TEST_CASE("ntype spectrum") {
    MediumParams m = MediumParams::ntype_d2(203.0);
    m.gamma21 = 0.0006;
    m.gamma31 = 0.80;
    m.gamma41 = 0.80;
    FieldParams f;
    f.omega_c = 1.01;

    SUBCASE("reduces to the lambda lineshape when the switching channel is off") {
        MediumParams m0 = m;
        m0.epsilon_switch = 0.0;
        const ArrayXd grid = ArrayXd::LinSpaced(801, -6, 6);
        const auto sn = sp::ntype_spectrum(grid, m0, f);
        const auto sl = sp::eit_spectrum(grid, m0, f);
        CHECK(((sn.transmission - sl.transmission).abs().maxCoeff()) < 1e-12);
    }
    SUBCASE("same reduction as delta_s goes to infinity") {
        MediumParams minf = m;
        minf.delta_s = -1e16;
        const ArrayXd grid = ArrayXd::LinSpaced(401, -2, 2);
        const auto sn = sp::ntype_spectrum(grid, minf, f);
        const auto sl = sp::eit_spectrum(grid, minf, f);
        CHECK(((sn.transmission - sl.transmission).abs().maxCoeff()) < 1e-12);
    }
    SUBCASE("weak control: photon switching caps the transparency") {
        const auto s = sp::ntype_spectrum(sp::default_grid(m, f), m, f);
        // narrow window and the power-dependent decoherence keep the peak low
        CHECK(s.peak_transparency > 0.55);
        CHECK(s.peak_transparency < 0.70);
    }
    SUBCASE("intermediate control gives the best transparency, about seventy percent") {
        MediumParams mb = MediumParams::ntype_d2(179.0);
        mb.gamma21 = 0.0025;
        mb.gamma31 = mb.gamma41 = 0.80;
        FieldParams fb;
        fb.omega_c = 2.81;
        const auto s = sp::ntype_spectrum(sp::default_grid(mb, fb), mb, fb);
        CHECK(s.peak_transparency > 0.65);
        CHECK(s.peak_transparency < 0.80);
    }
    SUBCASE("strong control depresses the peak again") {
        MediumParams ms = MediumParams::ntype_d2(225.0);
        ms.gamma21 = 0.011;
        ms.gamma31 = ms.gamma41 = 0.80;
        FieldParams fs;
        fs.omega_c = 4.10;
        const auto s = sp::ntype_spectrum(sp::default_grid(ms, fs), ms, fs);
        CHECK(s.peak_transparency > 0.45);
        CHECK(s.peak_transparency < 0.70);
    }
    SUBCASE("resonance shift is linear in control power with a negative slope") {
        std::vector<double> power, shift;
        for (double wc : {1.0, 2.0, 3.0, 4.0}) {
            FieldParams fw;
            fw.omega_c = wc;
            const ArrayXd grid = ArrayXd::LinSpaced(4001, -0.5, 0.5);
            const auto s = sp::ntype_spectrum(grid, m, fw);
            power.push_back(wc * wc);
            shift.push_back(sp::resonance_shift(s));
        }
        // slope from the two extreme points, sign and linearity
        const double slope = (shift.back() - shift.front()) / (power.back() - power.front());
        CHECK(slope < 0.0);
        const double mid_pred = shift.front() + slope * (power[2] - power[0]);
        CHECK(shift[2] == doctest::Approx(mid_pred).epsilon(0.05));
        // peak sits where the effective two-photon detuning vanishes
        const auto eff = sp::ntype_effective(m, 2.0);
        CHECK(shift[1] == doctest::Approx(-eff.delta2_eff).epsilon(0.02));
    }
}

TEST_CASE("ntype effective quantities") {
    MediumParams m = MediumParams::ntype_d2(100.0);
    m.gamma21 = 0.0001;
    m.gamma41 = 0.8;

    SUBCASE("control off leaves the bare parameters") {
        const auto eff = sp::ntype_effective(m, 0.0);
        CHECK(eff.gamma21_eff == doctest::Approx(0.0001));
        CHECK(eff.delta2_eff == doctest::Approx(0.0));
    }
    SUBCASE("decoherence slope in control power") {
        const auto e1 = sp::ntype_effective(m, 1.0);
        const auto e2 = sp::ntype_effective(m, 2.0);
        const double slope = (e2.gamma21_eff - e1.gamma21_eff) / (4.0 - 1.0);
        const double expected = (48.0 / 7.0) * m.gamma41 / (4.0 * sqr(m.delta_s));
        CHECK(slope == doctest::Approx(expected).epsilon(1e-9));
    }
    SUBCASE("reference curve value at one control power") {
        // gamma0 = 0.0001, gamma41 = 0.8, delta_s = 2 pi x 251.09 MHz
        const auto eff = sp::ntype_effective(m, 1.0);
        const double ds2 = sqr(m.delta_s);
        CHECK(eff.gamma21_eff ==
              doctest::Approx(0.0001 + (48.0 / 7.0) * 0.8 / (4.0 * ds2)).epsilon(1e-9));
    }
    SUBCASE("zero switching detuning is an error") {
        MediumParams z = m;
        z.delta_s = 0.0;
        CHECK_THROWS_AS(sp::ntype_effective(z, 1.0), ValidationError);
    }
}

TEST_CASE("transmission bounded by one for passive media") {
    util::Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        MediumParams m = MediumParams::lambda_d1(rng.uniform(1.0, 1000.0));
        m.gamma21 = rng.uniform(0.0, 0.01);
        m.gamma31 = rng.uniform(0.3, 1.5);
        FieldParams f;
        f.omega_c = rng.uniform(0.2, 10.0);
        f.delta_c = rng.uniform(-0.5, 0.5);
        const ArrayXd grid = ArrayXd::LinSpaced(201, -6, 6);
        const auto s = (trial % 2 == 0)
                           ? sp::eit_spectrum(grid, m, f)
                           : sp::ntype_spectrum(grid, MediumParams::ntype_d2(
                                                          m.optical_depth),
                                                f);
        CHECK(s.transmission.minCoeff() >= 0.0);
        CHECK(s.transmission.maxCoeff() <= 1.0 + 1e-12);
    }
}

TEST_CASE("lambda spectrum hits exact unity on the dark state") {
    MediumParams m = MediumParams::lambda_d1(500.0);
    m.gamma21 = 0.0;
    FieldParams f;
    f.omega_c = 3.0;
    ArrayXd grid(3);
    grid << -0.1, 0.0, 0.1;
    const auto s = sp::eit_spectrum(grid, m, f);
    CHECK(s.transmission[1] == doctest::Approx(1.0).epsilon(1e-14));
}

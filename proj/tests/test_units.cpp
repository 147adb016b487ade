#include <doctest.h>

#include "eitmem/units.hpp"

using namespace eitmem;

TEST_CASE("cesium presets carry the documented rates") {
    const Transition d1 = Transition::cesium_d1();
    CHECK(d1.gamma_sp == doctest::Approx(2.0 * kPi * 4.575e6));
    CHECK(d1.wavelength == doctest::Approx(894.6e-9));
    const Transition d2 = Transition::cesium_d2();
    CHECK(d2.gamma_sp == doctest::Approx(2.0 * kPi * 5.234e6));
}

TEST_CASE("unit conversions match the natural time scale") {
    const UnitSystem u(Transition::cesium_d1());
    // 1/Gamma for the D1 line
    CHECK(u.time_unit_s() * 1e9 == doctest::Approx(34.79).epsilon(1e-3));
    // 207 ns pulse in Gamma units
    CHECK(u.time_ns_to_gamma(207.0) == doctest::Approx(5.95).epsilon(1e-3));
    // identity when Gamma = 1 rad/s
    const UnitSystem id(Transition{1.0, 1.0});
    CHECK(id.time_ns_to_gamma(3.0) == doctest::Approx(3e-9));
}

TEST_CASE("si round trip is exact to 1e-12") {
    const UnitSystem u(Transition::cesium_d1());
    for (double mhz : {0.001, 0.3, 4.575, 251.09, 9192.631770}) {
        const double w = u.freq_mhz_to_gamma(mhz);
        CHECK(u.gamma_to_freq_mhz(w) == doctest::Approx(mhz).epsilon(1e-12));
    }
    for (double ns : {0.1, 34.79, 207.0, 3.25e5}) {
        const double t = u.time_ns_to_gamma(ns);
        CHECK(u.gamma_time_to_ns(t) == doctest::Approx(ns).epsilon(1e-12));
    }
}

TEST_CASE("validation names the offending field") {
    Transition t{-1.0, 894.6e-9};
    CHECK_THROWS_WITH_AS(t.validate(), "transition: gamma_sp must be > 0",
                         ValidationError);
    GaussianPulse p{0.1, -1.0, 0.0};
    CHECK_THROWS_AS(p.validate(), ValidationError);
    MediumParams m;
    m.gamma21 = -1.0;
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("medium defaults resolve the unset rates") {
    MediumParams m = MediumParams::ntype_d2(100.0);
    m.gamma31 = 0.9;
    const MediumParams r = m.resolved();
    CHECK(r.gamma41 == doctest::Approx(0.9));
    CHECK(r.gamma32 == doctest::Approx(0.9));
    CHECK(r.gamma42 == doctest::Approx(0.9));
    CHECK(r.gamma43 == doctest::Approx(1.0));  // (Gamma3 + Gamma4)/2
    CHECK(r.Gamma3() == doctest::Approx(1.0));
    CHECK(r.Gamma4() == doctest::Approx(1.0));
}

TEST_CASE("grid covers pulse, delay and the transparency window") {
    GaussianPulse pulse{0.05, 5.95, 0.0};
    MediumParams m = MediumParams::lambda_d1(822.0);
    m.gamma31 = 1.07;
    FieldParams f;
    f.omega_c = 7.41;

    const TimeGrid g = make_grid(pulse, m, f);
    const double window = g.t[g.t.size() - 1] - g.t[0] + g.dt;
    const double t_d = 822.0 / (7.41 * 7.41);
    CHECK(window >= 8.0 * pulse.t_p + t_d);
    // frequency resolution resolves the EIT window
    const double bw = std::sqrt(kLn2 / 2.0) * sqr(f.omega_c) / std::sqrt(822.0 * 1.07);
    CHECK(g.domega <= bw / 50.0 * (1.0 + 1e-12));
    // Nyquist clears 20x the pulse spectral width
    const double nyquist = kPi / g.dt;
    CHECK(nyquist >= 20.0 * 4.0 * kLn2 / pulse.t_p);
    // power-of-two length
    const auto n = g.t.size();
    CHECK((n & (n - 1)) == 0);

    SUBCASE("window at least the pulse plus the delay for t_d = 16") {
        FieldParams f2;
        f2.omega_c = std::sqrt(822.0 / 16.0);  // t_d = 16
        const TimeGrid g2 = make_grid(pulse, m, f2);
        const double w2 = g2.t[g2.t.size() - 1] - g2.t[0] + g2.dt;
        CHECK(w2 >= 8.0 * 5.95 + 16.0);  // 63.6 / Gamma
    }

    SUBCASE("zero optical depth gives the 8 t_p window centred on t0") {
        MediumParams m0 = MediumParams::lambda_d1(0.0);
        const TimeGrid g0 = make_grid(pulse, m0, f);
        const double w0 = g0.t[g0.t.size() - 1] - g0.t[0] + g0.dt;
        CHECK(w0 == doctest::Approx(8.0 * pulse.t_p).epsilon(1e-9));
        CHECK(g0.t[0] == doctest::Approx(pulse.t0 - 4.0 * pulse.t_p));
    }

    SUBCASE("frequency spacing is 2 pi over the window") {
        GridOptions opt;
        opt.n_samples = 16384;
        opt.window = 64.0;
        MediumParams m0 = MediumParams::lambda_d1(0.0);
        const TimeGrid gw = make_grid(pulse, m0, f, opt);
        CHECK(gw.domega == doctest::Approx(2.0 * kPi / 64.0));
        CHECK(gw.domega == doctest::Approx(0.0982).epsilon(1e-3));
    }

    SUBCASE("unsatisfiable sample count is a sizing error") {
        GridOptions opt;
        opt.n_samples = 64;  // far below the Nyquist requirement
        CHECK_THROWS_AS(make_grid(pulse, m, f, opt), ValidationError);
    }
}

TEST_CASE("sampled waveform invariants") {
    SampledWaveform w;
    w.t = ArrayXd::LinSpaced(8, 0.0, 7.0);
    w.amplitude = ArrayXcd::Ones(8);
    CHECK_NOTHROW(w.validate());
    CHECK(w.energy() == doctest::Approx(7.0));

    SampledWaveform bad = w;
    bad.t = ArrayXd::LinSpaced(7, 0.0, 6.0);
    bad.amplitude = ArrayXcd::Ones(7);
    CHECK_THROWS_AS(bad.validate(), ValidationError);  // not a power of two

    SampledWaveform ragged = w;
    ragged.t[3] += 0.2;
    CHECK_THROWS_AS(ragged.validate(), ValidationError);
}

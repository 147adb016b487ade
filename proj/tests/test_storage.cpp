#include <doctest.h>

#include "eitmem/estimation.hpp"
#include "eitmem/propagation.hpp"
#include "eitmem/storage.hpp"

using namespace eitmem;
namespace st = eitmem::storage;
namespace pr = eitmem::prop;

namespace {

const double kTauRef = 325e-6 * 2.0 * kPi * 4.575e6;  // 325 us in D1 Gamma units
const double kTpRef = 207e-9 * 2.0 * kPi * 4.575e6;   // 207 ns

}  // namespace

TEST_CASE("compression efficiency") {
    SUBCASE("limits") {
        CHECK(st::eta_comp(50.0, 1e4, 1.0) == doctest::Approx(1.0));
        CHECK(st::eta_comp(0.0, 0.0, 1.0) == doctest::Approx(0.0));
    }
    SUBCASE("kappa 1.1 at od 100 crosses 99 percent near zeta 2.5") {
        auto beta = [](double zeta) {
            return std::sqrt(1.0 + 32.0 * kLn2 * 0.5 * sqr(zeta) / 100.0);
        };
        CHECK(st::eta_comp(1.1, 2.5, beta(2.5)) >= 0.985);
        CHECK(st::eta_comp(1.1, 2.7, beta(2.7)) >= 0.99);
        CHECK(st::eta_comp(1.1, 2.2, beta(2.2)) < 0.99);
    }
    SUBCASE("beta below one is rejected") {
        CHECK_THROWS_AS(st::eta_comp(1.0, 2.0, 0.9), ValidationError);
    }
}

TEST_CASE("storage-time decay") {
    const st::DecayModel d{0.90, kTauRef, 0.0};
    SUBCASE("t = 0 gives the amplitude") {
        CHECK(st::eta_stored(0.0, d) == doctest::Approx(0.90));
    }
    SUBCASE("one decay time gives A/e") {
        CHECK(st::eta_stored(kTauRef, d) == doctest::Approx(0.90 / std::exp(1.0)));
        CHECK(0.90 / std::exp(1.0) == doctest::Approx(0.331).epsilon(1e-3));
    }
    SUBCASE("half-efficiency time inverts to 249.2 us") {
        const double t_half = kTauRef * std::sqrt(std::log(2.0 * 0.90));
        CHECK(st::eta_stored(t_half, d) == doctest::Approx(0.5));
        const double us = t_half / (2.0 * kPi * 4.575e6) * 1e6;
        CHECK(us == doctest::Approx(249.2).epsilon(1e-3));
    }
}

TEST_CASE("time-bandwidth product") {
    const st::DecayModel d{0.90, kTauRef, 0.0};
    SUBCASE("reference pulse gives about 1200") {
        const st::TbpResult r = st::tbp_at_half(d, kTpRef);
        CHECK(r.analytic == doctest::Approx(1204.0).epsilon(2e-3));
        CHECK(r.numeric == doctest::Approx(r.analytic).epsilon(1e-6));
        CHECK(r.analytic >= 1150.0);
        CHECK(r.analytic <= 1250.0);
    }
    SUBCASE("ten times shorter pulse gives ten times the product") {
        const double tp20 = 20e-9 * 2.0 * kPi * 4.575e6;
        const st::TbpResult r = st::tbp_at_half(d, tp20);
        CHECK(r.analytic == doctest::Approx(12458.0).epsilon(2e-3));
        const st::TbpResult ref = st::tbp_at_half(d, kTpRef);
        CHECK(r.analytic / ref.analytic >= 9.0);
    }
    SUBCASE("A near half sends the product to zero") {
        const st::TbpResult r = st::tbp_at_half({0.5 + 1e-9, kTauRef, 0.0}, kTpRef);
        CHECK(r.analytic < 1.0);
    }
    SUBCASE("A at or below half is unreachable") {
        CHECK_THROWS_AS(st::tbp_at_half({0.5, kTauRef, 0.0}, kTpRef), ValidationError);
    }
    SUBCASE("exponential component shortens the half time") {
        const st::DecayModel dg{0.90, kTauRef, 1e-5};
        const st::TbpResult r = st::tbp_at_half(dg, kTpRef);
        CHECK(r.numeric < r.analytic);
    }
}

TEST_CASE("se versus od sweep") {
    const auto gamma_d1 = [](double d) { return fit::gamma31_model(d, Scheme::LambdaD1); };
    const auto gamma_d2 = [](double d) { return fit::gamma31_model(d, Scheme::NTypeD2); };

    SUBCASE("three-level branch rises to the low nineties at od near 816") {
        std::vector<double> od;
        for (double d = 100.0; d <= 1000.0; d += 4.0) od.push_back(d);
        const auto rows = st::se_vs_od_sweep(od, Scheme::LambdaD1, kTpRef, 2.7, gamma_d1,
                                             0.0001, 0.0, 0.0);
        double at816 = 0.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].eta > rows[i - 1].eta);  // monotone over this range
            if (std::abs(rows[i].optical_depth - 816.0) < 2.5) at816 = rows[i].eta;
        }
        CHECK(at816 > 0.90);
        CHECK(at816 < 0.93);
    }
    SUBCASE("zero decoherence makes the three-level curve strictly increasing") {
        std::vector<double> od;
        for (double d = 50.0; d <= 2000.0; d += 50.0) od.push_back(d);
        const auto rows = st::se_vs_od_sweep(od, Scheme::LambdaD1, kTpRef, 2.7, gamma_d1,
                                             0.0, 0.0, 0.0);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].eta > rows[i - 1].eta);
    }
    SUBCASE("N-type branch peaks near 0.65 at od near 130 then declines") {
        const double tp_d2 = 207e-9 * 2.0 * kPi * 5.234e6;
        const MediumParams m = MediumParams::ntype_d2(1.0);
        std::vector<double> od;
        for (double d = 40.0; d <= 400.0; d += 2.0) od.push_back(d);
        const auto rows = st::se_vs_od_sweep(od, Scheme::NTypeD2, tp_d2, 2.3, gamma_d2,
                                             0.0005, m.delta_s, m.epsilon_switch);
        double peak = 0.0, peak_od = 0.0;
        for (const auto& r : rows)
            if (r.eta > peak) {
                peak = r.eta;
                peak_od = r.optical_depth;
            }
        CHECK(peak == doctest::Approx(0.65).epsilon(0.05));
        CHECK(peak_od > 100.0);
        CHECK(peak_od < 150.0);
        CHECK(rows.back().eta < peak);  // declines at large od
    }
}

TEST_CASE("storage simulation") {
    // moderate optical depth keeps the solver quick while the analytic
    // decomposition still holds well
    GaussianPulse pulse{0.01, 5.95, 0.0};
    MediumParams m = MediumParams::lambda_d1(400.0);
    m.gamma21 = 0.0;
    m.gamma31 = 0.8;
    FieldParams f;
    const double zeta = 2.7;
    f.omega_c = std::sqrt(400.0 / (zeta * pulse.t_p));

    st::StorageProtocol proto;
    proto.t_off = 1.1 * pulse.t_p;
    proto.t_on = proto.t_off + 25.0;
    proto.ramp = st::RampShape::Step;

    SUBCASE("no-switch run reproduces the spectral propagator") {
        st::StorageProtocol off = proto;
        off.enabled = false;
        const st::StorageResult r = st::simulate_storage(pulse, m, f, off);
        // same grid through the spectral route
        const SampledWaveform in = sample_pulse(pulse, r.retrieved.t);
        const pr::PropagationResult ref = pr::propagate_pulse(in, m, f);
        const double err = std::sqrt((r.retrieved.amplitude - ref.output.amplitude)
                                         .abs2()
                                         .sum() /
                                     ref.output.amplitude.abs2().sum());
        CHECK(err < 0.005);
        CHECK(r.eta_tran == doctest::Approx(ref.eta_tran).epsilon(0.005));
    }

    SUBCASE("decomposition eta_total = eta_tran x eta_comp for a lossless ground state") {
        const st::StorageResult r = st::simulate_storage(pulse, m, f, proto);
        const double beta = std::sqrt(1.0 + 32.0 * kLn2 * 400.0 * m.gamma31 /
                                             (sqr(pulse.t_p) * sqr(sqr(f.omega_c))));
        const double comp = st::eta_comp(proto.t_off / pulse.t_p, zeta, beta);
        CHECK(r.eta_total == doctest::Approx(r.eta_tran * comp).epsilon(0.011));
        CHECK(r.eta_comp == doctest::Approx(comp).epsilon(0.03));
        CHECK(r.eta_stored == doctest::Approx(1.0));
    }

    SUBCASE("zero optical depth stores nothing") {
        MediumParams m0 = MediumParams::lambda_d1(0.0);
        const st::StorageResult r = st::simulate_storage(pulse, m0, f, proto);
        CHECK(r.eta_comp == doctest::Approx(0.0));
        CHECK(r.eta_total < 1e-9);
        CHECK(r.leaked.energy() == doctest::Approx(pulse.energy()).epsilon(0.01));
    }

    SUBCASE("energy budget closes when only compression loss is active") {
        // gamma21 = 0; pick zeta small enough that the bandwidth loss is
        // within the one-percent budget
        MediumParams ml = MediumParams::lambda_d1(800.0);
        ml.gamma21 = 0.0;
        ml.gamma31 = 0.5;
        FieldParams fl;
        fl.omega_c = std::sqrt(800.0 / (1.2 * pulse.t_p));
        st::StorageProtocol p2 = proto;
        p2.t_off = 1.1 * pulse.t_p;
        p2.t_on = p2.t_off + 20.0;
        const st::StorageResult r = st::simulate_storage(pulse, ml, fl, p2);
        const double total = (r.leaked.energy() + r.retrieved.energy()) / pulse.energy();
        CHECK(total == doctest::Approx(1.0).epsilon(0.01));
    }

    SUBCASE("hold decay multiplies the stored coherence") {
        st::StorageOptions opts;
        opts.hold_decay = st::DecayModel{1.0, 300.0, 0.0};
        const st::StorageResult r = st::simulate_storage(pulse, m, f, proto, opts);
        const double hold = proto.t_on - proto.t_off;
        CHECK(r.eta_stored == doctest::Approx(std::exp(-sqr(hold / 300.0))).epsilon(1e-6));
    }

    SUBCASE("retrieved pulse travels at the group velocity of the read control") {
        const st::StorageResult r = st::simulate_storage(pulse, m, f, proto);
        // spin-wave centroid position
        const ArrayXd w = r.spinwave.abs2();
        ArrayXd xi = ArrayXd::LinSpaced(w.size(), 0.0, 1.0);
        const double xbar = (xi * w).sum() / w.sum();
        const double remaining = (1.0 - xbar) * 400.0 / sqr(f.omega_c);
        const double delay = r.retrieved.centroid() - (pulse.t0 + proto.t_on);
        CHECK(delay == doctest::Approx(remaining).epsilon(0.05));
    }
}

TEST_CASE("high-od storage reproduces the published efficiency scale") {
    // joint-fit parameters of the high-OD dataset, kappa = 1.1
    const double tp = kTpRef;
    GaussianPulse pulse{0.01, tp, 0.0};
    MediumParams m = MediumParams::lambda_d1(822.0);
    m.gamma21 = 0.0004;
    m.gamma31 = 1.07;
    FieldParams f;
    f.omega_c = 7.41;
    st::StorageProtocol proto;
    proto.t_off = 1.1 * tp;
    proto.t_on = proto.t_off + 30.0;
    const st::StorageResult r = st::simulate_storage(pulse, m, f, proto);
    CHECK(r.eta_total > 0.88);
    CHECK(r.eta_total < 0.93);
}

TEST_CASE("full-obe mode conserves the trace") {
    GaussianPulse pulse{0.3, 5.95, 0.0};  // strong probe on purpose
    MediumParams m = MediumParams::lambda_d1(50.0);
    m.gamma21 = 1e-4;
    m.gamma31 = 0.6;
    FieldParams f;
    f.omega_c = 2.0;
    st::StorageProtocol off;
    off.enabled = false;
    st::StorageOptions opts;
    opts.mode = st::ObeMode::FullObe;
    opts.nz = 32;
    const st::StorageResult r = st::simulate_storage(pulse, m, f, off, opts);
    CHECK(r.eta_tran > 0.0);
    CHECK(r.trace_error_per_step < 1e-8);
}

TEST_CASE("full-obe and first-order modes agree for a weak probe") {
    GaussianPulse pulse{0.01, 5.95, 0.0};
    MediumParams m = MediumParams::lambda_d1(100.0);
    m.gamma21 = 1e-4;
    m.gamma31 = 0.8;
    FieldParams f;
    f.omega_c = 3.0;
    st::StorageProtocol off;
    off.enabled = false;
    st::StorageOptions opts;
    opts.nz = 64;
    const st::StorageResult a = st::simulate_storage(pulse, m, f, off, opts);
    opts.mode = st::ObeMode::FullObe;
    const st::StorageResult b = st::simulate_storage(pulse, m, f, off, opts);
    CHECK(a.eta_tran == doctest::Approx(b.eta_tran).epsilon(0.002));
}

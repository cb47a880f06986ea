#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "hhe/energetics.hpp"
#include "hhe/integrator.hpp"

using namespace hhe;
using Catch::Approx;

namespace {

// hand-built trace with only the fields spike detection needs
Trace voltage_trace(const std::vector<double>& v, double dt = 0.1, double transient = 0.0) {
    Trace tr;
    tr.dt_ms = dt;
    tr.transient_ms = transient;
    tr.v_mv = v;
    tr.time_ms.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) tr.time_ms[i] = static_cast<double>(i) * dt;
    return tr;
}

Protocol protocol(double stim, double duration, double dt = 0.01, double temp = 36.0) {
    Protocol p;
    p.i_stim = stim;
    p.duration_ms = duration;
    p.dt_ms = dt;
    p.temperature_c = temp;
    return p;
}

}  // namespace

TEST_CASE("protocol validation") {
    CHECK_THROWS_AS(protocol(0.0, 100.0, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(protocol(0.0, 100.0, -0.01).validate(), std::invalid_argument);
    Protocol p = protocol(0.0, 100.0);
    p.transient_ms = 100.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.transient_ms = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(protocol(0.0, 100.0, 0.01, 55.0).validate(), std::invalid_argument);
}

TEST_CASE("constant trace has no spikes") {
    const Trace tr = voltage_trace(std::vector<double>(200, -65.0));
    CHECK(detect_spikes(tr).count() == 0);
}

TEST_CASE("sine crossing threshold five times yields five spikes") {
    std::vector<double> v;
    const double dt = 0.1;
    for (int i = 0; i < 5000; ++i) {
        const double t = i * dt;
        v.push_back(-40.0 + 60.0 * std::sin(2.0 * M_PI * t / 100.0));  // period 100 ms
    }
    const Trace tr = voltage_trace(v, dt);
    CHECK(detect_spikes(tr, 0.0, -70.0).count() == 5);
}

TEST_CASE("hysteresis suppresses re-crossings above the reset level") {
    // two humps; between them V dips only to -25, above the -30 reset
    std::vector<double> v(400, -60.0);
    for (int i = 100; i < 120; ++i) v[static_cast<std::size_t>(i)] = 10.0;
    for (int i = 120; i < 140; ++i) v[static_cast<std::size_t>(i)] = -25.0;
    for (int i = 140; i < 160; ++i) v[static_cast<std::size_t>(i)] = 10.0;
    const Trace tr = voltage_trace(v);
    CHECK(detect_spikes(tr, -20.0, -30.0).count() == 1);

    // dipping below reset re-arms the detector
    for (int i = 120; i < 140; ++i) v[static_cast<std::size_t>(i)] = -35.0;
    CHECK(detect_spikes(voltage_trace(v), -20.0, -30.0).count() == 2);
}

TEST_CASE("spikes before the transient are not counted") {
    std::vector<double> v(400, -60.0);
    for (int i = 100; i < 110; ++i) v[static_cast<std::size_t>(i)] = 10.0;  // at 10 ms
    for (int i = 300; i < 310; ++i) v[static_cast<std::size_t>(i)] = 10.0;  // at 30 ms
    const Trace tr = voltage_trace(v, 0.1, 20.0);
    const SpikeTrain sp = detect_spikes(tr);
    REQUIRE(sp.count() == 1);
    CHECK(sp.times_ms[0] == Approx(30.0));
    CHECK(sp.window_begin_ms == 20.0);
}

TEST_CASE("detector requires threshold above reset") {
    const Trace tr = voltage_trace(std::vector<double>(10, -65.0));
    CHECK_THROWS_AS(detect_spikes(tr, -30.0, -20.0), std::invalid_argument);
}

TEST_CASE("interspike frequencies") {
    SpikeTrain sp;
    sp.times_ms = {0.0, 100.0, 200.0};
    sp.window_begin_ms = 0.0;
    sp.window_end_ms = 1000.0;
    const auto f = interspike_frequencies(sp);
    REQUIRE(f.size() == 2);
    CHECK(f[0].time_ms == 100.0);
    CHECK(f[0].frequency_hz == Approx(10.0));
    CHECK(f[1].time_ms == 200.0);
    CHECK(f[1].frequency_hz == Approx(10.0));

    sp.times_ms = {5.0};
    CHECK(interspike_frequencies(sp).empty());
}

TEST_CASE("mean frequency is count over window") {
    SpikeTrain sp;
    sp.window_begin_ms = 0.0;
    sp.window_end_ms = 1000.0;
    sp.times_ms.assign(10, 0.0);
    CHECK(mean_frequency(sp) == Approx(10.0));

    SpikeTrain empty_window;
    CHECK_THROWS_AS(mean_frequency(empty_window), std::invalid_argument);
}

TEST_CASE("zero input produces no spikes") {
    for (int id : {1, 9, 10}) {
        const Trace tr = integrate(cell_registry(id), protocol(0.0, 1000.0));
        CHECK(detect_spikes(tr).count() == 0);
    }
}

TEST_CASE("trace sampling is uniform and complete") {
    const Trace tr = integrate(cell_registry(9), protocol(0.44, 100.0));
    REQUIRE(tr.size() == 10001);
    CHECK(tr.time_ms.front() == 0.0);
    CHECK(tr.time_ms.back() == Approx(100.0));
    CHECK(tr.gates.size() == 2);
    CHECK(tr.gate_labels == std::vector<std::string>{"h", "r"});
    for (std::size_t i = 1; i < 200; ++i)
        CHECK(tr.time_ms[i] - tr.time_ms[i - 1] == Approx(0.01));
}

TEST_CASE("integration is deterministic") {
    const Protocol p = protocol(1.4, 500.0);
    const Trace a = integrate(cell_registry(1), p);
    const Trace b = integrate(cell_registry(1), p);
    CHECK(a.v_mv == b.v_mv);
    CHECK(a.energy_rate_nw == b.energy_rate_nw);
    for (std::size_t g = 0; g < a.gates.size(); ++g) CHECK(a.gates[g] == b.gates[g]);
}

TEST_CASE("runaway parameters raise an integration error with the blow-up time") {
    CellParams p = cell_registry(1);
    p.g_na = 1e9;
    try {
        integrate(p, protocol(1.0, 100.0));
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.time_ms >= 0.0);
        CHECK(e.time_ms <= 100.0);
    }
}

TEST_CASE("tonic TCR firing sits near 15 Hz") {
    const Trace tr = integrate(cell_registry(9), protocol(0.44, 4000.0));
    const double f = mean_frequency(detect_spikes(tr));
    CHECK(f >= 12.0);
    CHECK(f <= 18.0);
}

TEST_CASE("cell 1 adapts from fast to slow firing") {
    const Trace tr = integrate(cell_registry(1), protocol(1.4, 4000.0));
    const SpikeTrain sp = detect_spikes(tr);
    const auto freqs = interspike_frequencies(sp);
    REQUIRE(freqs.size() >= 5);
    CHECK(freqs.front().frequency_hz >= 45.0);   // starts near 62 Hz
    CHECK(freqs.front().frequency_hz <= 80.0);
    CHECK(freqs.back().frequency_hz >= 2.5);     // settles near 3.5 Hz
    CHECK(freqs.back().frequency_hz <= 5.0);
    // monotone trend, allowing small jitter
    CHECK(freqs.back().frequency_hz < 0.2 * freqs.front().frequency_hz);
}

TEST_CASE("TCR firing shows no adaptation") {
    const Trace tr = integrate(cell_registry(9), protocol(0.44, 4000.0));
    const auto freqs = interspike_frequencies(detect_spikes(tr));
    REQUIRE(freqs.size() >= 10);
    // compare early and late interspike rates past the onset
    const double early = freqs[2].frequency_hz;
    const double late = freqs.back().frequency_hz;
    CHECK(late == Approx(early).epsilon(0.05));
}

TEST_CASE("cell 7 bursts carry 150-300 Hz intra-burst frequencies") {
    const Trace tr = integrate(cell_registry(7), protocol(0.25, 4000.0));
    const auto freqs = interspike_frequencies(detect_spikes(tr));
    REQUIRE_FALSE(freqs.empty());
    double fmax = 0.0;
    for (const auto& f : freqs) fmax = std::max(fmax, f.frequency_hz);
    CHECK(fmax >= 150.0);
    CHECK(fmax <= 340.0);
}

TEST_CASE("gate values stay inside [0,1] along every reference trace") {
    for (int id = 1; id <= 10; ++id) {
        const Trace tr = integrate(cell_registry(id), protocol(reference_stimulus(id), 2000.0));
        for (const auto& col : tr.gates) {
            const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
            INFO("cell " << id);
            CHECK(*lo >= -1e-6);
            CHECK(*hi <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("both energy-rate forms agree along a trace") {
    const CellParams& p = cell_registry(6);
    const Trace tr = integrate(p, protocol(0.25, 1000.0));
    const double k_temp = temperature_factor(tr.temperature_c);
    CellState s;
    s.gate_count = tr.gates.size();
    for (std::size_t i = 0; i < tr.size(); i += 7) {
        s.v = tr.v_mv[i];
        for (std::size_t g = 0; g < s.gate_count; ++g) s.gates[g] = tr.gates[g][i];
        CurrentBreakdown c;
        const StateDerivative d = state_derivative(s, p, tr.i_stim, k_temp, &c);
        const double battery = c.i_leak * p.e_leak + c.i_na * p.e_na + c.i_k * p.e_k +
                               c.i_m * p.e_k + c.i_ca * p.e_ca + c.i_t * p.e_t;
        const double eq_capacitor = p.c_m * s.v * d.dv + battery;
        const double eq_dissipation = s.v * tr.i_stim - tr.energy_rate_nw[i];
        const double scale = std::max({std::fabs(eq_capacitor), std::fabs(eq_dissipation), 1.0});
        REQUIRE(std::fabs(eq_capacitor - eq_dissipation) / scale < 1e-6);
    }
}

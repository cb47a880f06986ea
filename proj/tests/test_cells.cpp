#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "hhe/cells.hpp"

using namespace hhe;
using Catch::Approx;

namespace {

// deterministic pseudo-random doubles in [0,1)
struct Lcg {
    std::uint64_t s = 0x9e3779b97f4a7c15ull;
    double next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(s >> 11) * 0x1.0p-53;
    }
};

CellState random_state(const CellParams& p, Lcg& rng) {
    CellState s = steady_state_at(p, -65.0);
    s.v = -90.0 + 130.0 * rng.next();
    for (std::size_t i = 0; i < s.gate_count; ++i) s.gates[i] = rng.next();
    return s;
}

}  // namespace

TEST_CASE("registry holds the ten parameter sets") {
    REQUIRE(all_cells().size() == 10);
    for (int id = 1; id <= 10; ++id) {
        const CellParams& p = cell_registry(id);
        CHECK(p.cell_id == id);
        CHECK_FALSE(p.label.empty());
        CHECK(p.c_m > 0.0);
        for (double g : {p.g_leak, p.g_na, p.g_k, p.g_m, p.g_ca, p.g_t}) CHECK(g >= 0.0);
    }
    CHECK_THROWS_AS(cell_registry(0), std::invalid_argument);
    CHECK_THROWS_AS(cell_registry(11), std::invalid_argument);
    CHECK_THROWS_AS(reference_stimulus(0), std::invalid_argument);
}

TEST_CASE("registry spot values") {
    const CellParams& c9 = cell_registry(9);
    CHECK(c9.family == Family::tcr);
    CHECK(c9.g_na == 3.0);
    CHECK(c9.g_k == 5.0);
    CHECK(c9.g_t == 5.0);
    CHECK(c9.e_t == 0.0);
    CHECK(c9.c_m == 1.0);

    const CellParams& c5 = cell_registry(5);
    CHECK(c5.g_leak == 0.038);
    CHECK(c5.g_na == 58.0);
    CHECK(c5.g_k == 3.9);
    CHECK(c5.g_m == 0.0787);
    CHECK(c5.tau_max == 502.0);

    const CellParams& c10 = cell_registry(10);
    CHECK(c10.family == Family::rhi);
    CHECK(c10.e_leak == -65.0);
    CHECK(c10.e_na == 55.0);
    CHECK(c10.phi == 5.0);
    CHECK(c10.v_x == 5.0);
    CHECK(c10.g_t == 0.0);  // the RHI model carries no T current

    CHECK(cell_registry(1).c_m == 0.29);
    CHECK(cell_registry(4).c_m == 0.14);
    CHECK(cell_registry(4).g_m == 0.0);
    CHECK(cell_registry(3).e_leak == -56.2);
    CHECK(cell_registry(8).v_t == -58.0);

    CHECK(reference_stimulus(1) == 1.4);
    CHECK(reference_stimulus(8) == 2.25);
    CHECK(reference_stimulus(10) == 0.20);
}

TEST_CASE("family structure invariants") {
    for (const CellParams& p : all_cells()) {
        switch (p.family) {
            case Family::tcr:
                CHECK(p.g_t > 0.0);
                CHECK(p.g_m == 0.0);
                CHECK(p.g_ca == 0.0);
                break;
            case Family::rhi:
                CHECK(p.g_leak > 0.0);
                CHECK(p.g_na > 0.0);
                CHECK(p.g_k > 0.0);
                CHECK(p.g_m == 0.0);
                CHECK(p.g_ca == 0.0);
                CHECK(p.g_t == 0.0);
                break;
            case Family::neocortical:
                CHECK(p.g_t == 0.0);
                break;
        }
    }
}

TEST_CASE("gate layouts per cell") {
    CHECK(gate_names(cell_registry(4)) == std::vector<std::string>{"m", "h", "n"});
    CHECK(gate_names(cell_registry(1)) == std::vector<std::string>{"m", "h", "n", "p"});
    CHECK(gate_names(cell_registry(6)) ==
          std::vector<std::string>{"m", "h", "n", "p", "q", "r"});
    CHECK(gate_names(cell_registry(9)) == std::vector<std::string>{"h", "r"});
    CHECK(gate_names(cell_registry(10)) == std::vector<std::string>{"h", "n"});
}

TEST_CASE("zero driving force kills the sodium current") {
    for (int id : {1, 9, 10}) {
        const CellParams& p = cell_registry(id);
        CellState s = steady_state_at(p, p.e_na);
        for (std::size_t i = 0; i < s.gate_count; ++i) s.gates[i] = 0.5;
        CHECK(ionic_currents(s, p).i_na == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("fully open sodium channel at unit driving force") {
    const CellParams& p = cell_registry(1);
    CellState s = steady_state_at(p, p.e_na + 1.0);
    s.gates[0] = 1.0;  // m
    s.gates[1] = 1.0;  // h
    CHECK(ionic_currents(s, p).i_na == Approx(p.g_na));
}

TEST_CASE("TCR potassium uses the fourth power of 0.75(1-h)") {
    const CellParams& p = cell_registry(9);
    CellState s;
    s.gate_count = 2;
    s.v = 0.0;
    s.gates[0] = 0.5;  // h
    s.gates[1] = 0.0;  // r
    const double nk = 0.75 * 0.5;
    CHECK(ionic_currents(s, p).i_k == Approx(p.g_k * nk * nk * nk * nk * (0.0 - p.e_k)));
}

TEST_CASE("absent channels contribute exactly zero current") {
    Lcg rng;
    for (int id : {4, 9, 10}) {
        const CellParams& p = cell_registry(id);
        for (int trial = 0; trial < 20; ++trial) {
            const CurrentBreakdown c = ionic_currents(random_state(p, rng), p);
            if (p.g_m == 0.0) CHECK(c.i_m == 0.0);
            if (p.g_ca == 0.0) CHECK(c.i_ca == 0.0);
            if (p.g_t == 0.0) CHECK(c.i_t == 0.0);
        }
    }
}

TEST_CASE("current-sum identity at arbitrary states") {
    Lcg rng;
    for (const CellParams& p : all_cells()) {
        for (int trial = 0; trial < 50; ++trial) {
            const CellState s = random_state(p, rng);
            const double i_stim = -2.0 + 6.0 * rng.next();
            CurrentBreakdown c;
            const StateDerivative d = state_derivative(s, p, i_stim, 1.0, &c);
            const double residual = p.c_m * d.dv + c.total() - i_stim;
            REQUIRE(std::fabs(residual) < 1e-10 * std::max(1.0, std::fabs(c.total())));
        }
    }
}

TEST_CASE("stimulus enters the voltage equation linearly") {
    const CellParams& p = cell_registry(6);
    Lcg rng;
    const CellState s = random_state(p, rng);
    const double delta = 0.37;
    const StateDerivative d0 = state_derivative(s, p, 1.0, 1.0);
    const StateDerivative d1 = state_derivative(s, p, 1.0 + delta, 1.0);
    CHECK(d1.dv - d0.dv == Approx(delta / p.c_m));
    for (std::size_t i = 0; i < s.gate_count; ++i) CHECK(d1.dgates[i] == d0.dgates[i]);
}

TEST_CASE("currents balance at rest with zero input") {
    const CellParams& p = cell_registry(9);
    const RestingState r = resting_state(p);
    REQUIRE(r.converged);
    CHECK(std::fabs(ionic_currents(r.state, p).total()) < 1e-5);
}

TEST_CASE("resting state converges for every cell") {
    for (const CellParams& p : all_cells()) {
        const RestingState r = resting_state(p);
        INFO("cell " << p.cell_id);
        CHECK(r.converged);
        CHECK(r.residual < 1e-6);
        // at the fixed point every gate is at its steady value for V_rest;
        // the margin reflects tol times the slowest gate time constant
        const CellState ss = steady_state_at(p, r.state.v);
        for (std::size_t i = 0; i < ss.gate_count; ++i)
            CHECK(r.state.gates[i] == Approx(ss.gates[i]).margin(1e-3));
    }
}

TEST_CASE("resting state is independent of the starting voltage") {
    for (int id : {1, 9, 10}) {
        const CellParams& p = cell_registry(id);
        const RestingState a = resting_state(p, 1e-6, 0.01, -80.0);
        const RestingState b = resting_state(p, 1e-6, 0.01, -60.0);
        REQUIRE(a.converged);
        REQUIRE(b.converged);
        CHECK(a.state.v == Approx(b.state.v).margin(1e-3));
    }
}

TEST_CASE("cell 1 rests near its leak potential") {
    const RestingState r = resting_state(cell_registry(1));
    REQUIRE(r.converged);
    // golden value from a 3-second zero-input relaxation; the M current
    // holds V a fraction of a millivolt below E_leak
    CHECK(r.state.v == Approx(-70.3876).margin(0.01));
    CHECK(r.state.v > -72.0);
    CHECK(r.state.v < -69.0);
}

TEST_CASE("resting_state rejects a non-positive tolerance") {
    CHECK_THROWS_AS(resting_state(cell_registry(1), 0.0), std::invalid_argument);
}

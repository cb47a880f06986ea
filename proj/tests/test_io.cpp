#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "hhe/io.hpp"

using namespace hhe;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("numbers are written with six significant digits") {
    CHECK(format_number(0.123456789) == "0.123457");
    CHECK(format_number(123456.789) == "123457");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-70.42) == "-70.42");
    CHECK(format_number(1e-7) == "1e-07");
}

TEST_CASE("trace CSV carries the fixed header with the cell's gates") {
    Protocol proto;
    proto.i_stim = 0.44;
    proto.duration_ms = 5.0;
    const Trace tr = integrate(cell_registry(9), proto);
    std::ostringstream os;
    write_trace_csv(os, tr);
    const auto lines = lines_of(os.str());
    REQUIRE_FALSE(lines.empty());
    CHECK(lines[0] == "t_ms,V_mV,h,r,I_l,I_Na,I_K,I_M,I_L,I_T,E_rate_nW");
    CHECK(lines.size() == tr.size() + 1);

    // neocortical cell exposes its own gate set
    const Trace tr6 = integrate(cell_registry(6), proto);
    std::ostringstream os6;
    write_trace_csv(os6, tr6);
    CHECK(lines_of(os6.str())[0] == "t_ms,V_mV,m,h,n,p,q,r,I_l,I_Na,I_K,I_M,I_L,I_T,E_rate_nW");
}

TEST_CASE("trace CSV output is deterministic") {
    Protocol proto;
    proto.i_stim = 1.4;
    proto.duration_ms = 20.0;
    const Trace tr = integrate(cell_registry(1), proto);
    std::ostringstream a, b;
    write_trace_csv(a, tr);
    write_trace_csv(b, tr);
    CHECK(a.str() == b.str());
}

TEST_CASE("report CSV row layout") {
    Protocol proto;
    proto.i_stim = reference_stimulus(9);
    proto.duration_ms = 1500.0;
    const EnergyReport r = energy_report(9, proto);
    std::ostringstream os;
    os << report_csv_header() << '\n';
    write_report_csv_row(os, r);
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].rfind("cell_id,stimulus_uA_cm2,temperature_C,frequency_Hz", 0) == 0);
    // same comma count in header and row
    const auto commas = [](const std::string& s) {
        return std::count(s.begin(), s.end(), ',');
    };
    CHECK(commas(lines[0]) == commas(lines[1]));
    CHECK(lines[1].rfind("9,0.44,36,", 0) == 0);
}

TEST_CASE("report JSON carries the named fields") {
    Protocol proto;
    proto.i_stim = reference_stimulus(9);
    proto.duration_ms = 1500.0;
    const EnergyReport r = energy_report(9, proto);
    const auto j = report_to_json(r);
    CHECK(j.at("cell_id") == 9);
    CHECK(j.contains("na_load_nC_cm2"));
    CHECK(j.contains("atp_hydrolysis_kJ_mol"));
    CHECK(j.contains("relative_difference"));
    CHECK(j.contains("q_min_capacitive_estimate_nC_cm2"));
    CHECK(j.at("frequency_Hz").get<double>() == r.mean_frequency_hz);
}

TEST_CASE("registry JSON lists parameters and gates") {
    const auto j = cell_to_json(cell_registry(9));
    CHECK(j.at("family") == "TCR");
    CHECK(j.at("g_Na_mS_cm2") == 3.0);
    CHECK(j.at("E_T_mV") == 0.0);
    CHECK(j.at("reference_stimulus_uA_cm2") == 0.44);
    CHECK(j.at("gates") == nlohmann::ordered_json::array({"h", "r"}));
}

TEST_CASE("sweep CSV layout and empty observables for failed points") {
    SweepConfig cfg;
    cfg.duration_ms = 1200.0;
    cfg.jobs = 1;
    const SweepGrid g = run_sweep(9, {36.0}, {0.05, 0.44}, cfg);
    std::ostringstream os;
    write_sweep_csv(os, g);
    const auto lines = lines_of(os.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "cell_id,temp_C,stim_uA_cm2,freq_Hz,ionic_nJ,metabolic_nJ,"
          "hydrolysis_kJ_mol,overlap_nC,status");
    CHECK(lines[1] == "9,36,0.05,,,,,,no-spikes");
    CHECK(lines[2].rfind("9,36,0.44,", 0) == 0);
    CHECK(lines[2].find(",ok") != std::string::npos);
}

TEST_CASE("sweep JSON uses null for unavailable points") {
    SweepConfig cfg;
    cfg.duration_ms = 1200.0;
    cfg.jobs = 1;
    const SweepGrid g = run_sweep(9, {36.0}, {0.05, 0.44}, cfg);
    const auto j = sweep_to_json(g);
    CHECK(j.at("ionic_energy_nJ_cm2")[0][0].is_null());
    CHECK(j.at("ionic_energy_nJ_cm2")[0][1].is_number());
    CHECK(j.at("status")[0][0] == "no-spikes");
    CHECK(j.at("temperature_C") == nlohmann::ordered_json::array({36.0}));
}

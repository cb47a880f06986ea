#pragma once

// CSV and JSON serialization of traces, reports, sweep grids and the cell
// registry. All numbers are written with 6 significant digits so identical
// inputs always produce byte-identical files.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hhe/sweep.hpp"

namespace hhe {

inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// Trace CSV; absent channels emit zero columns to keep one fixed header.
inline void write_trace_csv(std::ostream& os, const Trace& tr) {
    os << "t_ms,V_mV";
    for (const auto& g : tr.gate_labels) os << ',' << g;
    os << ",I_l,I_Na,I_K,I_M,I_L,I_T,E_rate_nW\n";
    for (std::size_t i = 0; i < tr.size(); ++i) {
        os << format_number(tr.time_ms[i]) << ',' << format_number(tr.v_mv[i]);
        for (const auto& g : tr.gates) os << ',' << format_number(g[i]);
        os << ',' << format_number(tr.i_leak[i]) << ',' << format_number(tr.i_na[i])
           << ',' << format_number(tr.i_k[i]) << ',' << format_number(tr.i_m[i])
           << ',' << format_number(tr.i_ca[i]) << ',' << format_number(tr.i_t[i])
           << ',' << format_number(tr.energy_rate_nw[i]) << '\n';
    }
}

inline const char* report_csv_header() {
    return "cell_id,stimulus_uA_cm2,temperature_C,frequency_Hz,"
           "na_load_nC_cm2,k_load_nC_cm2,capacitive_minimum_nC_cm2,overlap_load_nC_cm2,"
           "charge_separation,atp_pmol_cm2,metabolic_energy_nJ_cm2,ionic_energy_nJ_cm2,"
           "atp_hydrolysis_kJ_mol,relative_difference,q_min_capacitive_estimate_nC_cm2";
}

inline void write_report_csv_row(std::ostream& os, const EnergyReport& r) {
    os << r.cell_id << ',' << format_number(r.stimulus_ua_cm2) << ','
       << format_number(r.temperature_c) << ',' << format_number(r.mean_frequency_hz) << ','
       << format_number(r.q_na_nc) << ',' << format_number(r.q_k_nc) << ','
       << format_number(r.q_min_nc) << ',' << format_number(r.q_overlap_nc) << ','
       << format_number(r.charge_separation) << ',' << format_number(r.atp_pmol) << ','
       << format_number(r.metabolic_energy_nj) << ',' << format_number(r.ionic_energy_nj)
       << ',' << format_number(r.hydrolysis_kj_mol) << ','
       << format_number(r.relative_difference()) << ','
       << format_number(r.q_min_capacitive_nc) << '\n';
}

inline nlohmann::ordered_json report_to_json(const EnergyReport& r) {
    return nlohmann::ordered_json{
        {"cell_id", r.cell_id},
        {"stimulus_uA_cm2", r.stimulus_ua_cm2},
        {"temperature_C", r.temperature_c},
        {"frequency_Hz", r.mean_frequency_hz},
        {"spike_count", r.spike_count},
        {"na_load_nC_cm2", r.q_na_nc},
        {"k_load_nC_cm2", r.q_k_nc},
        {"capacitive_minimum_nC_cm2", r.q_min_nc},
        {"overlap_load_nC_cm2", r.q_overlap_nc},
        {"charge_separation", r.charge_separation},
        {"atp_pmol_cm2", r.atp_pmol},
        {"metabolic_energy_nJ_cm2", r.metabolic_energy_nj},
        {"ionic_energy_nJ_cm2", r.ionic_energy_nj},
        {"atp_hydrolysis_kJ_mol", r.hydrolysis_kj_mol},
        {"f_atp_kJ_mol", r.f_atp_kj_mol},
        {"relative_difference", r.relative_difference()},
        {"q_min_capacitive_estimate_nC_cm2", r.q_min_capacitive_nc},
    };
}

inline nlohmann::ordered_json cell_to_json(const CellParams& p) {
    return nlohmann::ordered_json{
        {"cell_id", p.cell_id},
        {"family", to_string(p.family)},
        {"label", std::string(p.label)},
        {"C_uF_cm2", p.c_m},
        {"g_leak_mS_cm2", p.g_leak},
        {"g_Na_mS_cm2", p.g_na},
        {"g_K_mS_cm2", p.g_k},
        {"g_M_mS_cm2", p.g_m},
        {"g_L_mS_cm2", p.g_ca},
        {"g_T_mS_cm2", p.g_t},
        {"E_leak_mV", p.e_leak},
        {"E_Na_mV", p.e_na},
        {"E_K_mV", p.e_k},
        {"E_Ca_mV", p.e_ca},
        {"E_T_mV", p.e_t},
        {"V_T_mV", p.v_t},
        {"tau_max_ms", p.tau_max},
        {"phi", p.phi},
        {"V_x_mV", p.v_x},
        {"reference_stimulus_uA_cm2", reference_stimulus(p.cell_id)},
        {"gates", gate_names(p)},
    };
}

// Long-format sweep CSV, one row per grid point.
inline void write_sweep_csv(std::ostream& os, const SweepGrid& g, bool header = true) {
    if (header)
        os << "cell_id,temp_C,stim_uA_cm2,freq_Hz,ionic_nJ,metabolic_nJ,"
              "hydrolysis_kJ_mol,overlap_nC,status\n";
    for (std::size_t ti = 0; ti < g.n_temp(); ++ti) {
        for (std::size_t si = 0; si < g.n_stim(); ++si) {
            const std::size_t i = g.index(ti, si);
            os << g.cell_id << ',' << format_number(g.temperature_c[ti]) << ','
               << format_number(g.stimulus_ua[si]) << ',';
            if (g.status[i] == PointStatus::ok) {
                os << format_number(g.frequency_hz[i]) << ','
                   << format_number(g.ionic_energy_nj[i]) << ','
                   << format_number(g.metabolic_energy_nj[i]) << ','
                   << format_number(g.hydrolysis_kj_mol[i]) << ','
                   << format_number(g.overlap_load_nc[i]);
            } else {
                os << ",,,,";
            }
            os << ',' << to_string(g.status[i]) << '\n';
        }
    }
}

// Dense JSON: one matrix per observable, rows indexed by temperature.
inline nlohmann::ordered_json sweep_to_json(const SweepGrid& g) {
    auto matrix = [&](const std::vector<double>& flat) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t ti = 0; ti < g.n_temp(); ++ti) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (std::size_t si = 0; si < g.n_stim(); ++si) {
                const std::size_t i = g.index(ti, si);
                if (g.status[i] == PointStatus::ok)
                    row.push_back(flat[i]);
                else
                    row.push_back(nullptr);
            }
            rows.push_back(std::move(row));
        }
        return rows;
    };
    nlohmann::ordered_json status_rows = nlohmann::ordered_json::array();
    for (std::size_t ti = 0; ti < g.n_temp(); ++ti) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (std::size_t si = 0; si < g.n_stim(); ++si)
            row.push_back(to_string(g.status[g.index(ti, si)]));
        status_rows.push_back(std::move(row));
    }
    return nlohmann::ordered_json{
        {"cell_id", g.cell_id},
        {"temperature_C", g.temperature_c},
        {"stimulus_uA_cm2", g.stimulus_ua},
        {"frequency_Hz", matrix(g.frequency_hz)},
        {"ionic_energy_nJ_cm2", matrix(g.ionic_energy_nj)},
        {"metabolic_energy_nJ_cm2", matrix(g.metabolic_energy_nj)},
        {"atp_hydrolysis_kJ_mol", matrix(g.hydrolysis_kj_mol)},
        {"overlap_load_nC_cm2", matrix(g.overlap_load_nc)},
        {"status", status_rows},
    };
}

}  // namespace hhe

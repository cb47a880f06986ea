#pragma once

// Energy accounting for spike trains, by two routes:
//  - electrochemical: the channel energy rate E_cell = sum g·gating·(V-E)²
//    integrated per spike,
//  - ion counting: Na⁺ load -> ATP moles (3 Na⁺ per ATP) -> free energy.
// Plus the Na⁺/K⁺ overlap decomposition and charge separation.
//
// Per-spike quantities integrate over the analysis window carried by the
// SpikeTrain and divide by spike count. The potassium side of the loads and
// of the overlap decomposition is the delayed-rectifier I_K alone; the slow
// I_M enters E_cell but not the per-spike loads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "hhe/integrator.hpp"

namespace hhe {

inline constexpr double kElementaryChargeC = 1.602e-19;
inline constexpr double kAvogadro = 6.022e23;
inline constexpr double kDefaultFAtpKjPerMol = 50.0;
// physiological range for the free energy of ATP hydrolysis
inline constexpr double kFAtpRangeLo = 46.0;
inline constexpr double kFAtpRangeHi = 62.0;

struct NoSpikesError : std::domain_error {
    explicit NoSpikesError(const std::string& what) : std::domain_error(what) {}
};

// Instantaneous channel dissipation E_cell in nW/cm²; non-negative for any
// state with gates in [0,1].
inline double channel_energy_rate(const CellState& s, const CellParams& p) {
    return detail::energy_rate_from_currents(ionic_currents(s, p), p, s.v);
}

// Total electrochemical energy rate dH/dt = V·I_stim - E_cell, nW/cm².
inline double total_energy_rate(const CellState& s, const CellParams& p, double i_stim) {
    return s.v * i_stim - channel_energy_rate(s, p);
}

namespace detail {

inline std::size_t window_start_index(const Trace& tr, double window_begin_ms) {
    const auto i = static_cast<long long>(std::llround(window_begin_ms / tr.dt_ms));
    return static_cast<std::size_t>(std::clamp<long long>(
        i, 0, static_cast<long long>(tr.size()) - 1));
}

// Trapezoidal integral of f(sample) over [i0, last sample], dt-spaced.
template <typename F>
inline double trapezoid_over_window(const Trace& tr, std::size_t i0, F&& f) {
    const std::size_t n = tr.size();
    if (n - i0 < 2) return 0.0;
    double sum = 0.5 * (f(i0) + f(n - 1));
    for (std::size_t i = i0 + 1; i + 1 < n; ++i) sum += f(i);
    return sum * tr.dt_ms;
}

inline void require_spikes(const SpikeTrain& spikes, const char* op) {
    if (spikes.count() == 0)
        throw NoSpikesError(std::string(op) + ": no spikes in the analysis window, "
                            "per-spike quantity undefined");
}

}  // namespace detail

// Na⁺ charge moved per action potential: integral of |I_Na| over the window
// divided by spike count. µA/cm²·ms == nC/cm².
inline double sodium_load(const Trace& tr, const SpikeTrain& spikes) {
    detail::require_spikes(spikes, "sodium_load");
    const std::size_t i0 = detail::window_start_index(tr, spikes.window_begin_ms);
    const double q = detail::trapezoid_over_window(
        tr, i0, [&](std::size_t i) { return std::fabs(tr.i_na[i]); });
    return q / static_cast<double>(spikes.count());
}

// K⁺ charge per action potential from the delayed rectifier.
inline double potassium_load(const Trace& tr, const SpikeTrain& spikes) {
    detail::require_spikes(spikes, "potassium_load");
    const std::size_t i0 = detail::window_start_index(tr, spikes.window_begin_ms);
    const double q = detail::trapezoid_over_window(
        tr, i0, [&](std::size_t i) { return std::fabs(tr.i_k[i]); });
    return q / static_cast<double>(spikes.count());
}

struct OverlapDecomposition {
    double q_min = 0.0;      // Na⁺ not balanced by simultaneous K⁺ efflux, nC/cm²
    double q_overlap = 0.0;  // Na⁺ neutralized by concurrent K⁺, nC/cm²
};

// Pointwise split of the sodium load: overlap = min(|I_Na|, I_K⁺),
// minimum = |I_Na| - overlap, each integrated per spike. By construction
// q_min + q_overlap equals sodium_load.
inline OverlapDecomposition overlap_decomposition(const Trace& tr, const SpikeTrain& spikes) {
    detail::require_spikes(spikes, "overlap_decomposition");
    const std::size_t i0 = detail::window_start_index(tr, spikes.window_begin_ms);
    auto outward_k = [&](std::size_t i) { return std::max(tr.i_k[i], 0.0); };
    const double overlap = detail::trapezoid_over_window(tr, i0, [&](std::size_t i) {
        return std::min(std::fabs(tr.i_na[i]), outward_k(i));
    });
    const double minimum = detail::trapezoid_over_window(tr, i0, [&](std::size_t i) {
        return std::fabs(tr.i_na[i]) - std::min(std::fabs(tr.i_na[i]), outward_k(i));
    });
    const auto n = static_cast<double>(spikes.count());
    return {minimum / n, overlap / n};
}

// Fraction of sodium entry used for depolarization, in [0,1].
inline double charge_separation(double q_min, double q_na) {
    if (!(q_na > 0.0))
        throw std::domain_error("charge_separation: undefined for Q_Na <= 0");
    return q_min / q_na;
}

// ATP demand of the 3:2 Na⁺/K⁺ pump for a sodium load in nC/cm², as pmol/cm².
inline double atp_moles(double q_na_nc) {
    if (q_na_nc < 0.0) throw std::domain_error("atp_moles: negative sodium load");
    return q_na_nc * 1e3 / (3.0 * kElementaryChargeC * kAvogadro);
}

// pmol/cm² × kJ/mol -> nJ/cm² (the units cancel to an exact product).
inline double metabolic_energy(double atp_pmol, double f_atp_kj_mol = kDefaultFAtpKjPerMol) {
    return atp_pmol * f_atp_kj_mol;
}

// Integral of the channel energy rate over the window per spike;
// nW/cm²·ms = pJ/cm², returned as nJ/cm².
inline double ionic_energy_per_spike(const Trace& tr, const SpikeTrain& spikes) {
    detail::require_spikes(spikes, "ionic_energy_per_spike");
    const std::size_t i0 = detail::window_start_index(tr, spikes.window_begin_ms);
    const double pj = detail::trapezoid_over_window(
        tr, i0, [&](std::size_t i) { return tr.energy_rate_nw[i]; });
    return pj / static_cast<double>(spikes.count()) / 1000.0;
}

// Effective free energy of ATP hydrolysis implied by the two accounting
// routes: ionic energy per ATP mole, in kJ/mol.
inline double hydrolysis_free_energy(double ionic_energy_nj, double atp_pmol) {
    if (!(atp_pmol > 0.0))
        throw std::domain_error("hydrolysis_free_energy: undefined for zero ATP");
    return ionic_energy_nj / atp_pmol;
}

// One row of the per-cell energy accounting table.
struct EnergyReport {
    int cell_id = 0;
    double stimulus_ua_cm2 = 0.0;
    double temperature_c = kReferenceTemperatureC;
    double f_atp_kj_mol = kDefaultFAtpKjPerMol;

    std::size_t spike_count = 0;
    double mean_frequency_hz = 0.0;
    double q_na_nc = 0.0;       // per spike
    double q_k_nc = 0.0;
    double q_min_nc = 0.0;
    double q_overlap_nc = 0.0;
    double charge_separation = 0.0;
    double atp_pmol = 0.0;
    double metabolic_energy_nj = 0.0;  // ion-counting route
    double ionic_energy_nj = 0.0;      // energy-function route
    double hydrolysis_kj_mol = 0.0;

    // Rough alternative to the pointwise q_min: capacitive charge C·(mean
    // spike peak - V_rest). Diagnostic output only.
    double q_min_capacitive_nc = 0.0;

    double relative_difference() const {
        return std::fabs(metabolic_energy_nj - ionic_energy_nj) / ionic_energy_nj;
    }
};

namespace detail {

inline double capacitive_q_min(const Trace& tr, const SpikeTrain& spikes,
                               const CellParams& p) {
    if (spikes.count() == 0 || tr.size() == 0) return 0.0;
    double peak_sum = 0.0;
    for (std::size_t s = 0; s < spikes.count(); ++s) {
        const std::size_t i0 = window_start_index(tr, spikes.times_ms[s]);
        const double t_end = s + 1 < spikes.count() ? spikes.times_ms[s + 1]
                                                    : spikes.window_end_ms;
        const std::size_t i1 = window_start_index(tr, std::min(t_end, spikes.times_ms[s] + 20.0));
        double peak = tr.v_mv[i0];
        for (std::size_t i = i0; i <= i1 && i < tr.size(); ++i)
            peak = std::max(peak, tr.v_mv[i]);
        peak_sum += peak;
    }
    const double mean_peak = peak_sum / static_cast<double>(spikes.count());
    return p.c_m * (mean_peak - tr.v_mv.front());  // µF/cm²·mV == nC/cm²
}

}  // namespace detail

// Full analysis of an already-computed trace.
inline EnergyReport analyze_trace(const Trace& tr, const SpikeTrain& spikes,
                                  const CellParams& params,
                                  double f_atp = kDefaultFAtpKjPerMol) {
    if (spikes.count() == 0)
        throw NoSpikesError("energy_report: cell " + std::to_string(params.cell_id) +
                            " produced no spikes at stimulus " +
                            std::to_string(tr.i_stim) + " µA/cm², " +
                            std::to_string(tr.temperature_c) + " degC");
    EnergyReport r;
    r.cell_id = params.cell_id;
    r.stimulus_ua_cm2 = tr.i_stim;
    r.temperature_c = tr.temperature_c;
    r.f_atp_kj_mol = f_atp;
    r.spike_count = spikes.count();
    r.mean_frequency_hz = mean_frequency(spikes);
    r.q_na_nc = sodium_load(tr, spikes);
    r.q_k_nc = potassium_load(tr, spikes);
    const OverlapDecomposition d = overlap_decomposition(tr, spikes);
    r.q_min_nc = d.q_min;
    r.q_overlap_nc = d.q_overlap;
    r.charge_separation = charge_separation(r.q_min_nc, r.q_na_nc);
    r.atp_pmol = atp_moles(r.q_na_nc);
    r.metabolic_energy_nj = metabolic_energy(r.atp_pmol, f_atp);
    r.ionic_energy_nj = ionic_energy_per_spike(tr, spikes);
    r.hydrolysis_kj_mol = hydrolysis_free_energy(r.ionic_energy_nj, r.atp_pmol);
    r.q_min_capacitive_nc = detail::capacitive_q_min(tr, spikes, params);
    return r;
}

// Simulate one cell under the protocol and assemble its report.
inline EnergyReport energy_report(int cell_id, const Protocol& protocol,
                                  double f_atp = kDefaultFAtpKjPerMol,
                                  const CellState* initial = nullptr) {
    const CellParams& params = cell_registry(cell_id);
    const Trace tr = integrate(params, protocol, initial);
    const SpikeTrain spikes = detect_spikes(tr);
    return analyze_trace(tr, spikes, params, f_atp);
}

}  // namespace hhe

#pragma once

// Temperature × stimulus grid evaluation. Grid points are independent work
// items executed by a small thread pool; every worker writes into its own
// pre-sized slot, so scheduling order cannot change the result.

#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hhe/energetics.hpp"

namespace hhe {

enum class PointStatus { ok, no_spikes, integration_failure };

inline const char* to_string(PointStatus s) {
    switch (s) {
        case PointStatus::ok: return "ok";
        case PointStatus::no_spikes: return "no-spikes";
        case PointStatus::integration_failure: return "integration-failure";
    }
    return "?";
}

enum class Observable { frequency, ionic_energy, metabolic_energy, hydrolysis, overlap_load };

// Observables over a (temperature, stimulus) grid for one cell.
// Arrays are row-major: index = temperature_index * n_stim + stimulus_index.
struct SweepGrid {
    int cell_id = 0;
    std::vector<double> temperature_c;   // strictly increasing axis
    std::vector<double> stimulus_ua;     // strictly increasing axis

    std::vector<double> frequency_hz;
    std::vector<double> ionic_energy_nj;
    std::vector<double> metabolic_energy_nj;
    std::vector<double> hydrolysis_kj_mol;
    std::vector<double> overlap_load_nc;
    std::vector<PointStatus> status;

    std::size_t n_temp() const { return temperature_c.size(); }
    std::size_t n_stim() const { return stimulus_ua.size(); }
    std::size_t index(std::size_t ti, std::size_t si) const { return ti * n_stim() + si; }

    double observable(Observable obs, std::size_t ti, std::size_t si) const {
        const std::size_t i = index(ti, si);
        switch (obs) {
            case Observable::frequency: return frequency_hz[i];
            case Observable::ionic_energy: return ionic_energy_nj[i];
            case Observable::metabolic_energy: return metabolic_energy_nj[i];
            case Observable::hydrolysis: return hydrolysis_kj_mol[i];
            case Observable::overlap_load: return overlap_load_nc[i];
        }
        throw std::invalid_argument("unknown observable");
    }
};

struct SweepConfig {
    double duration_ms = 4000.0;
    double dt_ms = 0.01;
    double transient_ms = 0.0;
    double f_atp_kj_mol = kDefaultFAtpKjPerMol;
    unsigned jobs = 0;  // 0 = hardware concurrency
};

// Default axes: 20-40 degC in 1-degree steps, 2.25-10 µA/cm² in 0.25 steps.
inline std::vector<double> default_temperature_axis() {
    std::vector<double> v;
    for (int i = 20; i <= 40; ++i) v.push_back(static_cast<double>(i));
    return v;
}

inline std::vector<double> default_stimulus_axis() {
    std::vector<double> v;
    for (int i = 0; i <= 31; ++i) v.push_back(2.25 + 0.25 * static_cast<double>(i));
    return v;
}

namespace detail {

inline unsigned resolve_jobs(unsigned jobs) {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Run fn(i) for i in [0, n) on `jobs` threads, work-stealing by atomic index.
template <typename Fn>
inline void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    jobs = resolve_jobs(jobs);
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const unsigned n_threads = static_cast<unsigned>(
        std::min<std::size_t>(jobs, n));
    pool.reserve(n_threads);
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

inline void validate_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw std::invalid_argument(std::string("sweep: empty ") + name + " axis");
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (!(axis[i] > axis[i - 1]))
            throw std::invalid_argument(std::string("sweep: ") + name +
                                        " axis must be strictly increasing");
}

}  // namespace detail

// Evaluate the energy report at every (temperature, stimulus) grid point.
// Failures are recorded per point and never abort the grid.
inline SweepGrid run_sweep(int cell_id, std::vector<double> temperature_axis,
                           std::vector<double> stimulus_axis,
                           const SweepConfig& cfg = {}) {
    detail::validate_axis(temperature_axis, "temperature");
    detail::validate_axis(stimulus_axis, "stimulus");
    for (double t : temperature_axis) temperature_factor(t);  // range check up front
    cell_registry(cell_id);

    SweepGrid grid;
    grid.cell_id = cell_id;
    grid.temperature_c = std::move(temperature_axis);
    grid.stimulus_ua = std::move(stimulus_axis);
    const std::size_t n = grid.n_temp() * grid.n_stim();
    const double nan = std::nan("");
    grid.frequency_hz.assign(n, nan);
    grid.ionic_energy_nj.assign(n, nan);
    grid.metabolic_energy_nj.assign(n, nan);
    grid.hydrolysis_kj_mol.assign(n, nan);
    grid.overlap_load_nc.assign(n, nan);
    grid.status.assign(n, PointStatus::integration_failure);

    // the quiescent start is protocol-independent; relax it once per cell
    const CellState rest = resting_state(cell_registry(cell_id)).state;

    detail::parallel_for(n, cfg.jobs, [&](std::size_t i) {
        const std::size_t ti = i / grid.n_stim();
        const std::size_t si = i % grid.n_stim();
        Protocol proto;
        proto.i_stim = grid.stimulus_ua[si];
        proto.temperature_c = grid.temperature_c[ti];
        proto.duration_ms = cfg.duration_ms;
        proto.dt_ms = cfg.dt_ms;
        proto.transient_ms = cfg.transient_ms;
        try {
            const EnergyReport r = energy_report(cell_id, proto, cfg.f_atp_kj_mol, &rest);
            grid.frequency_hz[i] = r.mean_frequency_hz;
            grid.ionic_energy_nj[i] = r.ionic_energy_nj;
            grid.metabolic_energy_nj[i] = r.metabolic_energy_nj;
            grid.hydrolysis_kj_mol[i] = r.hydrolysis_kj_mol;
            grid.overlap_load_nc[i] = r.q_overlap_nc;
            grid.status[i] = PointStatus::ok;
        } catch (const NoSpikesError&) {
            grid.status[i] = PointStatus::no_spikes;
        } catch (const IntegrationError&) {
            grid.status[i] = PointStatus::integration_failure;
        }
    });
    return grid;
}

// Ratio observable(a)/observable(b); both points must have evaluated ok.
inline double fold_change(const SweepGrid& grid, Observable obs,
                          std::size_t ti_a, std::size_t si_a,
                          std::size_t ti_b, std::size_t si_b) {
    if (grid.status[grid.index(ti_a, si_a)] != PointStatus::ok ||
        grid.status[grid.index(ti_b, si_b)] != PointStatus::ok)
        throw std::domain_error("fold_change: undefined, a grid point did not evaluate ok");
    return grid.observable(obs, ti_a, si_a) / grid.observable(obs, ti_b, si_b);
}

// Index of the axis entry matching `value` within half a grid step.
inline std::size_t axis_index(const std::vector<double>& axis, double value) {
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        const double d = std::fabs(axis[i] - value);
        if (d < best_d) { best_d = d; best = i; }
    }
    const double step = axis.size() > 1 ? axis[1] - axis[0] : 1.0;
    if (best_d > 0.5 * step)
        throw std::invalid_argument("axis value " + std::to_string(value) + " not on the grid");
    return best;
}

}  // namespace hhe

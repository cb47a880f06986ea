// Command-line front end: list the cell registry, run single simulations,
// produce per-cell energy reports, run temperature/stimulus sweeps and
// verify the build against the embedded reference values.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 verification failure.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hhe/acceptance.hpp"
#include "hhe/hhe.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

std::vector<int> parse_cells(const std::string& sel) {
    if (sel == "all") {
        std::vector<int> ids;
        for (int i = 1; i <= 10; ++i) ids.push_back(i);
        return ids;
    }
    std::vector<int> ids;
    std::stringstream ss(sel);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t pos = 0;
        const int id = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("bad cell selector '" + tok + "'");
        hhe::cell_registry(id);  // validates range
        ids.push_back(id);
    }
    if (ids.empty()) throw std::invalid_argument("empty cell selection");
    return ids;
}

// "lo:hi[:step]" or a single value
std::vector<double> parse_axis(const std::string& text, double default_step) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
    if (parts.size() == 1) return {parts[0]};
    if (parts.size() > 3) throw std::invalid_argument("bad range '" + text + "'");
    const double lo = parts[0], hi = parts[1];
    const double step = parts.size() == 3 ? parts[2] : default_step;
    if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
    if (hi < lo) throw std::invalid_argument("range '" + text + "' is empty");
    std::vector<double> values;
    for (int i = 0;; ++i) {
        const double v = lo + step * i;
        if (v > hi + 1e-9) break;
        values.push_back(v);
    }
    return values;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
    return file;
}

void warn_fatp(double f_atp) {
    if (!(f_atp > 0.0))
        throw std::invalid_argument("F_ATP must be positive");
    if (f_atp < hhe::kFAtpRangeLo || f_atp > hhe::kFAtpRangeHi)
        std::cerr << "warning: F_ATP = " << f_atp << " kJ/mol lies outside the "
                  << "physiological range [" << hhe::kFAtpRangeLo << ", "
                  << hhe::kFAtpRangeHi << "]\n";
}

struct ProtocolFlags {
    std::optional<double> stim;
    double temperature = 36.0;
    double duration = 4000.0;
    double dt = 0.01;
    double transient = 0.0;

    hhe::Protocol for_cell(int cell_id) const {
        hhe::Protocol p;
        p.i_stim = stim.value_or(hhe::reference_stimulus(cell_id));
        p.temperature_c = temperature;
        p.duration_ms = duration;
        p.dt_ms = dt;
        p.transient_ms = transient;
        return p;
    }
};

void add_protocol_flags(CLI::App* cmd, ProtocolFlags& f, bool with_stim = true) {
    if (with_stim)
        cmd->add_option("--stim", f.stim,
                        "stimulus current, µA/cm² (default: the cell's reference value)");
    cmd->add_option("--temp", f.temperature, "cell temperature, degC (default 36)");
    cmd->add_option("--duration", f.duration, "simulated time, ms (default 4000)");
    cmd->add_option("--dt", f.dt, "integration step, ms (default 0.01)");
    cmd->add_option("--transient", f.transient,
                    "initial span excluded from analysis, ms (default 0)");
}

int cmd_cells(const std::string& sel, const std::string& format, const std::string& out) {
    const std::vector<int> ids = parse_cells(sel);
    std::ofstream file;
    std::ostream& os = open_output(file, out);
    if (format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (int id : ids) arr.push_back(hhe::cell_to_json(hhe::cell_registry(id)));
        os << arr.dump(2) << '\n';
        return kExitOk;
    }
    if (format == "csv") {
        os << "cell_id,family,C_uF_cm2,g_leak,g_Na,g_K,g_M,g_L,g_T,"
              "E_leak,E_Na,E_K,E_Ca,E_T,V_T,tau_max,phi,reference_stimulus,label\n";
        for (int id : ids) {
            const hhe::CellParams& p = hhe::cell_registry(id);
            os << p.cell_id << ',' << hhe::to_string(p.family) << ','
               << hhe::format_number(p.c_m) << ',' << hhe::format_number(p.g_leak) << ','
               << hhe::format_number(p.g_na) << ',' << hhe::format_number(p.g_k) << ','
               << hhe::format_number(p.g_m) << ',' << hhe::format_number(p.g_ca) << ','
               << hhe::format_number(p.g_t) << ',' << hhe::format_number(p.e_leak) << ','
               << hhe::format_number(p.e_na) << ',' << hhe::format_number(p.e_k) << ','
               << hhe::format_number(p.e_ca) << ',' << hhe::format_number(p.e_t) << ','
               << hhe::format_number(p.v_t) << ',' << hhe::format_number(p.tau_max) << ','
               << hhe::format_number(p.phi) << ','
               << hhe::format_number(hhe::reference_stimulus(id)) << ",\"" << p.label
               << "\"\n";
        }
        return kExitOk;
    }
    // plain table
    os << std::left << std::setw(5) << "id" << std::setw(13) << "family" << std::setw(7)
       << "C" << std::setw(8) << "g_leak" << std::setw(7) << "g_Na" << std::setw(7)
       << "g_K" << std::setw(8) << "g_M" << std::setw(7) << "g_L" << std::setw(6)
       << "g_T" << std::setw(8) << "E_leak" << std::setw(7) << "V_T" << std::setw(9)
       << "tau_max" << std::setw(6) << "stim" << "label\n";
    for (int id : ids) {
        const hhe::CellParams& p = hhe::cell_registry(id);
        os << std::left << std::setw(5) << p.cell_id << std::setw(13)
           << hhe::to_string(p.family) << std::setw(7) << p.c_m << std::setw(8) << p.g_leak
           << std::setw(7) << p.g_na << std::setw(7) << p.g_k << std::setw(8) << p.g_m
           << std::setw(7) << p.g_ca << std::setw(6) << p.g_t << std::setw(8) << p.e_leak
           << std::setw(7) << p.v_t << std::setw(9) << p.tau_max << std::setw(6)
           << hhe::reference_stimulus(id) << p.label << '\n';
    }
    return kExitOk;
}

int cmd_simulate(int cell_id, const ProtocolFlags& flags, std::string out) {
    const hhe::Protocol proto = flags.for_cell(cell_id);
    proto.validate();
    if (out.empty()) out = "trace_cell" + std::to_string(cell_id) + ".csv";
    const hhe::CellParams& params = hhe::cell_registry(cell_id);
    const hhe::Trace tr = hhe::integrate(params, proto);
    {
        std::ofstream file(out);
        if (!file) throw std::runtime_error("cannot open output file '" + out + "'");
        hhe::write_trace_csv(file, tr);
    }
    const hhe::SpikeTrain spikes = hhe::detect_spikes(tr);
    std::cout << "cell " << cell_id << ": " << spikes.count() << " spikes in ["
              << hhe::format_number(spikes.window_begin_ms) << ", "
              << hhe::format_number(spikes.window_end_ms) << "] ms, mean frequency "
              << hhe::format_number(hhe::mean_frequency(spikes)) << " Hz\n"
              << "trace written to " << out << '\n';
    return kExitOk;
}

int cmd_report(const std::string& sel, const ProtocolFlags& flags, double f_atp,
               const std::string& format, const std::string& out, unsigned jobs) {
    warn_fatp(f_atp);
    const std::vector<int> ids = parse_cells(sel);
    std::vector<std::optional<hhe::EnergyReport>> reports(ids.size());
    std::vector<std::string> failures(ids.size());
    hhe::detail::parallel_for(ids.size(), jobs, [&](std::size_t i) {
        const hhe::Protocol proto = flags.for_cell(ids[i]);
        try {
            reports[i] = hhe::energy_report(ids[i], proto, f_atp);
        } catch (const hhe::NoSpikesError& e) {
            failures[i] = e.what();
        }
    });

    std::ofstream file;
    std::ostream& os = open_output(file, out);
    if (format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (reports[i]) {
                arr.push_back(hhe::report_to_json(*reports[i]));
            } else {
                const hhe::Protocol proto = flags.for_cell(ids[i]);
                arr.push_back(nlohmann::ordered_json{{"cell_id", ids[i]},
                                                     {"stimulus_uA_cm2", proto.i_stim},
                                                     {"temperature_C", proto.temperature_c},
                                                     {"status", "no-spikes"}});
            }
        }
        os << arr.dump(2) << '\n';
    } else {
        os << hhe::report_csv_header() << '\n';
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (reports[i]) {
                hhe::write_report_csv_row(os, *reports[i]);
            } else {
                const hhe::Protocol proto = flags.for_cell(ids[i]);
                os << ids[i] << ',' << hhe::format_number(proto.i_stim) << ','
                   << hhe::format_number(proto.temperature_c) << ",,,,,,,,,,,,\n";
                std::cerr << "note: " << failures[i] << " (row marked no-spikes)\n";
            }
        }
    }
    return kExitOk;
}

int cmd_sweep(const std::string& sel, const std::string& temp_range,
              const std::string& stim_range, double duration, double dt, double transient,
              double f_atp, const std::string& format, const std::string& out,
              unsigned jobs) {
    warn_fatp(f_atp);
    const std::vector<int> ids = parse_cells(sel);
    const std::vector<double> temps =
        temp_range.empty() ? hhe::default_temperature_axis() : parse_axis(temp_range, 1.0);
    const std::vector<double> stims =
        stim_range.empty() ? hhe::default_stimulus_axis() : parse_axis(stim_range, 0.25);

    hhe::SweepConfig cfg;
    cfg.duration_ms = duration;
    cfg.dt_ms = dt;
    cfg.transient_ms = transient;
    cfg.f_atp_kj_mol = f_atp;
    cfg.jobs = jobs;

    std::ofstream file;
    std::ostream& os = open_output(file, out);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    bool first = true;
    for (int id : ids) {
        const hhe::SweepGrid grid = hhe::run_sweep(id, temps, stims, cfg);
        if (format == "json")
            arr.push_back(hhe::sweep_to_json(grid));
        else
            hhe::write_sweep_csv(os, grid, first);
        first = false;
        std::cerr << "cell " << id << ": swept " << grid.status.size() << " points\n";
    }
    if (format == "json") os << arr.dump(2) << '\n';
    return kExitOk;
}

int cmd_verify(bool quick, unsigned jobs, double perturb_gna) {
    hhe::acceptance::Options opt;
    opt.quick = quick;
    opt.jobs = jobs;
    opt.g_na_scale = perturb_gna;
    if (perturb_gna != 1.0)
        std::cout << "(self-test mode: g_Na scaled by " << perturb_gna << ")\n";
    const hhe::acceptance::Outcome outcome = hhe::acceptance::run(opt, &std::cout);
    if (outcome.all_passed()) {
        std::cout << "all criteria passed\n";
        return kExitOk;
    }
    std::cout << "verification failed\n";
    return kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conductance-based neuron simulator with per-spike energy accounting"};
    app.require_subcommand(1);

    std::string sel = "all";
    std::string format = "table";
    std::string out;
    ProtocolFlags flags;
    double f_atp = hhe::kDefaultFAtpKjPerMol;
    unsigned jobs = 0;
    int cell_id = 0;
    std::string temp_range, stim_range;
    bool quick = false;
    double perturb_gna = 1.0;

    auto* cells = app.add_subcommand("cells", "print the cell parameter registry");
    cells->add_option("--cell", sel, "cell id, comma list, or 'all'");
    cells->add_option("--format", format, "table | csv | json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cells->add_option("--out", out, "output file (default: stdout)");

    auto* simulate = app.add_subcommand("simulate", "integrate one cell, write the trace CSV");
    simulate->add_option("--cell", cell_id, "cell id (1-10)")->required();
    add_protocol_flags(simulate, flags);
    simulate->add_option("--out", out, "trace file (default: trace_cell<N>.csv)");

    auto* report = app.add_subcommand(
        "report", "per-cell energy accounting at the reference (or given) protocol");
    report->add_option("--cell", sel, "cell id, comma list, or 'all'");
    add_protocol_flags(report, flags);
    report->add_option("--fatp", f_atp, "ATP free energy, kJ/mol (default 50)");
    report->add_option("--format", format, "csv | json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    report->add_option("--out", out, "output file (default: stdout)");
    report->add_option("--jobs", jobs, "parallel workers (default: hardware)");

    auto* sweep = app.add_subcommand("sweep", "temperature × stimulus grid per cell");
    sweep->add_option("--cell", sel, "cell id, comma list, or 'all'");
    sweep->add_option("--temp", temp_range, "degC range lo:hi[:step] (default 20:40:1)");
    sweep->add_option("--stim", stim_range, "µA/cm² range lo:hi[:step] (default 2.25:10:0.25)");
    sweep->add_option("--duration", flags.duration, "simulated time per point, ms");
    sweep->add_option("--dt", flags.dt, "integration step, ms");
    sweep->add_option("--transient", flags.transient, "analysis transient, ms");
    sweep->add_option("--fatp", f_atp, "ATP free energy, kJ/mol");
    sweep->add_option("--format", format, "csv | json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    sweep->add_option("--out", out, "output file (default: stdout)");
    sweep->add_option("--jobs", jobs, "parallel workers (default: hardware)");

    auto* verify = app.add_subcommand("verify", "run the built-in verification suite");
    verify->add_flag("--quick", quick, "cells 1, 5, 9 only; skip sweep criteria");
    verify->add_option("--jobs", jobs, "parallel workers (default: hardware)");
    verify->add_option("--perturb-gna", perturb_gna,
                       "self-test: scale every g_Na to force failures")
        ->default_val(1.0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (cells->parsed()) return cmd_cells(sel, format, out);
        if (simulate->parsed()) return cmd_simulate(cell_id, flags, out);
        if (report->parsed())
            return cmd_report(sel, flags, f_atp, format == "table" ? "csv" : format, out, jobs);
        if (sweep->parsed())
            return cmd_sweep(sel, temp_range, stim_range, flags.duration, flags.dt,
                             flags.transient, f_atp, format == "table" ? "csv" : format, out,
                             jobs);
        if (verify->parsed()) return cmd_verify(quick, jobs, perturb_gna);
    } catch (const hhe::IntegrationError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

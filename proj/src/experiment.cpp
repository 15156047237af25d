#include "awr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "awr/materials.hpp"
#include "awr/relaxopt.hpp"
#include "awr/timeint.hpp"

namespace awr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_dx(const std::string& value) {
    const auto slash = value.find('/');
    if (slash == std::string::npos) return std::stod(value);
    const double num = std::stod(value.substr(0, slash));
    const double den = std::stod(value.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("dx: zero denominator");
    return num / den;
}

ScheduleMode parse_schedule(std::string value) {
    std::replace(value.begin(), value.end(), '-', '_');
    if (value == "free") value = "free_run";
    return schedule_mode_from_string(value);
}

std::vector<WRMethod> parse_methods(const std::string& value) {
    std::vector<WRMethod> methods;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) methods.push_back(wr_method_from_string(item));
    }
    return methods;
}

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("expected a boolean, got '" + value + "'");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", x);
    return buf;
}

void write_rows(std::ostream& os, const std::vector<MethodSummary>& methods) {
    for (const MethodSummary& m : methods) {
        for (const IterationRecord& r : m.records) {
            os << "iter," << to_string(m.method) << ',' << r.k << ',' << fmt(r.update_norm) << ','
               << fmt(r.interface_error) << ',' << fmt(r.wall_time) << ',' << (m.converged ? 1 : 0)
               << '\n';
        }
        double total_time = 0.0;
        for (const IterationRecord& r : m.records) total_time += r.wall_time;
        const IterationRecord& last = m.records.back();
        os << "summary," << to_string(m.method) << ',' << m.iterations << ','
           << fmt(last.update_norm) << ',' << fmt(last.interface_error) << ',' << fmt(total_time)
           << ',' << (m.converged ? 1 : 0) << '\n';
    }
}

double plot_value(const IterationRecord& r) {
    return std::isfinite(r.interface_error) && r.interface_error > 0.0 ? r.interface_error
                                                                       : r.update_norm;
}

const char* method_color(WRMethod m) {
    switch (m) {
        case WRMethod::jacobi: return "#c0392b";
        case WRMethod::gs_dn: return "#2980b9";
        case WRMethod::gs_nd: return "#16a085";
        case WRMethod::async: return "#8e44ad";
    }
    return "#000000";
}

struct PanelSpec {
    double x0, y0, width, height;
    const char* title;
};

void draw_panel(std::ostream& os, const PanelSpec& panel,
                const std::vector<MethodSummary>& methods, bool against_time) {
    double xmax = 1.0;
    double lo = 0.0, hi = -300.0;
    for (const MethodSummary& m : methods) {
        double t = 0.0;
        for (const IterationRecord& r : m.records) {
            t += r.wall_time;
            xmax = std::max(xmax, against_time ? t : static_cast<double>(r.k));
            const double v = std::log10(std::max(plot_value(r), 1e-300));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi <= lo) hi = lo + 1.0;

    const auto sx = [&](double x) { return panel.x0 + x / xmax * panel.width; };
    const auto sy = [&](double v) { return panel.y0 + (hi - v) / (hi - lo) * panel.height; };

    os << "<rect x='" << panel.x0 << "' y='" << panel.y0 << "' width='" << panel.width
       << "' height='" << panel.height << "' fill='none' stroke='#888'/>\n";
    os << "<text x='" << panel.x0 + panel.width / 2 << "' y='" << panel.y0 - 8
       << "' text-anchor='middle' font-size='13'>" << panel.title << "</text>\n";
    for (const MethodSummary& m : methods) {
        os << "<polyline fill='none' stroke='" << method_color(m.method) << "' stroke-width='1.5' points='";
        double t = 0.0;
        for (const IterationRecord& r : m.records) {
            t += r.wall_time;
            const double x = against_time ? t : static_cast<double>(r.k);
            os << sx(x) << ',' << sy(std::log10(std::max(plot_value(r), 1e-300))) << ' ';
        }
        os << "'/>\n";
    }
}

} // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "material_pair" || key == "materials") {
        material_pair = value;
        (void)awr::material_pair(material_pair);
    } else if (key == "dimension") {
        dimension = std::stoi(value);
    } else if (key == "dx") {
        dx = parse_dx(value);
    } else if (key == "steps") {
        steps = std::stoi(value);
    } else if (key == "method" || key == "methods") {
        methods = parse_methods(value);
    } else if (key == "tol") {
        tol = std::stod(value);
    } else if (key == "kmax") {
        kmax = std::stoi(value);
    } else if (key == "schedule") {
        schedule = parse_schedule(value);
    } else if (key == "seed") {
        seed = std::stoull(value);
    } else if (key == "relax") {
        if (value != "variable" && value != "constant")
            throw std::invalid_argument("relax must be 'variable' or 'constant'");
        relax = value;
    } else if (key == "out") {
        out_path = value;
    } else if (key == "plot") {
        plot = parse_bool(value);
    } else if (key == "plot_path") {
        plot_path = value;
    } else if (key == "trace") {
        trace_path = value;
    } else if (key == "replay") {
        replay_path = value;
    } else if (key == "repeat") {
        repeat = std::stoi(value);
    } else {
        throw std::invalid_argument("unknown configuration key: " + key);
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open configuration file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::pair<MaterialParams, MaterialParams> material_pair(const std::string& name) {
    const MaterialParams air{1.293 * 1005.0, 0.0243, "air"};
    const MaterialParams water{999.7 * 4192.1, 0.58, "water"};
    const MaterialParams steel{7836.0 * 443.0, 48.9, "steel"};
    if (name == "air-steel") return {air, steel};
    if (name == "air-water") return {air, water};
    if (name == "water-steel") return {water, steel};
    if (name == "same") return {steel, steel};
    throw std::invalid_argument("unknown material pair: " + name);
}

void write_csv(std::ostream& os, const std::vector<MethodSummary>& methods) {
    os << "record,method,k,update_norm,interface_error,wall_time,converged\n";
    write_rows(os, methods);
}

void write_convergence_svg(std::ostream& os, const std::vector<MethodSummary>& methods) {
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='760' height='420' "
          "font-family='sans-serif'>\n";
    os << "<rect width='760' height='420' fill='white'/>\n";
    draw_panel(os, PanelSpec{50.0, 40.0, 300.0, 320.0, "error vs iteration"}, methods, false);
    draw_panel(os, PanelSpec{420.0, 40.0, 300.0, 320.0, "error vs wall time"}, methods, true);
    double ly = 55.0;
    for (const MethodSummary& m : methods) {
        os << "<line x1='60' y1='" << ly << "' x2='84' y2='" << ly << "' stroke='"
           << method_color(m.method) << "' stroke-width='2'/>\n";
        os << "<text x='90' y='" << ly + 4 << "' font-size='12'>" << to_string(m.method)
           << "</text>\n";
        ly += 16.0;
    }
    os << "</svg>\n";
}

std::string print_relax_table(const std::string& pair_name, double dx, double dt) {
    const auto [m1, m2] = material_pair(pair_name);
    const RelaxTable t = relax_table(m1, m2, dx, dt);
    std::ostringstream os;
    os << "pair = " << pair_name << '\n';
    os << "dx = " << fmt(dx) << '\n';
    os << "dt = " << fmt(dt) << '\n';
    os << "S1 = " << fmt(t.S1) << '\n';
    os << "S2 = " << fmt(t.S2) << '\n';
    os << "theta_jacobi = " << fmt(t.theta_jacobi) << '\n';
    os << "theta_gs_dn = " << fmt(t.theta_gs_dn) << '\n';
    os << "theta_gs_nd = " << fmt(t.theta_gs_nd) << '\n';
    os << "rho_jacobi = " << fmt(t.rho_jacobi) << '\n';
    return os.str();
}

int run_experiment(const ExperimentConfig& config, std::ostream& log, ExperimentResult* out) {
    if (config.dimension != 1 && config.dimension != 2)
        throw std::invalid_argument("dimension must be 1 or 2");
    if (!(config.dx > 0.0) || config.steps < 1 || !(config.tol > 0.0) || config.kmax < 1 ||
        config.repeat < 1)
        throw std::invalid_argument("invalid experiment configuration");

    const auto [m1, m2] = material_pair(config.material_pair);
    HeatProblemConfig hc;
    hc.dimension = config.dimension;
    hc.dx = config.dx;
    hc.mat1 = m1;
    hc.mat2 = m2;
    hc.Nv = hc.Nw = config.steps;
    const HeatProblem problem = assemble_heat(hc);
    const TimeGrid grid(problem.system.Tf, config.steps);
    const RelaxTable table = relax_table(m1, m2, config.dx, grid.dt());

    WRConfig base;
    base.grid_v = base.grid_w = grid;
    base.tol = config.tol;
    base.kmax = config.kmax;
    base.interface_norm_weight = problem.interface_norm_weight;

    log << "pair=" << config.material_pair << " dim=" << config.dimension << " dx=" << config.dx
        << " steps=" << config.steps << " dt=" << grid.dt() << " tol=" << config.tol
        << " kmax=" << config.kmax << '\n';
    log << "theta_jacobi=" << table.theta_jacobi << " theta_gs_dn=" << table.theta_gs_dn
        << " theta_gs_nd=" << table.theta_gs_nd << " rho_jacobi=" << table.rho_jacobi << '\n';

    WRConfig refcfg = base;
    refcfg.method = WRMethod::gs_dn;
    const auto [ref_tv, ref_tw] = thetas_for(SplitKind::gs_dn, table);
    refcfg.relax = ConstantTheta{ref_tv, ref_tw};
    refcfg.tol = std::min(1e-11, config.tol);
    refcfg.kmax = std::max(config.kmax, 200);
    const WRResult refrun = run_wr(problem.system, problem.partition, refcfg);
    if (!refrun.converged)
        log << "warning: reference solution did not reach its tolerance\n";
    const Waveform reference = interface_trace(refrun, problem.partition);

    std::shared_ptr<Trace> replay;
    if (!config.replay_path.empty())
        replay = std::make_shared<Trace>(Trace::load(config.replay_path));

    std::vector<WRMethod> methods = config.methods;
    if (methods.empty())
        methods = {WRMethod::jacobi, WRMethod::gs_dn, WRMethod::gs_nd, WRMethod::async};

    ExperimentResult result;
    result.all_converged = true;
    bool trace_written = false;
    for (const WRMethod method : methods) {
        for (int rep = 0; rep < config.repeat; ++rep) {
            WRConfig cfg = base;
            cfg.method = method;
            cfg.reference_ug = &reference;
            switch (method) {
                case WRMethod::jacobi:
                    cfg.relax = ConstantTheta{table.theta_jacobi, table.theta_jacobi};
                    break;
                case WRMethod::gs_dn:
                case WRMethod::gs_nd: {
                    const auto [tv, tw] =
                        thetas_for(method == WRMethod::gs_dn ? SplitKind::gs_dn : SplitKind::gs_nd,
                                   table);
                    cfg.relax = ConstantTheta{tv, tw};
                    break;
                }
                case WRMethod::async:
                    if (config.relax == "variable")
                        cfg.relax = table;
                    else
                        cfg.relax = ConstantTheta{table.theta_jacobi, table.theta_jacobi};
                    cfg.schedule.mode = config.schedule;
                    cfg.schedule.seed = config.seed + static_cast<std::uint64_t>(rep);
                    if (replay) {
                        cfg.schedule.mode = replay->mode;
                        cfg.schedule.seed = replay->seed;
                        cfg.schedule.replay = replay;
                    }
                    break;
            }
            const WRResult r = run_wr(problem.system, problem.partition, cfg);
            if (method == WRMethod::async && !config.trace_path.empty() && !trace_written) {
                r.trace.save(config.trace_path);
                trace_written = true;
            }
            MethodSummary summary;
            summary.method = method;
            summary.iterations = r.iterations;
            summary.converged = r.converged;
            summary.records = r.records;
            log << "method=" << to_string(method) << " iterations=" << r.iterations
                << " converged=" << (r.converged ? "yes" : "no")
                << " final_update=" << fmt(r.records.back().update_norm) << '\n';
            result.all_converged = result.all_converged && r.converged;
            result.methods.push_back(std::move(summary));
        }
    }

    namespace fs = std::filesystem;
    const bool fresh = !fs::exists(config.out_path) || fs::file_size(config.out_path) == 0;
    std::ofstream os(config.out_path, std::ios::app);
    if (!os) throw std::runtime_error("cannot open output file: " + config.out_path);
    if (fresh)
        write_csv(os, result.methods);
    else
        write_rows(os, result.methods);
    os.close();
    log << "wrote " << config.out_path << '\n';

    if (config.plot) {
        std::ofstream svg(config.plot_path);
        if (!svg) throw std::runtime_error("cannot open plot file: " + config.plot_path);
        write_convergence_svg(svg, result.methods);
        log << "wrote " << config.plot_path << '\n';
    }

    const int status = result.all_converged ? 0 : 1;
    if (out) *out = std::move(result);
    return status;
}

} // namespace awr

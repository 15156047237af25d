#ifndef AWR_EXPERIMENT_HPP
#define AWR_EXPERIMENT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "awr/model.hpp"
#include "awr/rma.hpp"
#include "awr/wr.hpp"

namespace awr {

// One experiment: a material pair, a discretization, and a set of WR methods
// to run and compare.  Parsable from `key = value` files, overridable by
// command-line flags.
struct ExperimentConfig {
    std::string material_pair = "air-steel"; // air-steel | air-water | water-steel | same
    int dimension = 1;
    double dx = 1.0 / 64;
    int steps = 50;
    std::vector<WRMethod> methods;           // empty means all four
    double tol = 1e-10;
    int kmax = 50;
    ScheduleMode schedule = ScheduleMode::seeded;
    std::uint64_t seed = 0;
    std::string relax = "variable";          // async relaxation: variable | constant
    std::string out_path = "results.csv";
    bool plot = false;
    std::string plot_path = "results.svg";
    std::string trace_path;                  // record the async schedule here
    std::string replay_path;                 // follow a recorded schedule
    int repeat = 1;

    void set(const std::string& key, const std::string& value); // throws on unknown key
};

ExperimentConfig load_config_file(const std::string& path);

std::pair<MaterialParams, MaterialParams> material_pair(const std::string& name);

struct MethodSummary {
    WRMethod method;
    int iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> records;
};

struct ExperimentResult {
    std::vector<MethodSummary> methods;
    bool all_converged = false;
};

// Runs the configured methods against a shared reference solution, appends
// CSV rows (schema: record,method,k,update_norm,interface_error,wall_time,converged)
// to out_path and optionally an SVG convergence plot.  Returns the process
// exit status: 0 iff every requested method converged within kmax.
int run_experiment(const ExperimentConfig& config, std::ostream& log, ExperimentResult* out = nullptr);

void write_csv(std::ostream& os, const std::vector<MethodSummary>& methods);
void write_convergence_svg(std::ostream& os, const std::vector<MethodSummary>& methods);

// S operators, optimal thetas and the predicted Jacobi spectral radius for
// one material pair at the given discretization.
std::string print_relax_table(const std::string& pair_name, double dx, double dt);

} // namespace awr

#endif

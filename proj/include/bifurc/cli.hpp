#pragma once

#include <string>

#include "bifurc/continuation.hpp"

namespace bifurc::cli {

/// One end-to-end run. Populated from a config file, command-line flags, or
/// both (flags win).
struct RunConfig {
    std::string mode;  ///< steklov | analyze | branch | limiting | oracle-compare | bootstrap

    std::string mesh_kind = "disk";  ///< disk | rect | file
    int disk_level = 4;
    double disk_radius = 1.0;
    int rect_nx = 4;
    int rect_ny = 4;
    double rect_width = 1.0;
    double rect_height = 1.0;
    std::string mesh_path;

    std::string f_text;

    int dimension = 3;          ///< bootstrap mode
    double p_exponent = 0.0;    ///< bootstrap mode; 0 takes the leading exponent of f
    int bootstrap_max_steps = 200;

    double steklov_tol = 1e-10;
    ContinuationOptions opts;

    std::string out_dir = "out";
};

/// Line-oriented `key = value` file with sections [mesh] [nonlinearity]
/// [continuation] [output]; '#' comments; unknown keys are errors.
RunConfig parse_config_file(const std::string& path);

/// Mesh flag grammar: "disk:<level>" | "rect:<nx>x<ny>" | "file:<path>".
void parse_mesh_spec(RunConfig& config, const std::string& spec);

MeshGeometry build_mesh(const RunConfig& config);

/// Executes one run and writes its output files under config.out_dir.
/// Returns 0 on success, 2 on input errors, 3 on numerical failure (with a
/// failure record and whatever partial outputs exist).
int run(const RunConfig& config);

/// Flag parsing plus run(); the process exit code.
int main_entry(int argc, char** argv);

}  // namespace bifurc::cli

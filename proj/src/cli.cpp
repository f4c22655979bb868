#include "bifurc/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "bifurc/oracle_radial.hpp"

namespace bifurc::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw Error("write failed for '" + path + "'");
}

void write_json_file(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_field(const std::string& path, const std::string& name, const DofVector& values) {
    std::ostringstream os;
    os << "# " << name << ' ' << values.size() << '\n';
    for (Eigen::Index i = 0; i < values.size(); ++i) os << fmt(values[i]) << '\n';
    write_text(path, os.str());
}

std::string diagram_csv(const Diagram& diagram) {
    std::ostringstream os;
    os << "arclength,lambda,sup_norm,h1_norm,rescaled,newton_iters\n";
    for (const BranchPoint& pt : diagram.points)
        os << fmt(pt.arclength) << ',' << fmt(pt.lambda) << ',' << fmt(pt.sup_norm) << ','
           << fmt(pt.h1_norm) << ',' << (pt.rescaled ? 1 : 0) << ',' << pt.newton_iters << '\n';
    return os.str();
}

json diagram_summary(const RunConfig& config, const MeshGeometry& mesh, const Diagram& diagram) {
    json folds = json::array();
    for (const Fold& f : diagram.folds)
        folds.push_back({{"index", f.index}, {"lambda_bar", f.lambda_bar}});

    // Multiplicity table over a fixed lambda grid up to just past the
    // nonexistence bound (or past the largest traced lambda when unbounded).
    double scale = diagram.nonexistence_bound;
    if (!std::isfinite(scale)) {
        scale = 0.0;
        for (const BranchPoint& pt : diagram.points) scale = std::max(scale, pt.lambda);
    }
    json multiplicity = json::array();
    for (int j = 1; j <= 12; ++j) {
        const double lam = scale * j / 10.0;
        multiplicity.push_back({{"lambda", lam}, {"count", multiplicity_scan(diagram, lam)}});
    }

    json j{{"mode", config.mode},
           {"mesh", diagram.mesh_id},
           {"f", diagram.f_text},
           {"dofs", mesh.vertex_count()},
           {"mu1", diagram.mu1},
           {"lambda_star",
            {{"measured", diagram.lambda_star_measured},
             {"predicted", std::isfinite(diagram.lambda_star_predicted)
                               ? json(diagram.lambda_star_predicted)
                               : json(nullptr)}}},
           {"direction", to_string(diagram.direction)},
           {"direction_consistent", diagram.direction_consistent},
           {"folds", folds},
           {"nonexistence_bound", std::isfinite(diagram.nonexistence_bound)
                                      ? json(diagram.nonexistence_bound)
                                      : json(nullptr)},
           {"multiplicity", multiplicity},
           {"points", diagram.points.size()},
           {"stop_reason", diagram.stop_reason},
           {"max_rescaled_sup", diagram.max_rescaled_sup},
           {"newton_tol", diagram.newton_tol}};
    return j;
}

Diagram trace_branch(const RunConfig& config, const MeshGeometry& mesh, const NonlinearitySpec& f,
                     const DiscreteOperator& A, const SteklovPair& steklov) {
    ContinuationOptions opts = config.opts;
    BranchPoint start;
    if (f.slope_at_zero() > 0.0) {
        start = branch_from_trivial(A, mesh, f, steklov, opts.kickoff_amplitude, opts);
    } else {
        // No trivial-branch bifurcation; seed from the radial family at unit
        // amplitude. Only meaningful on disks.
        if (mesh.domain != DomainKind::Disk)
            throw PreconditionError("branch tracing for f with f'(0) = 0 needs a disk mesh");
        const double t0 = 1.0;
        DofVector u0(mesh.vertex_count());
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            const double r = std::hypot(mesh.vertices[v].x, mesh.vertices[v].y);
            u0[v] = oracle::radial_profile(t0, std::min(r, mesh.disk_radius), mesh.disk_radius);
        }
        const double lambda0 = steklov.mu1 * t0 / f.eval(t0);
        start = branch_from_state(A, mesh, f, u0, lambda0, opts);
        opts.seed_growth = std::min(opts.seed_growth, 1.2);
        if (opts.lambda_min < 0.0) opts.lambda_min = 1e-3 * lambda0;
    }
    return continue_branch(A, mesh, f, steklov, start, opts);
}

void run_steklov(const RunConfig& config, const std::string& dir) {
    const MeshGeometry mesh = build_mesh(config);
    const DiscreteOperator A = assemble_interior_form(mesh);
    const DiscreteOperator B = assemble_boundary_mass(mesh);
    const SteklovPair pair = solve_steklov_first(A, B, config.steklov_tol);

    json j{{"mode", "steklov"},         {"mesh", mesh.id()},
           {"dofs", mesh.vertex_count()}, {"mu1", pair.mu1},
           {"residual_norm", pair.residual_norm}, {"iterations", pair.iterations},
           {"tol", config.steklov_tol}};
    write_json_file(dir + "/report.json", j);
    write_field(dir + "/field_phi1.txt", "phi1", pair.phi1);
}

void run_analyze(const RunConfig& config, const std::string& dir) {
    const NonlinearitySpec f = NonlinearitySpec::parse(config.f_text);
    const HypothesisReport rep = analyze(f, config.dimension);

    json sub = json::object();
    for (const auto& [n, ok] : rep.subcritical_for_dim) sub[std::to_string(n)] = ok;

    std::string shape = "inconclusive: the remainder sign fixes no direction";
    if (!rep.bifurcates_from_zero) {
        shape = "no trivial-branch bifurcation (f'(0) = 0); only the blow-up branch at lambda -> 0";
    } else if (rep.remainder_coeff_lower > 0.0) {
        shape = "subcritical: branch leaves toward smaller lambda; no fold required";
    } else if (rep.remainder_coeff_upper < 0.0) {
        shape = "supercritical: branch leaves toward larger lambda, folds back, and gives two "
                "solutions in the fold window";
    }

    json notes = json::array();
    if (!rep.has_linear_lower_bound)
        notes.push_back("linear lower bound fails (K = 0): no nonexistence threshold");
    if (!rep.bifurcates_from_zero)
        notes.push_back("f'(0) = 0 or no remainder exponent: no bifurcation from the trivial branch");

    json j{{"mode", "analyze"},
           {"f", f.to_string()},
           {"dimension", config.dimension},
           {"growth_exponent", rep.growth_exponent},
           {"growth_coeff", rep.growth_coeff},
           {"subcritical_for_dim", sub},
           {"slope_at_zero", rep.slope_at_zero},
           {"remainder_exponent",
            rep.remainder_exponent ? json(*rep.remainder_exponent) : json(nullptr)},
           {"remainder_coeff_lower",
            rep.remainder_exponent ? json(rep.remainder_coeff_lower) : json(nullptr)},
           {"remainder_coeff_upper",
            rep.remainder_exponent ? json(rep.remainder_coeff_upper) : json(nullptr)},
           {"linear_lower_bound", rep.linear_lower_bound},
           {"linear_lower_bound_argmin", rep.linear_lower_bound_argmin},
           {"has_linear_lower_bound", rep.has_linear_lower_bound},
           {"bifurcates_from_zero", rep.bifurcates_from_zero},
           {"predicted_shape", shape},
           {"notes", notes}};
    write_json_file(dir + "/report.json", j);
}

void run_branch(const RunConfig& config, const std::string& dir) {
    const MeshGeometry mesh = build_mesh(config);
    const NonlinearitySpec f = NonlinearitySpec::parse(config.f_text);
    const DiscreteOperator A = assemble_interior_form(mesh);
    const DiscreteOperator B = assemble_boundary_mass(mesh);
    const SteklovPair steklov = solve_steklov_first(A, B, config.steklov_tol);

    try {
        const Diagram diagram = trace_branch(config, mesh, f, A, steklov);
        write_text(dir + "/diagram.csv", diagram_csv(diagram));
        write_json_file(dir + "/summary.json", diagram_summary(config, mesh, diagram));
    } catch (const BranchError& e) {
        write_text(dir + "/diagram.csv", diagram_csv(e.partial));
        throw;
    }
}

void run_oracle_compare(const RunConfig& config, const std::string& dir) {
    const MeshGeometry mesh = build_mesh(config);
    if (mesh.domain != DomainKind::Disk)
        throw PreconditionError("oracle-compare needs a disk mesh (the closed form is radial)");
    const NonlinearitySpec f = NonlinearitySpec::parse(config.f_text);
    const DiscreteOperator A = assemble_interior_form(mesh);
    const DiscreteOperator B = assemble_boundary_mass(mesh);
    const SteklovPair steklov = solve_steklov_first(A, B, config.steklov_tol);
    const Diagram diagram = trace_branch(config, mesh, f, A, steklov);

    const double mu1_exact = oracle::disk_mu1(mesh.disk_radius);
    std::ostringstream os;
    os << "t,lambda_fem,lambda_oracle,rel_deviation\n";
    double max_dev = 0.0;
    for (const BranchPoint& pt : diagram.points) {
        const double t = pt.sup_norm;
        const double lam_oracle = mu1_exact * t / f.eval(t);
        const double dev = std::abs(pt.lambda - lam_oracle) / lam_oracle;
        max_dev = std::max(max_dev, dev);
        os << fmt(t) << ',' << fmt(pt.lambda) << ',' << fmt(lam_oracle) << ',' << fmt(dev) << '\n';
    }
    write_text(dir + "/diagram.csv", os.str());

    json j{{"mode", "oracle-compare"}, {"mesh", mesh.id()},
           {"f", f.to_string()},       {"mu1_fem", steklov.mu1},
           {"mu1_exact", mu1_exact},   {"points", diagram.points.size()},
           {"max_rel_deviation", max_dev}};
    write_json_file(dir + "/report.json", j);
}

void run_limiting(const RunConfig& config, const std::string& dir) {
    const MeshGeometry mesh = build_mesh(config);
    const NonlinearitySpec f = NonlinearitySpec::parse(config.f_text);
    const double b = f.growth_coeff();
    const double p = f.growth_exponent();
    const DofVector w0 = solve_limiting(mesh, b, p, nullptr, config.opts.newton_tol);

    const DiscreteOperator A = assemble_interior_form(mesh);
    json j{{"mode", "limiting"},
           {"mesh", mesh.id()},
           {"f", f.to_string()},
           {"b", b},
           {"p", p},
           {"sup_norm", w0.cwiseAbs().maxCoeff()},
           {"h1_norm", std::sqrt(w0.dot(A.matrix * w0))}};
    if (mesh.domain == DomainKind::Disk)
        j["predicted_sup"] = std::pow(oracle::disk_mu1(mesh.disk_radius) / b, 1.0 / (p - 1.0));
    write_json_file(dir + "/report.json", j);
    write_field(dir + "/field_w0.txt", "w0", w0);
}

void run_bootstrap(const RunConfig& config, const std::string& dir) {
    double p = config.p_exponent;
    if (p <= 0.0) {
        if (config.f_text.empty())
            throw ParseError("bootstrap mode needs --p or a nonlinearity to take the exponent from");
        p = NonlinearitySpec::parse(config.f_text).growth_exponent();
    }
    if (p <= 1.0) throw ParseError("bootstrap needs a growth exponent p > 1");
    if (config.dimension < 2) throw ParseError("bootstrap needs a dimension of at least 2");
    const BootstrapTrace trace = bootstrap_exponents(config.dimension, p, config.bootstrap_max_steps);

    std::ostringstream track;
    track << "q: ";
    for (size_t i = 0; i < trace.flux_exponents.size(); ++i) {
        if (i) track << " -> ";
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.6g", trace.flux_exponents[i]);
        track << buf;
    }
    track << (trace.terminated ? ", terminated" : ", not terminated");

    json j{{"mode", "bootstrap"},
           {"dimension", trace.dimension},
           {"growth_exponent", trace.growth_exponent},
           {"terminated", trace.terminated},
           {"steps", trace.steps},
           {"flux_exponents", trace.flux_exponents},
           {"trace_exponents", trace.trace_exponents},
           {"sobolev_exponents", trace.sobolev_exponents},
           {"summary", track.str()}};
    write_json_file(dir + "/report.json", j);
}

}  // namespace

void parse_mesh_spec(RunConfig& config, const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "disk") {
        config.mesh_kind = "disk";
        if (!rest.empty()) {
            try {
                config.disk_level = std::stoi(rest);
            } catch (const std::exception&) {
                throw ParseError("bad disk level in mesh spec '" + spec + "'");
            }
        }
    } else if (kind == "rect") {
        config.mesh_kind = "rect";
        const auto x = rest.find('x');
        if (x == std::string::npos) throw ParseError("rect mesh spec needs <nx>x<ny>, got '" + spec + "'");
        try {
            config.rect_nx = std::stoi(rest.substr(0, x));
            config.rect_ny = std::stoi(rest.substr(x + 1));
        } catch (const std::exception&) {
            throw ParseError("bad rect sizes in mesh spec '" + spec + "'");
        }
    } else if (kind == "file") {
        if (rest.empty()) throw ParseError("file mesh spec needs a path");
        config.mesh_kind = "file";
        config.mesh_path = rest;
    } else {
        throw ParseError("unknown mesh kind '" + kind + "' (expected disk|rect|file)");
    }
}

MeshGeometry build_mesh(const RunConfig& config) {
    if (config.mesh_kind == "disk") return generate_disk_mesh(config.disk_radius, config.disk_level);
    if (config.mesh_kind == "rect")
        return generate_rectangle_mesh(config.rect_width, config.rect_height, config.rect_nx,
                                       config.rect_ny);
    if (config.mesh_kind == "file") {
        try {
            return load_mesh(config.mesh_path);
        } catch (const InvariantViolation& e) {
            // a broken input file is a configuration problem, not a numerical one
            throw ParseError("invalid mesh file: " + std::string(e.what()));
        }
    }
    throw ParseError("unknown mesh kind '" + config.mesh_kind + "'");
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");

    RunConfig config;
    std::string section;
    std::string line;
    long line_no = 0;

    auto to_double = [&](const std::string& v) {
        try {
            size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ParseError(path + ": bad numeric value '" + v + "'", line_no);
        }
    };
    auto to_int = [&](const std::string& v) {
        try {
            size_t used = 0;
            const int x = std::stoi(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ParseError(path + ": bad integer value '" + v + "'", line_no);
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(path + ": malformed section header", line_no);
            section = line.substr(1, line.size() - 2);
            if (section != "mesh" && section != "nonlinearity" && section != "continuation" &&
                section != "output")
                throw ParseError(path + ": unknown section [" + section + "]", line_no);
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(path + ": expected key = value", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError(path + ": empty key or value", line_no);

        if (section.empty()) {
            if (key == "mode") config.mode = value;
            else if (key == "dimension") config.dimension = to_int(value);
            else if (key == "p") config.p_exponent = to_double(value);
            else if (key == "bootstrap_max_steps") config.bootstrap_max_steps = to_int(value);
            else throw ParseError(path + ": unknown top-level key '" + key + "'", line_no);
        } else if (section == "mesh") {
            if (key == "kind") config.mesh_kind = value;
            else if (key == "level") config.disk_level = to_int(value);
            else if (key == "radius") config.disk_radius = to_double(value);
            else if (key == "nx") config.rect_nx = to_int(value);
            else if (key == "ny") config.rect_ny = to_int(value);
            else if (key == "width") config.rect_width = to_double(value);
            else if (key == "height") config.rect_height = to_double(value);
            else if (key == "path") config.mesh_path = value;
            else throw ParseError(path + ": unknown [mesh] key '" + key + "'", line_no);
        } else if (section == "nonlinearity") {
            if (key == "f") config.f_text = value;
            else throw ParseError(path + ": unknown [nonlinearity] key '" + key + "'", line_no);
        } else if (section == "continuation") {
            if (key == "newton_tol") config.opts.newton_tol = to_double(value);
            else if (key == "newton_max_iters") config.opts.newton_max_iters = to_int(value);
            else if (key == "kickoff_amplitude") config.opts.kickoff_amplitude = to_double(value);
            else if (key == "step_min") config.opts.step_min = to_double(value);
            else if (key == "step_max") config.opts.step_max = to_double(value);
            else if (key == "step_grow") config.opts.step_grow = to_double(value);
            else if (key == "lambda_min") config.opts.lambda_min = to_double(value);
            else if (key == "norm_max") config.opts.norm_max = to_double(value);
            else if (key == "switch_threshold") config.opts.switch_threshold = to_double(value);
            else if (key == "lambda_step_fraction") config.opts.lambda_step_fraction = to_double(value);
            else if (key == "seed_growth") config.opts.seed_growth = to_double(value);
            else if (key == "max_steps") config.opts.max_steps = to_int(value);
            else if (key == "steklov_tol") config.steklov_tol = to_double(value);
            else throw ParseError(path + ": unknown [continuation] key '" + key + "'", line_no);
        } else if (section == "output") {
            if (key == "dir") config.out_dir = value;
            else throw ParseError(path + ": unknown [output] key '" + key + "'", line_no);
        }
    }
    return config;
}

int run(const RunConfig& config) {
    namespace fs = std::filesystem;
    const std::string dir = config.out_dir;

    try {
        const bool known = config.mode == "steklov" || config.mode == "analyze" ||
                           config.mode == "branch" || config.mode == "limiting" ||
                           config.mode == "oracle-compare" || config.mode == "bootstrap";
        if (!known) throw ParseError("unknown mode '" + config.mode + "'");

        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw Error("cannot create output directory '" + dir + "'");

        if (config.mode == "steklov") run_steklov(config, dir);
        else if (config.mode == "analyze") run_analyze(config, dir);
        else if (config.mode == "branch") run_branch(config, dir);
        else if (config.mode == "limiting") run_limiting(config, dir);
        else if (config.mode == "oracle-compare") run_oracle_compare(config, dir);
        else run_bootstrap(config, dir);
        return 0;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        try {
            json failure{{"status", "failed"}, {"mode", config.mode}, {"error", e.what()}};
            write_json_file(dir + "/report.json", failure);
        } catch (const Error&) {
            // cannot even write the failure record; stderr still tells the story
        }
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"branch tracing for an elliptic problem with a nonlinear boundary flux"};
    std::string config_path, mode, mesh_spec, f_text, out_dir;
    double tol = -1.0, p_exponent = 0.0;
    int dimension = 0;

    app.add_option("--config", config_path, "config file (key = value with sections)");
    app.add_option("--mode", mode, "steklov|analyze|branch|limiting|oracle-compare|bootstrap");
    app.add_option("--mesh", mesh_spec, "disk:<level> | rect:<nx>x<ny> | file:<path>");
    app.add_option("--f", f_text, "nonlinearity, e.g. \"1*s^1 - 1*s^2 + 1*s^3\"");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--tol", tol, "newton and eigen tolerance");
    app.add_option("--dim", dimension, "dimension for bootstrap mode");
    app.add_option("--p", p_exponent, "growth exponent for bootstrap mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) config = parse_config_file(config_path);
        if (!mode.empty()) config.mode = mode;
        if (!mesh_spec.empty()) parse_mesh_spec(config, mesh_spec);
        if (!f_text.empty()) config.f_text = f_text;
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (tol > 0.0) {
            config.opts.newton_tol = tol;
            config.steklov_tol = tol;
        }
        if (dimension > 0) config.dimension = dimension;
        if (p_exponent > 0.0) config.p_exponent = p_exponent;

        if (config.mode.empty()) throw ParseError("missing --mode (or a mode in the config file)");
        const bool needs_f = config.mode == "analyze" || config.mode == "branch" ||
                             config.mode == "limiting" || config.mode == "oracle-compare";
        if (needs_f && config.f_text.empty())
            throw ParseError("mode '" + config.mode + "' needs --f or a [nonlinearity] section");
        if (needs_f) NonlinearitySpec::parse(config.f_text);  // validate early: bad f is a config error
    } catch (const Error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    return run(config);
}

}  // namespace bifurc::cli

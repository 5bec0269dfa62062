#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "polydpg/errors.hpp"
#include "polydpg/solver.hpp"

namespace {

using namespace polydpg;

struct MeshSource {
  std::vector<std::string> files;  // fixture family for uniform refinement
  std::string gen;                 // "grid:nx,ny" | "distorted:level" | "interface:n"
};

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

PolygonalMesh make_mesh(const MeshSource& src, int step, const ManufacturedProblem& problem) {
  if (!src.files.empty()) {
    const size_t i = std::min<size_t>(step, src.files.size() - 1);
    return load_mesh(src.files[i]);
  }
  const auto colon = src.gen.find(':');
  const std::string name = src.gen.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : src.gen.substr(colon + 1);
  if (name == "grid") {
    auto v = parse_ints(params.empty() ? "4,4" : params);
    if (v.size() == 1) v.push_back(v[0]);
    return uniform_grid(v.at(0) << step, v.at(1) << step);
  }
  if (name == "distorted") {
    const int level = params.empty() ? 0 : std::stoi(params);
    return distorted_tessellation(level + step);
  }
  if (name == "interface") {
    const int n = (params.empty() ? 8 : std::stoi(params)) << step;
    PolygonalMesh mesh = interface_cut(uniform_grid(n, n), 0.12, std::atan2(1.0, 0.65));
    mesh.materials = problem.materials;
    return mesh;
  }
  throw ConfigError("unknown generator '" + name + "' (use grid:nx,ny | distorted:level | interface:n)");
}

void validate_dp(const PolygonalMesh& mesh, int p, int dp) {
  if (dp <= 0) return;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const int n = static_cast<int>(mesh.elements[e].size());
    const int need = auto_dp(n, p);
    if (dp < need)
      throw ConfigError("dp=" + std::to_string(dp) + " too small for element " + std::to_string(e) +
                        " with n=" + std::to_string(n) + " sides; requires dp >= " +
                        std::to_string(need));
  }
}

int interior_dofs(const PolygonalMesh& mesh, int p) {
  return mesh.num_elements() * 3 * (p * (p + 1) / 2);
}

void dump_solution(const std::string& path, const Solution& sol) {
  nlohmann::json j;
  j["skeleton"] = std::vector<double>(sol.x.data(), sol.x.data() + sol.x.size());
  auto& elems = j["elements"];
  for (const ElementData& ed : sol.assembly.elems) {
    nlohmann::json je;
    je["interior"] = std::vector<double>(ed.interior.data(), ed.interior.data() + ed.interior.size());
    je["trace_dofs"] = ed.gdofs;
    elems.push_back(je);
  }
  std::ofstream(path) << j.dump() << "\n";
}

int cmd_run(const std::string& problem_name, const MeshSource& src, int p, const std::string& dp_s,
            double eps, const std::string& mode, int steps, const std::string& out_dir, bool dump) {
  if (p < 1 || p > 6) throw ConfigError("p must be in [1, 6]");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  DpgOptions opt;
  opt.p = p;
  opt.eps = eps;
  if (dp_s != "auto") opt.dp = std::stoi(dp_s);
  if (dp_s != "auto" && opt.dp < 1) throw ConfigError("dp must be 'auto' or a positive integer");
  const ManufacturedProblem problem = make_problem(problem_name, p);

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(std::filesystem::path(out_dir) / "study.csv");
  csv << "step,num_elements,h,N_dof_skeleton,N_dof_total,relative_error,eta_total,wall_time_s\n";

  PolygonalMesh mesh = make_mesh(src, 0, problem);
  for (int s = 0; s < steps; ++s) {
    validate_dp(mesh, p, opt.dp);
    const auto t0 = std::chrono::steady_clock::now();
    Solution sol = solve(assemble(mesh, problem, opt), opt);
    const ErrorEstimate est = estimate(sol);
    const double err = relative_error(mesh, sol, problem);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char line[256];
    std::snprintf(line, sizeof(line), "%d,%d,%.17g,%d,%d,%.17g,%.17g,%.3f\n", s,
                  mesh.num_elements(), max_diameter(mesh), sol.report.n_dof,
                  sol.report.n_dof + interior_dofs(mesh, p), err, std::sqrt(est.total2), wall);
    csv << line;
    std::printf("step %d: %d elements, %d skeleton dofs, error %.6e, eta %.6e\n", s,
                mesh.num_elements(), sol.report.n_dof, err, std::sqrt(est.total2));
    if (dump)
      dump_solution((std::filesystem::path(out_dir) / ("solution_step" + std::to_string(s) + ".json"))
                        .string(),
                    sol);
    if (s + 1 == steps) break;
    if (mode == "adaptive") {
      mesh = refine_polygonal(mesh, mark(est));
    } else if (!src.files.empty() || src.gen.empty()) {
      if (src.files.size() > static_cast<size_t>(s + 1))
        mesh = load_mesh(src.files[s + 1]);
      else
        mesh = refine_polygonal(mesh, std::vector<char>(mesh.num_elements(), 1));
    } else {
      mesh = make_mesh(src, s + 1, problem);
    }
  }
  return 0;
}

int cmd_stats(const MeshSource& src) {
  const PolygonalMesh mesh = make_mesh(src, 0, problem_sinsin());
  std::printf("elements: %d\nvertices: %d\nedges: %d\n", mesh.num_elements(), mesh.num_vertices(),
              mesh.num_edges());
  for (const auto& [sides, count] : side_histogram(mesh))
    std::printf("%d-gons: %d\n", sides, count);
  std::printf("h_max: %.6g\ntotal area: %.12g\n", max_diameter(mesh), total_area(mesh));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PolyDPG: ultraweak DPG solver for Poisson problems on polygonal meshes"};
  app.require_subcommand(1);

  std::string problem = "sinsin", dp = "auto", mode = "uniform", out = "out", mesh_arg, gen_arg;
  int p = 2, steps = 1;
  double eps = 1.0;
  bool dump = false;

  CLI::App* run = app.add_subcommand("run", "Solve / run a refinement study");
  run->add_option("--problem", problem, "sinsin | interface | gaussians | polynomial");
  run->add_option("--mesh", mesh_arg, "mesh file, or comma-separated fixture family");
  run->add_option("--gen", gen_arg, "generator: grid:nx,ny | distorted:level | interface:n");
  run->add_option("-p", p, "trial order (1..6)");
  run->add_option("--dp", dp, "test enrichment: auto or a fixed positive integer");
  run->add_option("--eps", eps, "adjoint graph norm scaling parameter");
  run->add_option("--mode", mode, "uniform | adaptive")
      ->check(CLI::IsMember({"uniform", "adaptive"}));
  run->add_option("--steps", steps, "number of refinement steps");
  run->add_option("--out", out, "output directory for study.csv and dumps");
  run->add_flag("--dump-solution", dump, "write per-step JSON coefficient dumps");

  CLI::App* stats = app.add_subcommand("stats", "Print mesh statistics");
  std::string s_mesh, s_gen;
  stats->add_option("--mesh", s_mesh, "mesh file");
  stats->add_option("--gen", s_gen, "generator spec");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      MeshSource src;
      if (!mesh_arg.empty()) {
        std::stringstream ss(mesh_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) src.files.push_back(tok);
      } else if (!gen_arg.empty()) {
        src.gen = gen_arg;
      } else {
        throw ConfigError("one of --mesh or --gen is required");
      }
      return cmd_run(problem, src, p, dp, eps, mode, steps, out, dump);
    }
    MeshSource src;
    if (!s_mesh.empty())
      src.files.push_back(s_mesh);
    else if (!s_gen.empty())
      src.gen = s_gen;
    else
      throw ConfigError("one of --mesh or --gen is required");
    return cmd_stats(src);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

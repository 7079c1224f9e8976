// Command-line front end for the arm kinematics toolkit.
//
// Subcommands: fk (joints -> pose), solve (pose file -> joints),
// refine (pose file -> hybrid analytic + numeric joints), eval (Monte-Carlo
// pose-reconstruction study). Exit codes: 0 success, 2 parse/usage error,
// 3 I/O error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "armkin/armkin.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitIo = 3;

armkin::RobotModel make_model(const std::string& config_path) {
  if (config_path.empty()) return armkin::RobotModel::standard();
  return armkin::load_robot_model(config_path);
}

// "-" selects stdin/stdout.
std::istream& open_input(const std::string& path, std::ifstream& file) {
  if (path == "-") return std::cin;
  file.open(path);
  if (!file) throw std::ios_base::failure("cannot open input: " + path);
  return file;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::ios_base::failure("cannot open output: " + path);
  return file;
}

void print_pose(const armkin::Pose& pose) {
  const armkin::Vec3 ypr = armkin::matrix_to_euler_ypr(pose.rotation);
  std::ostringstream os;
  os.precision(17);
  os << "position_m = " << pose.translation.x() << ' '
     << pose.translation.y() << ' ' << pose.translation.z() << '\n';
  os << "ypr_rad = " << ypr.x() << ' ' << ypr.y() << ' ' << ypr.z() << '\n';
  os << "ypr_deg = " << armkin::rad2deg(ypr.x()) << ' '
     << armkin::rad2deg(ypr.y()) << ' ' << armkin::rad2deg(ypr.z()) << '\n';
  os << "rotation =\n";
  for (int i = 0; i < 3; ++i)
    os << "  " << pose.rotation(i, 0) << ' ' << pose.rotation(i, 1) << ' '
       << pose.rotation(i, 2) << '\n';
  std::cout << os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"5-DoF RRPRR arm kinematics: forward/inverse kinematics, "
               "numeric refinement and Monte-Carlo evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "robot geometry file (key = value; lengths in m, "
                 "range bounds in deg)")
      ->check(CLI::ExistingFile);

  // fk: single configuration via flags (angles in degrees) or batch file
  auto* fk = app.add_subcommand("fk", "forward kinematics");
  double t1 = 0, t2 = 45, d3 = 0.39, t4 = 0, t5 = 90;
  std::string fk_in, fk_out;
  fk->add_option("--theta1", t1, "pan angle (deg)");
  fk->add_option("--theta2", t2, "pitch angle (deg)");
  fk->add_option("--d3", d3, "prismatic extension (m)");
  fk->add_option("--theta4", t4, "wrist roll (deg)");
  fk->add_option("--theta5", t5, "wrist pitch (deg)");
  fk->add_option("--in", fk_in,
                 "batch input: theta1,theta2,d3,theta4,theta5 per line "
                 "(radians/m); '-' for stdin");
  fk->add_option("--out", fk_out, "batch output file (default stdout)");

  // shared solver tolerance flags
  struct SolveFlags {
    std::string in, out;
    double constraint_tol = 1e-8;
    double r2z_tol = 1e-9;
    double d3_slack = 1e-9;
  };
  auto add_solver_flags = [](CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("--in", f.in,
                    "pose rows px,py,pz,yaw,pitch,roll (m/rad); '-' for stdin")
        ->required();
    cmd->add_option("--out", f.out, "output file (default stdout)");
    cmd->add_option("--constraint-tol", f.constraint_tol,
                    "max residual of the reachability identities");
    cmd->add_option("--r2z-tol", f.r2z_tol,
                    "|R2z| threshold for the coplanar branch");
    cmd->add_option("--d3-slack", f.d3_slack,
                    "widening of the prismatic range (m)");
  };

  auto* solve_cmd = app.add_subcommand("solve", "analytical inverse kinematics");
  SolveFlags sf;
  add_solver_flags(solve_cmd, sf);

  auto* refine_cmd =
      app.add_subcommand("refine", "analytic solve plus damped least-squares");
  SolveFlags rf;
  add_solver_flags(refine_cmd, rf);
  int max_iters = 100;
  double damping = 1e-3;
  refine_cmd->add_option("--max-iters", max_iters, "iteration cap")
      ->check(CLI::PositiveNumber);
  refine_cmd->add_option("--damping", damping, "initial damping lambda")
      ->check(CLI::PositiveNumber);

  auto* eval_cmd =
      app.add_subcommand("eval", "Monte-Carlo pose-reconstruction study");
  armkin::EvalOptions eopts;
  double r2z_flag = -1.0;
  std::string eval_out, eval_csv;
  eval_cmd->add_option("--samples", eopts.samples, "number of sampled poses")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eopts.seed, "random seed");
  eval_cmd->add_option("--constraint-tol", eopts.constraint_tol,
                       "acceptance tolerance tau_c");
  eval_cmd->add_option("--r2z-tol", r2z_flag,
                       "branch threshold (defaults to --constraint-tol)");
  eval_cmd->add_option("--d3-slack", eopts.d3_slack,
                       "widening of the prismatic range (m)");
  eval_cmd->add_option("--workers", eopts.workers,
                       "worker threads (0 = hardware)");
  eval_cmd->add_option("--out", eval_out, "report file (default stdout)");
  eval_cmd->add_option("--csv", eval_csv, "per-sample CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    const armkin::RobotModel model = make_model(config_path);

    if (fk->parsed()) {
      if (!fk_in.empty()) {
        std::ifstream inf;
        std::ofstream outf;
        armkin::batch_fk(open_input(fk_in, inf), open_output(fk_out, outf),
                         model);
      } else {
        const armkin::JointVector q{armkin::deg2rad(t1), armkin::deg2rad(t2),
                                    d3, armkin::deg2rad(t4),
                                    armkin::deg2rad(t5)};
        print_pose(armkin::forward_kinematics(model, q));
      }
    } else if (solve_cmd->parsed()) {
      armkin::IkOptions opts;
      opts.constraint_tol = sf.constraint_tol;
      opts.r2z_epsilon = sf.r2z_tol;
      opts.d3_slack = sf.d3_slack;
      std::ifstream inf;
      std::ofstream outf;
      armkin::batch_solve(open_input(sf.in, inf), open_output(sf.out, outf),
                          model, opts);
    } else if (refine_cmd->parsed()) {
      armkin::IkOptions opts;
      opts.constraint_tol = rf.constraint_tol;
      opts.r2z_epsilon = rf.r2z_tol;
      opts.d3_slack = rf.d3_slack;
      armkin::RefineParams params;
      params.max_iters = max_iters;
      params.damping = damping;
      params.residual_tol_pos = 1e-10;
      params.residual_tol_rot = 1e-10;
      std::ifstream inf;
      std::ofstream outf;
      armkin::batch_refine(open_input(rf.in, inf), open_output(rf.out, outf),
                           model, opts, params);
    } else if (eval_cmd->parsed()) {
      if (r2z_flag >= 0.0) eopts.r2z_tol = r2z_flag;
      const armkin::ShellSpec shell = armkin::ShellSpec::from_model(model);
      std::ofstream csvf;
      std::ostream* csv = nullptr;
      if (!eval_csv.empty()) {
        csvf.open(eval_csv);
        if (!csvf)
          throw std::ios_base::failure("cannot open csv: " + eval_csv);
        csv = &csvf;
      }
      const armkin::EvalReport report =
          armkin::run_evaluation(model, shell, eopts, csv);
      std::ofstream outf;
      open_output(eval_out, outf) << report.render();
    }
  } catch (const armkin::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}

#include "fbsyn/eval.hpp"

#include <cmath>

#include "fbsyn/errors.hpp"
#include <iomanip>
#include <limits>
#include <sstream>

namespace fbsyn {

std::string to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::Ok: return "ok";
    case EvalStatus::NoDecay: return "no_decay";
    case EvalStatus::BlowUp: return "blow_up";
  }
  return "ok";
}

EvalRow validate(const DynamicalSystem& system, const FeedbackLaw& law, const Eigen::VectorXd& y0,
                 double beta, double T_val, int n_steps, const EvalOptions& opts) {
  if (T_val <= 0) throw std::invalid_argument("validate: T_val must be positive");
  EvalRow row;
  row.controller = law.name();

  const Trajectory traj =
      integrate_closed_loop(system, law, y0, T_val, n_steps, opts.integrator);
  if (traj.status == TrajectoryStatus::NewtonFailed)
    throw NewtonFailureError("Newton failure during validation", traj.failure_step);
  if (traj.status == TrajectoryStatus::BlewUp) {
    const double inf = std::numeric_limits<double>::infinity();
    row.qy_l2 = row.u_l2 = row.J = inf;
    row.status = EvalStatus::BlowUp;
    return row;
  }

  const int K = traj.n_steps;
  Eigen::VectorXd qy2(K + 1), u2(K + 1);
  for (int k = 0; k <= K; ++k) {
    const Eigen::VectorXd y = traj.states.row(k).transpose();
    qy2(k) = (system.output_matrix * y).squaredNorm();
    u2(k) = law.eval(y).squaredNorm();
  }
  row.qy_l2 = std::sqrt(trapezoid(qy2, traj.h));
  row.u_l2 = std::sqrt(trapezoid(u2, traj.h));
  row.J = 0.5 * (row.qy_l2 * row.qy_l2 + beta * row.u_l2 * row.u_l2);

  const double terminal = traj.states.row(K).lpNorm<Eigen::Infinity>();
  row.status = terminal > opts.decay_tol ? EvalStatus::NoDecay : EvalStatus::Ok;
  return row;
}

std::vector<EvalRow> comparison_table(const DynamicalSystem& system,
                                      const std::vector<std::shared_ptr<const FeedbackLaw>>& laws,
                                      const std::vector<NamedIc>& ics, double beta, double T_val,
                                      int n_steps, const EvalOptions& opts) {
  std::vector<EvalRow> rows;
  rows.reserve(laws.size() * ics.size());
  for (const auto& ic : ics) {
    for (const auto& law : laws) {
      EvalRow row;
      try {
        row = validate(system, *law, ic.y0, beta, T_val, n_steps, opts);
      } catch (const std::exception& e) {
        row.controller = law->name();
        row.qy_l2 = row.u_l2 = row.J = std::numeric_limits<double>::infinity();
        row.status = EvalStatus::BlowUp;  // cell failed; keep the table going
      }
      row.ic_name = ic.name;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string format_value(double v) {
  if (std::isinf(v)) return "+inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

std::string table_to_csv(const std::vector<EvalRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "ic,controller,qy_l2,u_l2,J,status\n";
  for (const auto& r : rows)
    os << r.ic_name << "," << r.controller << "," << r.qy_l2 << "," << r.u_l2 << "," << r.J << ","
       << to_string(r.status) << "\n";
  return os.str();
}

std::string table_to_text(const std::vector<EvalRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "ic" << std::setw(10) << "F" << std::right << std::setw(12)
     << "|Qy|_L2" << std::setw(12) << "|F(y)|_L2" << std::setw(12) << "J" << "  status\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(16) << r.ic_name << std::setw(10) << r.controller << std::right
       << std::setw(12) << format_value(r.qy_l2) << std::setw(12) << format_value(r.u_l2)
       << std::setw(12) << format_value(r.J) << "  " << to_string(r.status) << "\n";
  }
  return os.str();
}

}  // namespace fbsyn

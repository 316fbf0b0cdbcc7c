#include "socp/trace.hpp"

#include <cmath>

#include "json.hpp"

namespace socp {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::InfeasibleStationary: return "InfeasibleStationary";
    case SolveStatus::IterationCap: return "IterationCap";
    case SolveStatus::InnerStall: return "InnerStall";
    case SolveStatus::SubproblemFailure: return "SubproblemFailure";
  }
  return "?";
}

namespace {

using nlohmann::ordered_json;

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

template <class T>
void put(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (!v) return;
  if constexpr (std::is_same_v<T, double>) j[key] = num(*v);
  else j[key] = *v;
}

}  // namespace

std::string Trace::to_json() const {
  ordered_json out;
  out["solver"] = solver;
  out["problem"] = problem;
  out["status"] = status;
  ordered_json rs = ordered_json::array();
  for (const TraceRow& r : rows) {
    ordered_json j;
    j["k"] = r.k;
    j["x"] = r.x;
    j["mu"] = r.mu;
    j["omega"] = r.omega;
    j["rho"] = r.rho;
    j["eps"] = r.eps;
    j["stationarity"] = num(r.stationarity);
    j["r_V"] = num(r.r_v);
    j["akkt_comp"] = num(r.akkt_comp);
    j["cakkt_comp"] = num(r.cakkt_comp);
    j["so_residual"] = num(r.so_residual);
    put(j, "inner_iterations", r.inner_iterations);
    put(j, "inner_grad_norm", r.inner_grad_norm);
    put(j, "inner_min_eig", r.inner_min_eig);
    put(j, "infeasibility", r.infeasibility);
    put(j, "penalty_kept", r.penalty_kept);
    put(j, "class", r.vomf_class);
    put(j, "r_O", r.r_o);
    put(j, "Phi", r.phi_measure);
    put(j, "Psi", r.psi_measure);
    put(j, "merit_grad_norm", r.merit_grad_norm);
    put(j, "step", r.step);
    put(j, "backtracks", r.backtracks);
    put(j, "subqp_residual", r.subqp_residual);
    put(j, "phi", r.phi);
    put(j, "psi", r.psi);
    put(j, "gamma", r.gamma);
    put(j, "rho_halved", r.rho_halved);
    rs.push_back(std::move(j));
  }
  out["rows"] = std::move(rs);
  return out.dump(2);
}

}  // namespace socp

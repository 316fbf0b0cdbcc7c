#include <cmath>
#include <functional>
#include <map>

#include "socp/model.hpp"

namespace socp {

namespace {

using Factory = std::function<ProblemSpec()>;

const std::map<std::string, Factory>& registry() {
  static const std::map<std::string, Factory> r = [] {
    std::map<std::string, Factory> m;
#ifndef SOCP_EMPTY_REGISTRY
    m["paper_example"] = [] {
      ProblemSpec s;
      s.name = "paper_example";
      s.n = 2;
      s.objective = "-x1 - x2";
      s.cones = {{"1", "x1^2 * x2^2"}};
      s.start = Vector{0.9, 0.9};
      s.probe = {"x1", "-x2"};
      s.known_solution = KnownSolution{{1.0, 1.0}, {}, {0.5, -0.5},
                                       "KKT and AKKT point that is not AKKT2; WSONC fails"};
      return s;
    };
    m["scalar_soc"] = [] {
      ProblemSpec s;
      s.name = "scalar_soc";
      s.n = 1;
      s.objective = "x1";
      s.cones = {{"x1", "1"}};
      s.start = Vector{0.0};
      s.known_solution = KnownSolution{{1.0}, {}, {1.0, -1.0}, "boundary solution, x1 >= 1"};
      return s;
    };
    m["degenerate_eq"] = [] {
      ProblemSpec s;
      s.name = "degenerate_eq";
      s.n = 1;
      s.objective = "x1";
      s.equalities = {"x1^2"};
      s.start = Vector{1.0};
      s.known_solution = KnownSolution{{0.0}, {}, {}, "feasible set {0}; no KKT multiplier exists"};
      return s;
    };
    m["rotated_cone_projection"] = [] {
      ProblemSpec s;
      s.name = "rotated_cone_projection";
      s.n = 3;
      s.objective = "0.5*(x1^2 + x2^2 + (x3 - 1)^2)";
      s.cones = {{"x1 + x2", "x1 - x2", "sqrt(2)*x3"}};
      s.start = Vector{1.0, 1.0, 0.0};
      const double a = 1.0 / (2.0 * std::sqrt(2.0));
      s.known_solution = KnownSolution{{a, a, 0.5}, {}, {a, 0.0, -a},
                                       "projection of (0,0,1) onto {2 x1 x2 >= x3^2, x1 + x2 >= 0}"};
      return s;
    };
    m["interior_qp"] = [] {
      ProblemSpec s;
      s.name = "interior_qp";
      s.n = 2;
      s.objective = "(x1 - 1)^2 + (x2 - 0.5)^2";
      s.cones = {{"2", "x1", "x2"}};
      s.start = Vector{0.0, 0.0};
      s.known_solution = KnownSolution{{1.0, 0.5}, {}, {0.0, 0.0, 0.0}, "interior solution"};
      return s;
    };
    m["apex_qp"] = [] {
      ProblemSpec s;
      s.name = "apex_qp";
      s.n = 2;
      s.objective = "(x1 + 1)^2 + x2^2";
      s.cones = {{"x1", "x2"}};
      s.start = Vector{1.0, 0.5};
      s.known_solution = KnownSolution{{0.0, 0.0}, {}, {2.0, 0.0}, "solution at the cone apex"};
      return s;
    };
    m["eq_cone"] = [] {
      ProblemSpec s;
      s.name = "eq_cone";
      s.n = 3;
      s.objective = "x3";
      s.equalities = {"x1 + x2 - 2"};
      s.cones = {{"x3", "x1", "x2"}};
      s.start = Vector{2.0, 0.0, 3.0};
      const double r = 1.0 / std::sqrt(2.0);
      s.known_solution = KnownSolution{{1.0, 1.0, std::sqrt(2.0)}, {-r}, {1.0, -r, -r},
                                       "equality plus boundary cone constraint"};
      return s;
    };
#endif
    return m;
  }();
  return r;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [k, _] : registry()) out.push_back(k);
  return out;
}

Problem builtin(const std::string& name) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) {
    std::string avail;
    for (const auto& [k, _] : r) avail += (avail.empty() ? "" : ", ") + k;
    throw SpecError("unknown builtin '" + name + "'; available: " + (avail.empty() ? "(none)" : avail));
  }
  return Problem(it->second());
}

}  // namespace socp

#include "socp/model.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace socp {

using nlohmann::json;

namespace {

Expr parse_at(const std::string& text, std::size_t n, const std::string& where) {
  try {
    return parse_expr(text, n);
  } catch (const ParseError& e) {
    throw SpecError(where + ": " + e.what());
  }
}

}  // namespace

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) {
  const std::size_t n = spec_.n;
  if (n == 0) throw SpecError("n: must be >= 1");
  f_ = build(parse_at(spec_.objective, n, "objective"));
  for (std::size_t i = 0; i < spec_.equalities.size(); ++i)
    h_.push_back(build(parse_at(spec_.equalities[i], n, "equalities[" + std::to_string(i) + "]")));
  std::vector<std::size_t> dims;
  for (std::size_t b = 0; b < spec_.cones.size(); ++b) {
    if (spec_.cones[b].empty()) throw SpecError("cones[" + std::to_string(b) + "]: empty block");
    dims.push_back(spec_.cones[b].size());
    for (std::size_t j = 0; j < spec_.cones[b].size(); ++j)
      g_.push_back(build(parse_at(spec_.cones[b][j], n,
                                  "cones[" + std::to_string(b) + "][" + std::to_string(j) + "]")));
  }
  cone_ = ConeProduct(dims);
  if (!spec_.probe.empty()) {
    if (spec_.probe.size() != n) throw SpecError("probe: needs one expression per variable");
    for (std::size_t i = 0; i < n; ++i)
      probe_.push_back(parse_at(spec_.probe[i], n, "probe[" + std::to_string(i) + "]"));
  }
  if (spec_.start && spec_.start->size() != n) throw SpecError("start: length must equal n");
  if (const auto& ks = spec_.known_solution) {
    if (ks->x.size() != n) throw SpecError("known_solution.x: length must equal n");
    if (!ks->mu.empty() && ks->mu.size() != p()) throw SpecError("known_solution.mu: length must equal p");
    if (!ks->omega.empty() && ks->omega.size() != m())
      throw SpecError("known_solution.omega: length must equal m");
  }
}

Problem::Fn Problem::build(const Expr& e) const {
  Fn fn;
  fn.value = e;
  const std::size_t n = spec_.n;
  for (std::size_t i = 0; i < n; ++i) fn.grad.push_back(differentiate(e, i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) fn.hess.push_back(differentiate(fn.grad[i], j));
  return fn;
}

Vector Problem::start() const { return spec_.start ? *spec_.start : Vector(spec_.n, 0.0); }

Vector Problem::probe(std::span<const double> x) const {
  Vector d;
  for (const auto& e : probe_) d.push_back(evaluate(e, x));
  return d;
}

Vector Problem::eval_grad(const Fn& fn, std::span<const double> x) const {
  Vector out(spec_.n);
  for (std::size_t i = 0; i < spec_.n; ++i) out[i] = evaluate(fn.grad[i], x);
  return out;
}

void Problem::add_hess(const Fn& fn, std::span<const double> x, double w, SymMatrix& out) const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < spec_.n; ++i)
    for (std::size_t j = i; j < spec_.n; ++j, ++k) {
      const Expr& e = fn.hess[k];
      if (e->op == Op::Const && e->value == 0.0) continue;
      out.add_to(i, j, w * evaluate(e, x));
    }
}

double Problem::f(std::span<const double> x) const { return evaluate(f_.value, x); }
Vector Problem::grad_f(std::span<const double> x) const { return eval_grad(f_, x); }

SymMatrix Problem::hess_f(std::span<const double> x) const {
  SymMatrix out(spec_.n);
  add_hess(f_, x, 1.0, out);
  return out;
}

Vector Problem::g(std::span<const double> x) const {
  Vector out;
  out.reserve(g_.size());
  for (const auto& fn : g_) out.push_back(evaluate(fn.value, x));
  return out;
}

Matrix Problem::dg(std::span<const double> x) const {
  Matrix out(g_.size(), spec_.n);
  for (std::size_t r = 0; r < g_.size(); ++r)
    for (std::size_t i = 0; i < spec_.n; ++i) out(r, i) = evaluate(g_[r].grad[i], x);
  return out;
}

Vector Problem::h(std::span<const double> x) const {
  Vector out;
  out.reserve(h_.size());
  for (const auto& fn : h_) out.push_back(evaluate(fn.value, x));
  return out;
}

Matrix Problem::dh(std::span<const double> x) const {
  Matrix out(h_.size(), spec_.n);
  for (std::size_t r = 0; r < h_.size(); ++r)
    for (std::size_t i = 0; i < spec_.n; ++i) out(r, i) = evaluate(h_[r].grad[i], x);
  return out;
}

SymMatrix Problem::hess_g_weighted(std::span<const double> x, std::span<const double> w) const {
  SymMatrix out(spec_.n);
  for (std::size_t r = 0; r < g_.size(); ++r)
    if (w[r] != 0.0) add_hess(g_[r], x, w[r], out);
  return out;
}

SymMatrix Problem::hess_h_weighted(std::span<const double> x, std::span<const double> w) const {
  SymMatrix out(spec_.n);
  for (std::size_t r = 0; r < h_.size(); ++r)
    if (w[r] != 0.0) add_hess(h_[r], x, w[r], out);
  return out;
}

namespace {

void check_dims(const Problem& p, std::span<const double> x, std::span<const double> mu,
                std::span<const double> omega) {
  if (x.size() != p.n() || mu.size() != p.p() || omega.size() != p.m())
    throw std::invalid_argument("dimension mismatch: expected x[" + std::to_string(p.n()) + "], mu[" +
                                std::to_string(p.p()) + "], omega[" + std::to_string(p.m()) + "]");
}

}  // namespace

Vector lagrangian_grad(const Problem& p, std::span<const double> x, std::span<const double> mu,
                       std::span<const double> omega) {
  check_dims(p, x, mu, omega);
  Vector gl = p.grad_f(x);
  const Vector a = p.dh(x).multiply_transpose(mu);
  const Vector b = p.dg(x).multiply_transpose(omega);
  for (std::size_t i = 0; i < gl.size(); ++i) gl[i] += a[i] - b[i];
  return gl;
}

LagrangianData eval_lagrangian_data(const Problem& p, std::span<const double> x,
                                    std::span<const double> mu, std::span<const double> omega) {
  check_dims(p, x, mu, omega);
  LagrangianData d;
  d.g = p.g(x);
  d.h = p.h(x);
  d.dg = p.dg(x);
  d.dh = p.dh(x);
  d.grad_l = p.grad_f(x);
  const Vector a = d.dh.multiply_transpose(mu);
  const Vector b = d.dg.multiply_transpose(omega);
  for (std::size_t i = 0; i < d.grad_l.size(); ++i) d.grad_l[i] += a[i] - b[i];
  d.hess_l = p.hess_f(x);
  d.hess_l.add_scaled(1.0, p.hess_h_weighted(x, mu));
  d.hess_l.add_scaled(-1.0, p.hess_g_weighted(x, omega));
  return d;
}

// ---- finite differences ------------------------------------------------------

FdAuditReport finite_diff_audit(const Problem& p, std::span<const double> x_in, double h,
                                double flag_tol) {
  FdAuditReport rep;
  const std::size_t n = p.n();
  Vector x(x_in.begin(), x_in.end());

  struct Component {
    std::string what;
    std::function<double(std::span<const double>)> value;
    std::function<Vector(std::span<const double>)> grad;
    std::function<SymMatrix(std::span<const double>)> hess;
  };
  std::vector<Component> comps;
  comps.push_back({"f", [&](auto z) { return p.f(z); }, [&](auto z) { return p.grad_f(z); },
                   [&](auto z) { return p.hess_f(z); }});
  for (std::size_t r = 0; r < p.m(); ++r) {
    Vector e(p.m(), 0.0);
    e[r] = 1.0;
    comps.push_back({"g[" + std::to_string(r) + "]", [&, r](auto z) { return p.g(z)[r]; },
                     [&, r](auto z) { const Matrix d = p.dg(z); return Vector(d.row(r).begin(), d.row(r).end()); },
                     [&, e](auto z) { return p.hess_g_weighted(z, e); }});
  }
  for (std::size_t r = 0; r < p.p(); ++r) {
    Vector e(p.p(), 0.0);
    e[r] = 1.0;
    comps.push_back({"h[" + std::to_string(r) + "]", [&, r](auto z) { return p.h(z)[r]; },
                     [&, r](auto z) { const Matrix d = p.dh(z); return Vector(d.row(r).begin(), d.row(r).end()); },
                     [&, e](auto z) { return p.hess_h_weighted(z, e); }});
  }

  auto record = [&](const std::string& what, const char* kind, std::size_t i, std::size_t j, double a,
                    double num, double& worst) {
    double err = std::abs(a - num) / std::max(1.0, std::abs(num));
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    worst = std::max(worst, err);
    if (!(err <= flag_tol)) rep.flagged.push_back({what, kind, i, j, a, num, err});
  };

  for (const auto& c : comps) {
    const Vector ga = c.grad(x);
    const SymMatrix ha = c.hess(x);
    for (std::size_t i = 0; i < n; ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      record(c.what, "grad", i, 0, ga[i], (c.value(xp) - c.value(xm)) / (2.0 * h), rep.max_rel_grad);
      const Vector gp = c.grad(xp), gm = c.grad(xm);
      for (std::size_t j = 0; j < n; ++j)
        record(c.what, "hess", j, i, ha(j, i), (gp[j] - gm[j]) / (2.0 * h), rep.max_rel_hess);
    }
  }
  return rep;
}

// ---- JSON --------------------------------------------------------------------

namespace {

Vector read_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw SpecError(where + ": expected an array of numbers");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SpecError(where + "[" + std::to_string(i) + "]: expected a number");
    v.push_back(j[i].get<double>());
  }
  return v;
}

std::string read_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw SpecError(where + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

ProblemSpec parse_problem_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError("offset " + std::to_string(e.byte) + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw SpecError("document: expected an object");
  static const char* known[] = {"name", "n", "objective", "equalities", "cones", "known_solution", "start", "probe"};
  for (const auto& [key, _] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw SpecError(key + ": unknown field");
  }

  ProblemSpec s;
  if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<long long>() < 1)
    throw SpecError("n: required positive integer");
  s.n = doc["n"].get<std::size_t>();
  if (!doc.contains("objective")) throw SpecError("objective: required");
  s.objective = read_string(doc["objective"], "objective");
  if (doc.contains("name")) s.name = read_string(doc["name"], "name");
  if (doc.contains("equalities")) {
    if (!doc["equalities"].is_array()) throw SpecError("equalities: expected an array of strings");
    for (std::size_t i = 0; i < doc["equalities"].size(); ++i)
      s.equalities.push_back(read_string(doc["equalities"][i], "equalities[" + std::to_string(i) + "]"));
  }
  if (doc.contains("cones")) {
    if (!doc["cones"].is_array()) throw SpecError("cones: expected an array of blocks");
    for (std::size_t b = 0; b < doc["cones"].size(); ++b) {
      const json& blk = doc["cones"][b];
      const std::string where = "cones[" + std::to_string(b) + "]";
      if (!blk.is_array()) throw SpecError(where + ": expected an array of strings");
      std::vector<std::string> exprs;
      for (std::size_t j = 0; j < blk.size(); ++j)
        exprs.push_back(read_string(blk[j], where + "[" + std::to_string(j) + "]"));
      s.cones.push_back(std::move(exprs));
    }
  }
  if (doc.contains("start")) s.start = read_vector(doc["start"], "start");
  if (doc.contains("probe")) {
    if (!doc["probe"].is_array()) throw SpecError("probe: expected an array of strings");
    for (std::size_t i = 0; i < doc["probe"].size(); ++i)
      s.probe.push_back(read_string(doc["probe"][i], "probe[" + std::to_string(i) + "]"));
  }
  if (doc.contains("known_solution")) {
    const json& k = doc["known_solution"];
    if (!k.is_object()) throw SpecError("known_solution: expected an object");
    KnownSolution ks;
    if (!k.contains("x")) throw SpecError("known_solution.x: required");
    ks.x = read_vector(k["x"], "known_solution.x");
    if (k.contains("mu")) ks.mu = read_vector(k["mu"], "known_solution.mu");
    if (k.contains("omega")) ks.omega = read_vector(k["omega"], "known_solution.omega");
    if (k.contains("note")) ks.note = read_string(k["note"], "known_solution.note");
    s.known_solution = ks;
  }
  return s;
}

ProblemSpec load_problem_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_problem_spec(ss.str());
  } catch (const SpecError& e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::string dump_problem_spec(const ProblemSpec& s) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["name"] = s.name;
  doc["n"] = s.n;
  doc["objective"] = s.objective;
  doc["equalities"] = s.equalities;
  doc["cones"] = s.cones;
  if (s.start) doc["start"] = *s.start;
  if (!s.probe.empty()) doc["probe"] = s.probe;
  if (s.known_solution) {
    nlohmann::ordered_json k = nlohmann::ordered_json::object();
    k["x"] = s.known_solution->x;
    k["mu"] = s.known_solution->mu;
    k["omega"] = s.known_solution->omega;
    k["note"] = s.known_solution->note;
    doc["known_solution"] = k;
  }
  return doc.dump(2);
}

}  // namespace socp

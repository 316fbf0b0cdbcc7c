#include "socp/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

namespace socp::cli {

using nlohmann::ordered_json;

namespace {

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string fmt(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw UsageError(key + ": expected a number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw UsageError(key + ": expected an integer, got '" + v + "'");
  return static_cast<int>(out);
}

std::pair<std::string, std::string> split_kv(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error(path + ": cannot write file");
  f << text << '\n';
}

std::string substitute(const std::string& path, const std::string& name, bool batch) {
  const std::string key = "{problem}";
  const auto at = path.find(key);
  if (at == std::string::npos) {
    if (batch) throw UsageError("output path '" + path + "' needs a {problem} placeholder with several problems");
    return path;
  }
  return path.substr(0, at) + name + path.substr(at + key.size());
}

}  // namespace

Problem ProblemSource::load() const {
  if (!builtin.empty()) {
    const auto names = registry();
    if (std::find(names.begin(), names.end(), builtin) == names.end())
      throw UsageError("unknown builtin problem '" + builtin + "'");
    return socp::builtin(builtin);
  }
  return Problem(load_problem_spec(spec_path));
}

Vector parse_vector(const std::string& text) {
  Vector out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double("vector", item));
  if (!text.empty() && text.back() == ',') throw UsageError("vector: trailing comma in '" + text + "'");
  return out;
}

void apply_overrides(AuglagConfig& c, const std::vector<std::string>& kv, Vector* x0) {
  const std::map<std::string, double*> reals = {
      {"gamma", &c.gamma},         {"rho1", &c.rho1},           {"tau", &c.tau},
      {"eps0", &c.eps0},           {"eps_factor", &c.eps_factor}, {"eps_floor", &c.eps_floor},
      {"mu_max", &c.mu_max},       {"omega_max", &c.omega_max}, {"tol", &c.tol},
      {"rho_max", &c.rho_max},     {"cert_set_tol", &c.cert_set_tol}};
  const std::map<std::string, int*> ints = {{"max_outer", &c.max_outer}, {"max_inner", &c.max_inner}};
  for (const auto& item : kv) {
    const auto [k, v] = split_kv(item);
    if (auto it = reals.find(k); it != reals.end()) *it->second = parse_double(k, v);
    else if (auto jt = ints.find(k); jt != ints.end()) *jt->second = parse_int(k, v);
    else if (k == "x0" && x0) *x0 = parse_vector(v);
    else throw UsageError("unknown auglag setting '" + k + "'");
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void apply_overrides(SqpConfig& c, const std::vector<std::string>& kv, Vector* x0, Vector* mu0, Vector* omega0) {
  const std::map<std::string, double*> reals = {
      {"tau", &c.tau},       {"alpha", &c.alpha},         {"beta", &c.beta},
      {"kappa", &c.kappa},   {"mu_max", &c.mu_max},       {"omega_max", &c.omega_max},
      {"phi0", &c.phi0},     {"psi0", &c.psi0},           {"gamma0", &c.gamma0},
      {"rho0", &c.rho0},     {"eps0", &c.eps0},           {"eps_factor", &c.eps_factor},
      {"eps_floor", &c.eps_floor}, {"nu1", &c.nu1},       {"nu2", &c.nu2},
      {"grad_zero_tol", &c.grad_zero_tol}, {"tol", &c.tol}, {"rho_min", &c.rho_min},
      {"subqp_tol", &c.subqp_tol}, {"cert_set_tol", &c.cert_set_tol}};
  const std::map<std::string, int*> ints = {{"freeze_after", &c.freeze_after},
                                            {"max_iter", &c.max_iter},
                                            {"max_backtracks", &c.max_backtracks},
                                            {"subqp_cap", &c.subqp_cap}};
  for (const auto& item : kv) {
    const auto [k, v] = split_kv(item);
    if (auto it = reals.find(k); it != reals.end()) *it->second = parse_double(k, v);
    else if (auto jt = ints.find(k); jt != ints.end()) *jt->second = parse_int(k, v);
    else if (k == "hessian") {
      if (v == "exact") c.hessian = HessianStrategy::ExactFloored;
      else if (v == "identity") c.hessian = HessianStrategy::Identity;
      else throw UsageError("hessian: expected exact or identity, got '" + v + "'");
    } else if (k == "x0" && x0) *x0 = parse_vector(v);
    else if (k == "mu0" && mu0) *mu0 = parse_vector(v);
    else if (k == "omega0" && omega0) *omega0 = parse_vector(v);
    else throw UsageError("unknown sqp setting '" + k + "'");
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void apply_overrides(PenaltyPathOptions& c, const std::vector<std::string>& kv) {
  for (const auto& item : kv) {
    const auto [k, v] = split_kv(item);
    if (k == "rho") c.rho = parse_vector(v);
    else if (k == "inner_tol") c.inner_tol = parse_vector(v);
    else if (k == "max_inner") c.max_inner = parse_int(k, v);
    else if (k == "set_tol") c.set_tol = parse_double(k, v);
    else if (k == "mode") {
      if (v == "stationary") c.mode = PenaltyMode::Stationary;
      else if (v == "minimize") c.mode = PenaltyMode::Minimize;
      else throw UsageError("mode: expected stationary or minimize, got '" + v + "'");
    } else throw UsageError("unknown penalty-path setting '" + k + "'");
  }
  if (c.rho.empty()) throw UsageError("rho: at least one value required");
  for (double r : c.rho)
    if (!(r > 0.0)) throw UsageError("rho: values must be > 0");
  if (!c.inner_tol.empty() && c.inner_tol.size() != c.rho.size())
    throw UsageError("inner_tol: needs one value per rho");
}

void validate_omega(const ConeProduct& cone, std::span<const double> omega) {
  if (omega.size() != cone.total())
    throw UsageError("omega: expected " + std::to_string(cone.total()) + " entries, got " +
                     std::to_string(omega.size()));
  for (std::size_t i = 0; i < cone.blocks(); ++i) {
    const double e = eta_min(cone.block(omega, i));
    if (e < -1e-9) throw UsageError("omega block " + std::to_string(i) + " is not in K (eta_min = " + fmt(e) + ")");
  }
}

std::vector<std::string> registry() {
#ifdef SOCP_EMPTY_REGISTRY
  return {};
#else
  return builtin_names();
#endif
}

// ---- solve -----------------------------------------------------------------

namespace {

struct Outcome {
  std::string name;
  int code = kOk;
  ordered_json summary;
  std::string trace, cert;
  std::string error;
};

int code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return kOk;
    case SolveStatus::IterationCap:
    case SolveStatus::InfeasibleStationary: return kNotConverged;
    default: return kError;
  }
}

Trace trace_from_certificate(const Akkt2Certificate& c, const std::string& problem) {
  Trace t;
  t.solver = "penalty-path";
  t.problem = problem;
  for (const CertificateRow& r : c.rows()) {
    TraceRow row;
    row.k = r.k;
    row.x = r.x;
    row.mu = r.mu;
    row.omega = r.omega;
    row.rho = r.rho;
    row.stationarity = r.stationarity;
    row.r_v = r.r_v;
    row.akkt_comp = r.akkt_comp;
    row.cakkt_comp = r.cakkt_comp;
    row.so_residual = r.so_residual;
    t.rows.push_back(row);
  }
  return t;
}

ordered_json residual_block(const Problem& p, std::span<const double> x, std::span<const double> mu,
                            std::span<const double> omega, const CertificateRow* last) {
  const FirstOrderResiduals fo = first_order_residuals(p, x, mu, omega);
  ordered_json r;
  r["stationarity"] = num(fo.stationarity);
  r["r_V"] = num(fo.feasibility);
  r["akkt_comp"] = num(fo.akkt_comp);
  r["cakkt_comp"] = num(fo.cakkt_comp);
  r["so_residual"] = last ? num(last->so_residual) : ordered_json(nullptr);
  return r;
}

Outcome solve_one(const RunConfig& cfg, const ProblemSource& src) {
  Outcome o;
  o.name = src.label();
  const Problem p = src.load();
  o.name = p.name();
  ordered_json s;
  s["problem"] = p.name();
  s["solver"] = cfg.solver;
  s["status"] = nullptr;
  Vector x, mu, omega;
  std::string status;
  const Akkt2Certificate* cert = nullptr;
  Akkt2Certificate cert_store;
  Trace trace;
  std::optional<double> r_o;

  if (cfg.solver == "auglag") {
    AuglagConfig c;
    Vector x0 = p.start();
    apply_overrides(c, cfg.overrides, &x0);
    if (x0.size() != p.n()) throw UsageError("x0: expected " + std::to_string(p.n()) + " entries");
    AuglagResult r = auglag_solve(p, c, x0);
    x = r.x;
    mu = r.mu;
    omega = r.omega;
    status = to_string(r.status);
    o.code = code_for(r.status);
    cert_store = std::move(r.certificate);
    trace = std::move(r.trace);
    s["iterations"] = trace.rows.size();
    s["max_outside_omega0"] = num(r.max_outside_omega0);
  } else if (cfg.solver == "sqp") {
    SqpConfig c;
    Vector x0 = p.start(), mu0, omega0;
    apply_overrides(c, cfg.overrides, &x0, &mu0, &omega0);
    if (x0.size() != p.n()) throw UsageError("x0: expected " + std::to_string(p.n()) + " entries");
    if (!omega0.empty()) validate_omega(p.cone(), omega0);
    SqpResult r = sqp_solve(p, c, x0, mu0, omega0);
    x = r.x;
    mu = r.mu;
    omega = r.omega;
    status = to_string(r.status);
    o.code = code_for(r.status);
    cert_store = std::move(r.certificate);
    trace = std::move(r.trace);
    r_o = r.final_measures.r_o;
    s["iterations"] = trace.rows.size();
    s["max_subqp_residual"] = num(r.max_subqp_residual);
  } else if (cfg.solver == "penalty-path") {
    if (!cfg.hint) throw UsageError("penalty-path needs --hint");
    if (cfg.hint->size() != p.n()) throw UsageError("hint: expected " + std::to_string(p.n()) + " entries");
    PenaltyPathOptions opt;
    apply_overrides(opt, cfg.overrides);
    cert_store = penalty_path(p, *cfg.hint, opt);
    const CertificateRow& last = cert_store.rows().back();
    x = last.x;
    mu = last.mu;
    omega = last.omega;
    const bool all = std::all_of(cert_store.rows().begin(), cert_store.rows().end(),
                                 [](const CertificateRow& r) { return r.converged; });
    status = all ? "Converged" : "IterationCap";
    o.code = all ? kOk : kNotConverged;
    trace = trace_from_certificate(cert_store, p.name());
    trace.status = status;
    s["iterations"] = cert_store.rows().size();
  } else {
    throw UsageError("unknown solver '" + cfg.solver + "' (auglag, sqp, penalty-path)");
  }
  cert = &cert_store;

  s["status"] = status;
  s["x"] = x;
  s["mu"] = mu;
  s["omega"] = omega;
  ordered_json res = residual_block(p, x, mu, omega, cert->empty() ? nullptr : &cert->rows().back());
  if (r_o) res["r_O"] = num(*r_o);
  s["residuals"] = res;
  if (p.known_solution() && p.known_solution()->x.size() == x.size())
    s["distance_to_known"] = num(norm2(sub(x, p.known_solution()->x)));
  else
    s["distance_to_known"] = nullptr;
  s["seed"] = cfg.seed;
  o.summary = std::move(s);
  o.trace = trace.to_json();
  o.cert = cert->to_json();
  return o;
}

void print_summary(const ordered_json& s, std::ostream& out) {
  auto vec = [](const ordered_json& j) {
    Vector v = j.get<Vector>();
    return fmt(v);
  };
  out << "problem      " << s["problem"].get<std::string>() << '\n';
  out << "solver       " << s["solver"].get<std::string>() << '\n';
  out << "status       " << s["status"].get<std::string>() << '\n';
  out << "iterations   " << s["iterations"].get<std::size_t>() << '\n';
  out << "x            " << vec(s["x"]) << '\n';
  out << "mu           " << vec(s["mu"]) << '\n';
  out << "omega        " << vec(s["omega"]) << '\n';
  for (const auto& [k, v] : s["residuals"].items())
    out << std::left << std::setw(13) << k << (v.is_null() ? std::string("n/a") : fmt(v.get<double>())) << '\n';
  if (!s["distance_to_known"].is_null()) out << "|x - x*|     " << fmt(s["distance_to_known"].get<double>()) << '\n';
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.problems.empty()) {
    err << "error: solve needs --problem or --spec\n";
    return kError;
  }
  const bool batch = cfg.problems.size() > 1;
  try {
    if (!cfg.trace_path.empty()) substitute(cfg.trace_path, "", batch);
    if (!cfg.cert_path.empty()) substitute(cfg.cert_path, "", batch);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  std::vector<Outcome> results(cfg.problems.size());
  auto work = [&](std::size_t i) {
    try {
      results[i] = solve_one(cfg, cfg.problems[i]);
    } catch (const std::exception& e) {
      results[i].name = cfg.problems[i].label();
      results[i].code = kError;
      results[i].error = e.what();
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(cfg.problems.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < results.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < results.size(); i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }

  int code = kOk;
  ordered_json all = ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    Outcome& o = results[i];
    if (!o.error.empty()) {
      err << "error: " << (o.error.rfind(o.name, 0) == 0 ? "" : o.name + ": ") << o.error << '\n';
      code = std::max(code, o.code);
      continue;
    }
    try {
      if (!cfg.trace_path.empty()) write_file(substitute(cfg.trace_path, o.name, batch), o.trace);
      if (!cfg.cert_path.empty()) write_file(substitute(cfg.cert_path, o.name, batch), o.cert);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      code = kError;
      continue;
    }
    code = std::max(code, o.code);
    if (cfg.format == Format::Json) {
      all.push_back(o.summary);
    } else {
      if (i) out << '\n';
      print_summary(o.summary, out);
    }
  }
  if (cfg.format == Format::Json) out << (batch ? all.dump(2) : all.empty() ? "null" : all[0].dump(2)) << '\n';
  return code;
}

// ---- check -----------------------------------------------------------------

namespace {

struct CheckLine {
  std::string name;
  bool pass = false;
  ordered_json values = ordered_json::object();
};

struct Point {
  Vector x, mu, omega;
  std::optional<double> rho;
};

std::vector<Point> load_sequence(const std::string& path, const Problem& p) {
  std::ifstream in(path);
  if (!in) throw UsageError(path + ": cannot open file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path + ": byte " + std::to_string(e.byte) + ": invalid JSON");
  }
  if (!doc.is_array() || doc.empty()) throw UsageError(path + ": expected a non-empty array of rows");
  std::vector<Point> out;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const auto& r = doc[k];
    const std::string where = path + ": row " + std::to_string(k);
    if (!r.is_object() || !r.contains("x")) throw UsageError(where + ": needs an object with x");
    Point pt;
    try {
      pt.x = r["x"].get<Vector>();
      pt.mu = r.contains("mu") ? r["mu"].get<Vector>() : Vector(p.p(), 0.0);
      pt.omega = r.contains("omega") ? r["omega"].get<Vector>() : Vector(p.m(), 0.0);
      if (r.contains("rho")) pt.rho = r["rho"].get<double>();
    } catch (const nlohmann::json::exception&) {
      throw UsageError(where + ": x, mu, omega must be number arrays and rho a number");
    }
    if (pt.x.size() != p.n() || pt.mu.size() != p.p())
      throw UsageError(where + ": wrong length for x or mu");
    try {
      validate_omega(p.cone(), pt.omega);
    } catch (const UsageError& e) {
      throw UsageError(where + ": " + e.what());
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<CheckLine> run_checks(const Problem& p, const Point& pt, const CheckRequest& req) {
  std::vector<CheckLine> lines;
  const FirstOrderResiduals fo = first_order_residuals(p, pt.x, pt.mu, pt.omega);
  const IndexSets sets = index_sets(p, pt.x, 1e-8, 1e-8);
  const Vector g = p.g(pt.x);
  for (const std::string& c : req.checks) {
    CheckLine l;
    l.name = c;
    if (c == "kkt") {
      l.values["stationarity"] = num(fo.stationarity);
      l.values["feasibility"] = num(fo.feasibility);
      l.values["complementarity"] = num(fo.akkt_comp);
      l.pass = std::max({fo.stationarity, fo.feasibility, fo.akkt_comp}) <= req.tol;
    } else if (c == "akkt") {
      const double mult = akkt_multiplier_measure(p.cone(), g, pt.omega, sets);
      l.values["stationarity"] = num(fo.stationarity);
      l.values["feasibility"] = num(fo.feasibility);
      l.values["multiplier"] = num(mult);
      l.pass = std::max({fo.stationarity, fo.feasibility, mult}) <= req.tol;
    } else if (c == "cakkt") {
      l.values["stationarity"] = num(fo.stationarity);
      l.values["feasibility"] = num(fo.feasibility);
      l.values["complementarity"] = num(fo.cakkt_comp);
      l.pass = std::max({fo.stationarity, fo.feasibility, fo.cakkt_comp}) <= req.tol;
    } else if (c == "akkt2") {
      const std::optional<double> rho = pt.rho ? pt.rho : req.rho;
      SymMatrix a;
      if (rho) {
        const CertificateRow row = certify(p, pt.x, pt.mu, pt.omega, *rho, 0.0);
        a = akkt2_matrix(p, pt.x, pt.mu, pt.omega, row.params, row.sets);
        l.values["rho"] = *rho;
      } else {
        Akkt2Params zero;
        zero.eta.assign(p.p(), 0.0);
        a = akkt2_matrix(p, pt.x, pt.mu, pt.omega, zero, sets);
      }
      const double me = p.n() ? min_eigenvalue(a) : 0.0;
      l.values["min_eig"] = num(me);
      if (req.direction) {
        if (req.direction->size() != p.n()) throw UsageError("direction: expected " + std::to_string(p.n()) + " entries");
        l.values["form"] = num(a.quadratic_form(*req.direction));
      }
      l.pass = me >= -req.tol;
    } else if (c == "wsonc") {
      const WsoncReport w = wsonc_check(p, pt.x, pt.mu, pt.omega, req.tol);
      l.values["subspace_dim"] = w.basis.nullity();
      l.values["reduced_min_eig"] = w.min_eig ? num(*w.min_eig) : ordered_json(nullptr);
      l.pass = w.pass;
    } else if (c == "robinson") {
      const RobinsonReport r = robinson_measure(p, pt.x);
      l.values["rank_dh"] = r.rank_dh;
      l.values["t"] = r.t ? num(*r.t) : ordered_json(nullptr);
      l.pass = r.holds;
    } else if (c == "wcr") {
      const WcrReport w = wcr_probe(p, pt.x, 1e-3, 32, req.seed);
      l.values["rank"] = w.rank_at_x;
      l.values["samples"] = w.sample_ranks.size();
      l.pass = w.constant_rank;
    }
    lines.push_back(std::move(l));
  }
  return lines;
}

}  // namespace

int cmd_check(const CheckRequest& req, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> known = {"kkt", "akkt", "cakkt", "akkt2", "wsonc", "robinson", "wcr"};
  try {
    for (const auto& c : req.checks)
      if (std::find(known.begin(), known.end(), c) == known.end()) throw UsageError("unknown check '" + c + "'");
    const Problem p = req.problem.load();
    std::vector<Point> pts;
    if (!req.sequence_path.empty()) {
      pts = load_sequence(req.sequence_path, p);
    } else {
      Point pt;
      pt.x = req.x;
      pt.mu = req.mu.empty() ? Vector(p.p(), 0.0) : req.mu;
      pt.omega = req.omega.empty() ? Vector(p.m(), 0.0) : req.omega;
      if (pt.x.size() != p.n()) throw UsageError("x: expected " + std::to_string(p.n()) + " entries");
      if (pt.mu.size() != p.p()) throw UsageError("mu: expected " + std::to_string(p.p()) + " entries");
      validate_omega(p.cone(), pt.omega);
      pts.push_back(std::move(pt));
    }

    Akkt2Certificate cert;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      CertificateRow row = certify(p, pts[k].x, pts[k].mu, pts[k].omega, pts[k].rho.value_or(req.rho.value_or(1.0)), 0.0);
      row.k = static_cast<int>(k);
      cert.append(std::move(row));
    }
    if (!req.cert_path.empty()) write_file(req.cert_path, cert.to_json());

    const std::vector<CheckLine> lines = run_checks(p, pts.back(), req);
    const bool all = std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
    if (req.format == Format::Json) {
      ordered_json doc;
      doc["problem"] = p.name();
      doc["rows"] = pts.size();
      ordered_json arr = ordered_json::array();
      for (const CheckLine& l : lines) {
        ordered_json j;
        j["check"] = l.name;
        j["pass"] = l.pass;
        j["values"] = l.values;
        arr.push_back(std::move(j));
      }
      doc["checks"] = std::move(arr);
      doc["pass"] = all;
      out << doc.dump(2) << '\n';
    } else {
      if (pts.size() > 1) {
        for (const CertificateRow& r : cert.rows())
          out << "row " << r.k << "  stationarity=" << fmt(r.stationarity) << " r_V=" << fmt(r.r_v)
              << " akkt_comp=" << fmt(r.akkt_comp) << " min_eig=" << fmt(r.min_eig) << '\n';
      }
      for (const CheckLine& l : lines) {
        out << std::left << std::setw(9) << l.name << (l.pass ? "PASS" : "FAIL");
        for (const auto& [k, v] : l.values.items()) {
          out << ' ' << k << '=';
          if (v.is_null()) out << "n/a";
          else if (v.is_number_float()) out << fmt(v.get<double>());
          else out << v.dump();
        }
        out << '\n';
      }
    }
    return all ? kOk : kCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

// ---- list ------------------------------------------------------------------

int cmd_list(Format format, std::ostream& out) {
  ordered_json arr = ordered_json::array();
  for (const auto& name : registry()) {
    const Problem p = socp::builtin(name);
    ordered_json j;
    j["name"] = name;
    j["n"] = p.n();
    j["p"] = p.p();
    j["cones"] = p.cone().dims();
    j["known_solution"] = p.known_solution().has_value();
    arr.push_back(std::move(j));
  }
  if (format == Format::Json) {
    out << arr.dump(2) << '\n';
    return kOk;
  }
  out << std::left << std::setw(26) << "name" << std::setw(4) << "n" << std::setw(4) << "p" << std::setw(12) << "cones"
      << "known\n";
  for (const auto& j : arr) {
    std::string dims;
    for (const auto& d : j["cones"]) dims += (dims.empty() ? "" : ",") + std::to_string(d.get<std::size_t>());
    out << std::left << std::setw(26) << j["name"].get<std::string>() << std::setw(4) << j["n"].get<std::size_t>()
        << std::setw(4) << j["p"].get<std::size_t>() << std::setw(12) << (dims.empty() ? "-" : dims)
        << (j["known_solution"].get<bool>() ? "yes" : "no") << '\n';
  }
  return kOk;
}

// ---- argument parsing -------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Second-order cone constrained optimization: solvers and optimality certificates", "socp"};
  app.require_subcommand(1);

  const std::map<std::string, Format> formats{{"text", Format::Text}, {"json", Format::Json}};

  RunConfig rc;
  std::vector<std::string> problems, specs;
  std::string hint;
  auto* solve = app.add_subcommand("solve", "Run a solver on one or more problems");
  solve->add_option("--problem", problems, "Builtin problem name (repeatable)");
  solve->add_option("--spec", specs, "Problem spec JSON file (repeatable)");
  solve->add_option("--solver", rc.solver, "auglag, sqp or penalty-path")
      ->check(CLI::IsMember({"auglag", "sqp", "penalty-path"}));
  solve->add_option("--set", rc.overrides, "Solver setting key=value (repeatable)");
  solve->add_option("--trace", rc.trace_path, "Write the iterate trace JSON here");
  solve->add_option("--cert", rc.cert_path, "Write the certificate JSON here");
  solve->add_option("--hint", hint, "Penalty-path center v1,v2,...");
  solve->add_option("--jobs", rc.jobs, "Parallel problems in batch mode")->check(CLI::PositiveNumber);
  solve->add_option("--seed", rc.seed, "Seed recorded in outputs");
  solve->add_option("--format", rc.format, "text or json")->transform(CLI::CheckedTransformer(formats));

  CheckRequest cr;
  std::string problem, spec, xs, mus, omegas, checks, direction;
  double rho = 0.0;
  auto* check = app.add_subcommand("check", "Certify a point or an iterate sequence");
  check->add_option("--problem", problem, "Builtin problem name");
  check->add_option("--spec", spec, "Problem spec JSON file");
  check->add_option("--x", xs, "Point v1,v2,...");
  check->add_option("--mu", mus, "Equality multipliers");
  check->add_option("--omega", omegas, "Cone multipliers");
  check->add_option("--sequence", cr.sequence_path, "JSON array of {x, mu, omega, rho} rows");
  check->add_option("--checks", checks, "Comma list of kkt,akkt,cakkt,akkt2,wsonc,robinson,wcr");
  check->add_option("--tol", cr.tol, "Pass tolerance");
  auto* rho_opt = check->add_option("--rho", rho, "Penalty for the AKKT2 parameters");
  check->add_option("--direction", direction, "Report the AKKT2 form along this direction");
  check->add_option("--cert", cr.cert_path, "Write the certificate JSON here");
  check->add_option("--seed", cr.seed, "Seed for the WCR probe");
  check->add_option("--format", cr.format, "text or json")->transform(CLI::CheckedTransformer(formats));

  Format list_format = Format::Text;
  auto* list = app.add_subcommand("list", "List builtin problems");
  list->add_option("--format", list_format, "text or json")->transform(CLI::CheckedTransformer(formats));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_code = app.exit(e, out, err);
    return rc_code == 0 ? kOk : kError;
  }

  try {
    if (*list) return cmd_list(list_format, out);
    if (*solve) {
      for (const auto& n : problems) rc.problems.push_back({n, ""});
      for (const auto& s : specs) rc.problems.push_back({"", s});
      if (!hint.empty()) rc.hint = parse_vector(hint);
      return cmd_solve(rc, out, err);
    }
    if (problem.empty() == spec.empty()) throw UsageError("check needs exactly one of --problem or --spec");
    cr.problem = {problem, spec};
    if (cr.sequence_path.empty() && xs.empty()) throw UsageError("check needs --x or --sequence");
    cr.x = parse_vector(xs);
    cr.mu = parse_vector(mus);
    cr.omega = parse_vector(omegas);
    if (!checks.empty()) {
      cr.checks.clear();
      std::stringstream ss(checks);
      std::string item;
      while (std::getline(ss, item, ',')) cr.checks.push_back(item);
    }
    if (rho_opt->count()) cr.rho = rho;
    if (!direction.empty()) cr.direction = parse_vector(direction);
    return cmd_check(cr, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace socp::cli

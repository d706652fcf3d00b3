#include "divcert/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "divcert/accel.hpp"
#include "divcert/core.hpp"
#include "divcert/descent.hpp"
#include "divcert/dualgeom.hpp"
#include "divcert/objectives.hpp"
#include "divcert/ode.hpp"

namespace divcert {

namespace fs = std::filesystem;
using nlohmann::json;

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::GD: return "gd";
    case Algorithm::NAG: return "nag";
    case Algorithm::Mirror: return "mirror";
    case Algorithm::NagOde: return "nag_ode";
    case Algorithm::AmdOde: return "amd_ode";
  }
  return "?";
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// config

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

double num(const json& j, const std::string& where, const std::string& key) {
  if (!j.is_number()) throw ConfigError(where + ": " + key + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": " + key + ": must be finite");
  return v;
}

std::size_t count(const json& j, const std::string& where, const std::string& key) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ConfigError(where + ": " + key + ": expected a nonnegative integer");
  }
  if (j.is_number_integer() && j.get<long long>() < 0) {
    throw ConfigError(where + ": " + key + ": expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::string str(const json& j, const std::string& where, const std::string& key) {
  if (!j.is_string()) throw ConfigError(where + ": " + key + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot read file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(path.string() + ":" + line_col(text, e.byte) + ": " + what);
  }
}

ExperimentConfig parse_config(const json& j, const std::string& where, const fs::path& base_dir,
                              const std::string& default_name) {
  if (!j.is_object()) throw ConfigError(where + ": top level must be an object");
  static const std::vector<std::string> known = {"name",   "description", "problem", "algorithm", "schedule",
                                                 "eta",    "A",           "x0",      "k_max",     "t_end",
                                                 "dt",     "r",           "R",       "outputs",   "assert_bounds",
                                                 "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(where + ": " + key + ": unknown field");
    }
  }

  ExperimentConfig c;
  c.name = j.contains("name") ? str(j["name"], where, "name") : default_name;
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError(where + ": name: must be a non-empty file-name-safe string");
  }

  if (!j.contains("problem")) throw ConfigError(where + ": problem: missing");
  if (j["problem"].is_string()) {
    const fs::path p = base_dir / j["problem"].get<std::string>();
    c.problem_json = read_json_file(p);
  } else {
    c.problem_json = j["problem"];
  }
  try {
    c.problem = objective_from_json(c.problem_json, "problem");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }

  if (!j.contains("algorithm")) throw ConfigError(where + ": algorithm: missing");
  const std::string alg = str(j["algorithm"], where, "algorithm");
  if (alg == "gd") c.algorithm = Algorithm::GD;
  else if (alg == "nag") c.algorithm = Algorithm::NAG;
  else if (alg == "mirror") c.algorithm = Algorithm::Mirror;
  else if (alg == "nag_ode") c.algorithm = Algorithm::NagOde;
  else if (alg == "amd_ode") c.algorithm = Algorithm::AmdOde;
  else throw ConfigError(where + ": algorithm: expected gd | nag | mirror | nag_ode | amd_ode, got \"" + alg + "\"");

  auto forbid = [&](const char* key, const char* why) {
    if (j.contains(key)) throw ConfigError(where + ": " + key + ": " + why);
  };

  if (c.is_ode()) {
    forbid("k_max", "not used by ODE algorithms (use t_end and dt)");
    forbid("schedule", "not used by ODE algorithms");
    forbid("eta", "not used by ODE algorithms");
    forbid("A", "not used by ODE algorithms");
    if (!j.contains("t_end")) throw ConfigError(where + ": t_end: missing");
    if (!j.contains("dt")) throw ConfigError(where + ": dt: missing");
    c.t_end = num(j["t_end"], where, "t_end");
    c.dt = num(j["dt"], where, "dt");
    if (!(c.dt > 0.0)) throw ConfigError(where + ": dt: must be positive");
    if (!(c.t_end >= c.dt)) throw ConfigError(where + ": t_end: must be at least dt");
    if (c.t_end / c.dt > 2e7) throw ConfigError(where + ": dt: more than 2e7 steps requested");
    if (c.algorithm == Algorithm::NagOde) {
      forbid("R", "only used by amd_ode (nag_ode takes r)");
      if (j.contains("r")) c.r = num(j["r"], where, "r");
      if (!(c.r > 0.0)) throw ConfigError(where + ": r: must be positive");
    } else {
      forbid("r", "only used by nag_ode (amd_ode takes R)");
      if (j.contains("R")) c.R = num(j["R"], where, "R");
      if (!(c.R > 0.0)) throw ConfigError(where + ": R: must be positive");
    }
  } else {
    forbid("t_end", "only used by ODE algorithms");
    forbid("dt", "only used by ODE algorithms");
    forbid("r", "only used by nag_ode");
    forbid("R", "only used by amd_ode");
    if (!j.contains("k_max")) throw ConfigError(where + ": k_max: missing");
    c.k_max = count(j["k_max"], where, "k_max");
    if (c.k_max < 1 || c.k_max > 10'000'000) throw ConfigError(where + ": k_max: must lie in [1, 1e7]");
    if (c.algorithm == Algorithm::NAG) {
      forbid("eta", "nag uses an A schedule, not a step size");
      c.schedule = j.contains("schedule") ? str(j["schedule"], where, "schedule") : "polynomial";
      if (c.schedule != "nesterov" && c.schedule != "polynomial" && c.schedule != "custom") {
        throw ConfigError(where + ": schedule: nag expects nesterov | polynomial | custom, got \"" + c.schedule +
                          "\"");
      }
      if (c.schedule == "custom") {
        if (!j.contains("A") || !j["A"].is_array()) throw ConfigError(where + ": A: custom schedule needs an array");
        for (std::size_t i = 0; i < j["A"].size(); ++i) {
          c.custom_A.push_back(num(j["A"][i], where, "A[" + std::to_string(i) + "]"));
        }
        if (c.custom_A.size() < c.k_max + 3) {
          throw ConfigError(where + ": A: needs at least k_max + 3 = " + std::to_string(c.k_max + 3) + " entries");
        }
      } else {
        forbid("A", "only used with schedule \"custom\"");
      }
    } else {
      forbid("A", "only used by nag");
      c.schedule = j.contains("schedule") ? str(j["schedule"], where, "schedule") : "constant-eta";
      if (c.schedule != "constant-eta") {
        throw ConfigError(where + ": schedule: " + alg + " expects constant-eta, got \"" + c.schedule + "\"");
      }
      if (j.contains("eta")) {
        c.eta = num(j["eta"], where, "eta");
        if (!(*c.eta > 0.0)) throw ConfigError(where + ": eta: must be positive");
      }
    }
  }

  if (j.contains("x0")) {
    try {
      c.x0 = vector_from_json(j["x0"], "x0");
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (c.x0.size() != c.problem->dim()) {
      throw ConfigError(where + ": x0: has dimension " + std::to_string(c.x0.size()) + ", problem has " +
                        std::to_string(c.problem->dim()));
    }
  } else {
    c.x0 = Vector(c.problem->dim());
  }

  c.csv_path = c.name + ".csv";
  c.summary_path = c.name + ".summary.json";
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    if (!o.is_object()) throw ConfigError(where + ": outputs: expected an object");
    for (const auto& [key, val] : o.items()) {
      if (key == "csv") c.csv_path = str(val, where, "outputs.csv");
      else if (key == "summary") c.summary_path = str(val, where, "outputs.summary");
      else throw ConfigError(where + ": outputs." + key + ": unknown field");
    }
  }
  if (j.contains("assert_bounds")) {
    if (!j["assert_bounds"].is_boolean()) throw ConfigError(where + ": assert_bounds: expected true or false");
    c.assert_bounds = j["assert_bounds"].get<bool>();
  }
  if (j.contains("seed")) c.seed = count(j["seed"], where, "seed");
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  const json j = read_json_file(path);
  return parse_config(j, path.string(), path.parent_path(), path.stem().string());
}

// ---------------------------------------------------------------------------
// ground truth

namespace {

// f = gp - <shift, .> after peeling wrappers, or nullptr.
const GeometricProgram* peel_geometric(const Objective* f, Vector& shift) {
  while (f) {
    if (auto* d = dynamic_cast<const DeclaredSmoothness*>(f)) {
      f = d->base().get();
    } else if (auto* s = dynamic_cast<const ShiftedObjective*>(f)) {
      shift += s->shift();
      f = s->base().get();
    } else {
      return dynamic_cast<const GeometricProgram*>(f);
    }
  }
  return nullptr;
}

// gp*(u) for u on the face of the Newton polytope exposed by `normal`, when
// the exponents on that face are affinely independent (unique weights).
std::optional<double> geometric_conjugate_on_face(const GeometricProgram& gp, const Vector& u,
                                                  const Vector& normal) {
  const auto& om = gp.exponents();
  const auto& c = gp.coefficients();
  double scale = 1.0;
  for (const auto& w : om) scale = std::max(scale, std::abs(dot(w, normal)));
  const double level = dot(u, normal);
  std::vector<std::size_t> face;
  for (std::size_t l = 0; l < om.size(); ++l) {
    if (std::abs(dot(om[l], normal) - level) <= 1e-9 * scale) face.push_back(l);
  }
  const std::size_t m = face.size();
  const std::size_t n = u.size();
  if (m == 0 || m > n + 1) return std::nullopt;
  // least squares on [omega; 1] lambda = [u; 1]
  std::vector<std::vector<double>> G(m, std::vector<double>(m, 0.0));
  std::vector<double> rhs(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) G[a][b] = dot(om[face[a]], om[face[b]]) + 1.0;
    rhs[a] = dot(om[face[a]], u) + 1.0;
  }
  std::vector<double> lam;
  try {
    lam = solve_dense(G, rhs);
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
  Vector recon(n);
  double total = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    if (lam[a] < -1e-10) return std::nullopt;
    lam[a] = std::max(lam[a], 0.0);
    recon += om[face[a]] * lam[a];
    total += lam[a];
  }
  if (distance(recon, u) > 1e-9 * scale || std::abs(total - 1.0) > 1e-9) return std::nullopt;
  double v = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    if (lam[a] > 0.0) v += lam[a] * std::log(lam[a] / c[face[a]]);
  }
  return v;
}

}  // namespace

GroundTruth ground_truth(const ObjectivePtr& f, const Vector& x0) {
  GroundTruth gt;
  gt.M = f->conjugate_bound();
  const auto ds = f->dual_set();
  if (!ds) {
    gt.notes.push_back("no dual set description: p* unknown");
    return gt;
  }
  gt.p_star = min_norm_point(*ds).point;
  const Vector& ps = *gt.p_star;

  if (std::holds_alternative<EllipsoidSet>(*ds) && norm_sq(ps) > 0.0) {
    // p* != 0 sits on the boundary, where -sqrt(1 - s) is 0; evaluating it at
    // the computed p* would turn rounding in s into an error of order 1e-8
    gt.inf_g = 0.0;
    gt.inf_g_exact = true;
  } else if (auto fc = f->conjugate(ps)) {
    gt.inf_g = -*fc;
    gt.inf_g_exact = true;
  } else {
    Vector shift(f->dim());
    if (const GeometricProgram* gp = peel_geometric(f.get(), shift); gp && norm_sq(ps) > 0.0) {
      if (auto v = geometric_conjugate_on_face(*gp, shift + ps, ps)) {
        gt.inf_g = -*v;
        gt.inf_g_exact = true;
      }
    }
  }
  if (!gt.inf_g) {
    // lower envelope of a long accelerated run on g; an overestimate of inf g
    const auto g = std::make_shared<ShiftedObjective>(f, ps);
    const std::size_t K = 20000;
    const ScheduleA s = ScheduleA::polynomial(g->smoothness(), K);
    NagStepper st(*g, x0, s);
    double best = g->value(x0);
    for (std::size_t k = 0; k <= K; ++k) {
      st.step();
      best = std::min(best, g->value(st.x()));
    }
    gt.inf_g = best;
    gt.notes.push_back("inf g approximated by 20000 accelerated steps");
  }

  const double g0 = f->shifted_value(x0, ps);
  if (gt.inf_g_exact) {
    gt.D = std::max(0.0, g0 - *gt.inf_g);
    gt.D_exact = true;
  } else if (gt.M) {
    gt.D = divergence_upper_bound(*f, x0);
    gt.notes.push_back("D replaced by the upper bound M + f(x0) + |x0||grad f(x0)|");
  } else {
    gt.D = std::max(0.0, g0 - *gt.inf_g);
    gt.notes.push_back("D approximate (may be underestimated)");
  }
  return gt;
}

// ---------------------------------------------------------------------------
// run

bool RunResult::pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.pass; });
}

namespace {

class Checker {
 public:
  // lhs <= rhs + tol
  void bound(const std::string& name, double lhs, double rhs, double tol, bool counts_for_slack, const std::string& at) {
    AssertionResult& a = get(name);
    ++a.checked;
    if (rhs > 0.0 && std::isfinite(lhs)) {
      a.max_slack = std::max(a.max_slack, lhs / rhs);
      if (counts_for_slack) max_slack_ = std::max(max_slack_, lhs / rhs);
    }
    if (!(lhs <= rhs + tol)) fail(a, at + ": " + format_double(lhs) + " > " + format_double(rhs));
  }
  void flag(const std::string& name, bool ok, const std::string& detail) {
    AssertionResult& a = get(name);
    ++a.checked;
    if (!ok) fail(a, detail);
  }
  std::vector<AssertionResult> results() const { return results_; }
  double max_slack() const { return max_slack_; }

 private:
  AssertionResult& get(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return results_[it->second];
    index_[name] = results_.size();
    AssertionResult a;
    a.name = name;
    results_.push_back(std::move(a));
    return results_.back();
  }
  static void fail(AssertionResult& a, const std::string& detail) {
    if (a.pass) a.first_failure = detail;
    a.pass = false;
  }
  std::vector<AssertionResult> results_;
  std::map<std::string, std::size_t> index_;
  double max_slack_ = 0.0;
};

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }
  std::string str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

std::string at_k(std::size_t k) { return "k=" + std::to_string(k); }
std::string at_t(double t) { return "t=" + format_double(t); }

bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// Seeded smoothness and convexity probe: pairs drawn around trajectory points.
void smoothness_probe(Checker& chk, const Objective& f, const std::vector<const Vector*>& anchors,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<std::pair<Vector, Vector>> pairs;
  const std::size_t stride = std::max<std::size_t>(1, anchors.size() / 25);
  for (std::size_t i = 0; i < anchors.size(); i += stride) {
    const Vector& a = *anchors[i];
    for (double radius : {0.1, 1.0, 3.0}) {
      Vector b = a;
      for (double& v : b) v += radius * nd(rng);
      pairs.emplace_back(a, b);
    }
  }
  const SmoothConvexReport rep = check_smooth_convex(f, pairs);
  chk.flag("smoothness", rep.pass,
           "convexity " + format_double(rep.convexity) + ", upper quadratic " + format_double(rep.upper_quadratic) +
               ", cocoercive " + format_double(rep.cocoercive) + " at pair " + std::to_string(rep.worst_pair));
}

std::vector<Vector> sample_points(const Vector& center, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double s = 1.0 + norm(center);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector w = center;
    for (double& v : w) v += s * nd(rng);
    out.push_back(std::move(w));
  }
  return out;
}

json vec_json(const Vector& v) { return json(v.std_vector()); }

json report_json(const CertificateReport& r) {
  json j;
  j["verdict"] = verdict_name(r.verdict);
  j["trigger_index"] = r.trigger_index ? json(*r.trigger_index) : json(nullptr);
  j["witness"] = r.witness.empty() ? json(nullptr) : vec_json(r.witness);
  j["witness_kind"] = r.witness_kind;
  j["witness_norm_sq"] = r.witness_norm_sq;
  j["threshold"] = r.threshold_used;
  j["bound_formula"] = r.bound_formula;
  j["iterations_checked"] = r.iterations_checked;
  return j;
}

struct RunContext {
  const ExperimentConfig& cfg;
  const Objective& f;
  GroundTruth gt;
  Checker chk;
  json extra = json::object();
  CertificateReport report;
  std::string csv;
};

std::string cell(double v) { return format_double(v); }

// --- nag ---------------------------------------------------------------

void run_nag_experiment(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const Objective& f = rc.f;
  const double L = f.smoothness();
  const std::size_t K = cfg.k_max;
  const ScheduleA sched = cfg.schedule == "custom" ? ScheduleA::custom(cfg.custom_A, L)
                          : cfg.schedule == "nesterov" ? ScheduleA::nesterov(L, K)
                                                       : ScheduleA::polynomial(L, K);
  // the Nesterov schedule sits on the boundary of the condition; allow rounding
  rc.chk.flag("step_condition", sched.step_condition_excess(K) <= 1e-12,
              "excess " + format_double(sched.step_condition_excess(K)));
  const NAGTrajectory traj = run_nag(f, cfg.x0, sched, K);
  const CertificateSeries certs = certificates(traj, sched);

  const auto& ps = rc.gt.p_star;
  const double f0 = f.value(cfg.x0);
  const bool known = ps && rc.gt.D;
  BoundsContext ctx;
  if (known) {
    ctx = make_bounds_context(f, cfg.x0, *ps, *rc.gt.D, rc.gt.D_exact);
  } else {
    ctx.p_star = Vector(f.dim());
  }
  const BoundSeries bounds = bound_series(sched, ctx, K);

  std::optional<NagDetection> det;
  if (rc.gt.M && is_zero(cfg.x0)) {
    det = detect_unbounded_nag(certs, bounds, *rc.gt.M, f0, ps);
    const bool q_first =
        det->q.trigger_index && (!det->p.trigger_index || *det->q.trigger_index <= *det->p.trigger_index);
    rc.report = q_first || !det->p.trigger_index ? det->q : det->p;
    json d;
    d["p"] = report_json(det->p);
    d["q"] = report_json(det->q);
    d["guaranteed_p"] = det->guaranteed_p ? json(*det->guaranteed_p) : json(nullptr);
    d["guaranteed_q"] = det->guaranteed_q ? json(*det->guaranteed_q) : json(nullptr);
    rc.extra["detectors"] = d;
  } else {
    rc.report.bound_formula = rc.gt.M ? "detection needs x0 = 0" : "detection needs a conjugate bound M";
  }

  std::optional<DiscreteEnergy> energy;
  double g_x0 = 0.0;
  if (ps) {
    g_x0 = f.shifted_value(cfg.x0, *ps);
    energy = energy_series(traj, sched, f, cfg.x0, *ps, g_x0);
  }

  std::vector<std::string> head = {"k", "f"};
  const bool has_inf = ps && rc.gt.inf_g;
  if (has_inf) head.push_back("g_minus_inf");
  head.insert(head.end(), {"grad_norm_sq"});
  if (ps) head.insert(head.end(), {"grad_err_sq", "grad_gap", "p_err_sq", "p_gap", "q_err_sq", "q_gap"});
  head.insert(head.end(), {"B_k", "Btilde_k"});
  for (const char* v : {"p", "q", "grad"}) {
    for (std::size_t i = 1; i <= f.dim(); ++i) head.push_back(v + std::to_string(i));
  }
  if (energy) head.push_back("energy");
  if (det) head.insert(head.end(), {"detected_p", "detected_q"});
  Csv csv(head);

  const double ps_sq = ps ? norm_sq(*ps) : 0.0;
  const auto ds = f.dual_set();
  std::optional<NewtonPolytopeStats> stats;
  if (auto* gp = dynamic_cast<const GeometricProgram*>(&f); gp && is_zero(cfg.x0) && rc.gt.inf_g_exact) {
    try {
      stats = newton_polytope_stats(*gp);
    } catch (const Error&) {
    }
  }
  const auto ws = sample_points(cfg.x0, 20, cfg.seed);
  std::vector<double> g_ws;
  if (ps) {
    for (const auto& w : ws) g_ws.push_back(f.shifted_value(w, *ps));
  }

  for (std::size_t k = 1; k <= K; ++k) {
    const Vector& p = certs.p[k];
    const Vector& q = certs.q[k];
    const Vector& gy = traj.grad_y[k];
    std::vector<std::string> row = {std::to_string(k), cell(traj.f_x[k])};
    double gk = 0.0;
    if (ps) gk = f.shifted_value(traj.x[k], *ps);
    if (has_inf) row.push_back(cell(gk - *rc.gt.inf_g));
    row.push_back(cell(norm_sq(gy)));
    if (ps) {
      const double pe = norm_sq(p - *ps), pg = norm_sq(p) - ps_sq, qe = norm_sq(q - *ps), qg = norm_sq(q) - ps_sq;
      row.insert(row.end(), {cell(norm_sq(gy - *ps)), cell(norm_sq(gy) - ps_sq), cell(pe), cell(pg), cell(qe), cell(qg)});
      if (rc.gt.D) {
        const CertificateBounds cb = certificate_bounds(bounds, ctx, k);
        rc.chk.bound("p_error", pe, cb.p_err, 1e-9, true, at_k(k));
        rc.chk.bound("q_error", qe, cb.q_err, 1e-9, true, at_k(k));
        if (cb.p_gap) rc.chk.bound("p_gap", pg, *cb.p_gap, 1e-9, true, at_k(k));
        if (cb.q_gap) rc.chk.bound("q_gap", qg, *cb.q_gap, 1e-9, true, at_k(k));
      }
      // value bound against sampled comparison points
      for (std::size_t i = 0; i < ws.size(); ++i) {
        const double rhs = 2.0 * norm_sq(ws[i] - cfg.x0) / sched.A(k);
        rc.chk.bound("value", gk - g_ws[i], rhs, 1e-9 * (1.0 + std::abs(gk) + std::abs(g_ws[i])), false, at_k(k));
      }
      if (stats && rc.gt.inf_g) {
        if (auto vb = geometric_value_bound(sched.A(k), *stats)) {
          rc.chk.bound("geometric_value", gk - *rc.gt.inf_g, *vb, 1e-9, true, at_k(k));
        }
      }
    }
    if (bounds.has_caps) {
      const double tol = 1e-12;
      rc.chk.bound("caps", bounds.B[k], bounds.B_cap[k] * (1 + tol), 0.0, false, at_k(k) + " B");
      rc.chk.bound("caps", bounds.C[k], bounds.C_cap[k] * (1 + tol), 0.0, false, at_k(k) + " C");
      rc.chk.bound("caps", bounds.Cp[k], bounds.Cp_cap[k] * (1 + tol), 0.0, false, at_k(k) + " C'");
      rc.chk.bound("caps", bounds.Bt[k], bounds.Bt_cap[k] * (1 + tol), 0.0, false, at_k(k) + " Bt");
      if (bounds.Ct[k]) rc.chk.bound("caps", *bounds.Ct[k], bounds.Ct_cap[k] * (1 + tol), 0.0, false, at_k(k) + " Ct");
      if (bounds.Ctp[k]) {
        rc.chk.bound("caps", *bounds.Ctp[k], bounds.Ctp_cap[k] * (1 + tol), 0.0, false, at_k(k) + " Ct'");
      }
    }
    row.insert(row.end(), {cell(bounds.B[k]), cell(bounds.Bt[k])});
    for (const Vector* v : {&p, &q, &gy}) {
      for (double c : *v) row.push_back(cell(c));
    }
    if (energy) {
      const double V = energy->V[k];
      const double tol = 1e-9 * energy->scale[k];
      row.push_back(cell(V));
      rc.chk.bound("energy_monotone", V - energy->V[k - 1], 0.0, tol, false, at_k(k));
      rc.chk.bound("energy_nonpositive", V, 0.0, tol, false, at_k(k));
    }
    if (ds) {
      rc.chk.bound("membership", membership_gap(*ds, p), 0.0, 1e-8, false, at_k(k) + " p");
      rc.chk.bound("membership", membership_gap(*ds, q), 0.0, 1e-8, false, at_k(k) + " q");
    }
    if (det) {
      row.push_back(norm_sq(p) > bounds.B[k] * (*rc.gt.M + f0) ? "1" : "0");
      row.push_back(norm_sq(q) > bounds.Bt[k] * (*rc.gt.M + f0) ? "1" : "0");
    }
    csv.row(row);
  }

  std::vector<const Vector*> anchors;
  for (const auto& y : traj.y) anchors.push_back(&y);
  smoothness_probe(rc.chk, f, anchors, cfg.seed);

  rc.extra["final"] = {{"x", vec_json(traj.x[K])}, {"p", vec_json(certs.p[K])}, {"q", vec_json(certs.q[K])}};
  rc.csv = csv.str();
}

// --- gd / mirror ---------------------------------------------------------

void run_gd_experiment(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const Objective& f = rc.f;
  const double L = f.smoothness();
  const double eta = cfg.eta.value_or(1.0 / L);
  const GDTrajectory traj = run_gd(f, cfg.x0, StepSchedule::constant(eta), cfg.k_max);
  for (const auto& w : traj.warnings) rc.extra["warnings"].push_back(w);
  const std::size_t K = cfg.k_max;
  const auto& ps = rc.gt.p_star;
  const double ps_sq = ps ? norm_sq(*ps) : 0.0;
  const bool admissible = eta <= 1.0 / L;
  const bool exact_step = std::abs(eta * L - 1.0) <= 1e-15;

  if (rc.gt.M) {
    if (is_zero(cfg.x0) && admissible) {
      rc.report = detect_unbounded_gd(traj, L, *rc.gt.M);
    } else {
      rc.report = detect_unbounded_gd_from_bound(traj, f);
    }
  } else {
    rc.report.bound_formula = "detection needs a conjugate bound M";
  }

  const double f0 = traj.f[0];
  double det_budget = 0.0;
  const bool detecting = rc.gt.M.has_value();
  if (detecting) det_budget = is_zero(cfg.x0) && admissible ? *rc.gt.M + f0 : divergence_upper_bound(f, cfg.x0);

  std::vector<std::string> head = {"k", "f"};
  const bool has_inf = ps && rc.gt.inf_g;
  if (has_inf) head.push_back("g_minus_inf");
  head.push_back("grad_norm_sq");
  if (ps) head.insert(head.end(), {"grad_err_sq", "grad_gap", "q_err_sq", "q_gap"});
  if (rc.gt.D && admissible) head.push_back("grad_gap_bound");
  if (rc.gt.D && exact_step) head.insert(head.end(), {"p_bound", "q_bound"});
  if (detecting) head.push_back("detected");
  Csv csv(head);
  const auto ds = f.dual_set();
  const double C0 = (ps && rc.gt.D) ? gd_c0(norm_sq(traj.grad[0]), ps_sq, L, *rc.gt.D) : 1.0;

  for (std::size_t k = 1; k <= K; ++k) {
    const Vector& g = traj.grad[k];
    const Vector& q = traj.q[k];
    std::vector<std::string> row = {std::to_string(k), cell(traj.f[k])};
    if (has_inf) row.push_back(cell(f.shifted_value(traj.x[k], *ps) - *rc.gt.inf_g));
    row.push_back(cell(norm_sq(g)));
    if (ps) {
      const double ge = norm_sq(g - *ps), gg = norm_sq(g) - ps_sq, qe = norm_sq(q - *ps), qg = norm_sq(q) - ps_sq;
      row.insert(row.end(), {cell(ge), cell(gg), cell(qe), cell(qg)});
      if (rc.gt.D && admissible) {
        const double rhs = 2.0 * *rc.gt.D / traj.a[k];
        row.push_back(cell(rhs));
        rc.chk.bound("grad_gap", gg, rhs, 1e-9, true, at_k(k));
      }
      if (rc.gt.D && exact_step) {
        const GDBounds b = gd_bounds(k, L, *rc.gt.D, C0);
        row.insert(row.end(), {cell(b.p_bound), cell(b.q_bound)});
        rc.chk.bound("grad_error", ge, b.p_bound, 1e-9, true, at_k(k));
        rc.chk.bound("q_error", qe, b.q_bound, 1e-9, true, at_k(k));
        rc.chk.bound("q_gap", qg, b.q_gap_bound, 1e-9, true, at_k(k));
      }
    }
    if (ds) {
      rc.chk.bound("membership", membership_gap(*ds, g), 0.0, 1e-8, false, at_k(k) + " grad");
      rc.chk.bound("membership", membership_gap(*ds, q), 0.0, 1e-8, false, at_k(k) + " q");
    }
    if (detecting) row.push_back(norm_sq(g) > 2.0 * det_budget / traj.a[k] ? "1" : "0");
    csv.row(row);
  }
  std::vector<const Vector*> anchors;
  for (const auto& x : traj.x) anchors.push_back(&x);
  smoothness_probe(rc.chk, f, anchors, cfg.seed);
  rc.extra["final"] = {{"x", vec_json(traj.x[K])}, {"grad", vec_json(traj.grad[K])}, {"q", vec_json(traj.q[K])}};
  rc.csv = csv.str();
}

void run_mirror_experiment(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const Objective& psi = rc.f;
  const QuadraticObjective F(psi.dim());
  const double L = psi.smoothness();
  const double eta = cfg.eta.value_or(1.0 / L);
  const std::size_t K = cfg.k_max;
  const MirrorState st = run_mirror(psi, F, cfg.x0, StepSchedule::constant(eta), K);
  for (const auto& w : st.warnings) rc.extra["warnings"].push_back(w);
  const auto& ps = rc.gt.p_star;
  const double ps_sq = ps ? norm_sq(*ps) : 0.0;
  const bool admissible = eta <= 1.0 / L;

  const double f0 = psi.value(cfg.x0);
  std::optional<double> budget;
  if (rc.gt.M && is_zero(cfg.x0) && admissible) budget = *rc.gt.M + f0;
  rc.report.witness_kind = "X";
  rc.report.bound_formula = budget ? "|X_k|^2 > 2 (M + f(0)) / a_k" : "detection needs M, x0 = 0 and eta <= 1/L";

  std::vector<std::string> head = {"k", "value", "X_norm_sq"};
  if (ps) head.insert(head.end(), {"X_err_sq", "value_gap"});
  if (ps && rc.gt.D && admissible) head.push_back("value_bound");
  if (budget) head.push_back("detected");
  Csv csv(head);
  const auto ds = psi.dual_set();

  for (std::size_t k = 1; k <= K; ++k) {
    const Vector& X = st.X[k];
    const double xs = norm_sq(X);
    std::vector<std::string> row = {std::to_string(k), cell(F.value(X)), cell(xs)};
    if (ps) {
      const double gap = 0.5 * xs - 0.5 * ps_sq;
      row.insert(row.end(), {cell(norm_sq(X - *ps)), cell(gap)});
      if (rc.gt.D && admissible) {
        const double rhs = *rc.gt.D / st.a[k];
        row.push_back(cell(rhs));
        rc.chk.bound("value", gap, rhs, 1e-9, true, at_k(k));
      }
    }
    if (ds) rc.chk.bound("membership", membership_gap(*ds, X), 0.0, 1e-8, false, at_k(k));
    if (budget) {
      const double thr = 2.0 * *budget / st.a[k];
      const bool hit = xs > thr;
      row.push_back(hit ? "1" : "0");
      rc.report.iterations_checked = k;
      if (!rc.report.trigger_index) {
        rc.report.witness = X;
        rc.report.witness_norm_sq = xs;
        rc.report.threshold_used = thr;
        if (hit) {
          rc.report.verdict = Verdict::Unbounded;
          rc.report.trigger_index = k;
        }
      }
    }
    csv.row(row);
  }
  std::vector<const Vector*> anchors;
  for (const auto& th : st.theta) anchors.push_back(&th);
  smoothness_probe(rc.chk, psi, anchors, cfg.seed);
  rc.extra["final"] = {{"theta", vec_json(st.theta[K])}, {"X", vec_json(st.X[K])}};
  rc.csv = csv.str();
}

// --- odes --------------------------------------------------------------

void ode_detect(RunContext& rc, double t, const Vector& w, double thr) {
  CertificateReport& r = rc.report;
  ++r.iterations_checked;
  if (r.trigger_index) return;
  r.witness = w;
  r.witness_norm_sq = norm_sq(w);
  r.threshold_used = thr;
  if (r.witness_norm_sq > thr) {
    r.verdict = Verdict::Unbounded;
    r.trigger_index = r.iterations_checked;
    rc.extra["trigger_time"] = t;
  }
}

void run_nag_ode_experiment(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const Objective& f = rc.f;
  const double r = cfg.r;
  const ODETrajectory fine = integrate_nag_ode(f, cfg.x0, r, cfg.t_end, cfg.dt);
  const bool have_coarse = 2.0 * cfg.dt <= cfg.t_end;
  const ODETrajectory coarse = have_coarse ? integrate_nag_ode(f, cfg.x0, r, cfg.t_end, 2.0 * cfg.dt) : fine;
  const double t_min = std::min(100.0 * cfg.dt, cfg.t_end);
  rc.extra["init_residual"] = fine.init_residual;
  rc.extra["sample_t_min"] = t_min;

  const auto& ps = rc.gt.p_star;
  const double ps_sq = ps ? norm_sq(*ps) : 0.0;
  const bool r2 = std::abs(r - 2.0) <= 1e-12;
  const double f0 = f.value(cfg.x0);
  std::optional<double> budget;
  if (rc.gt.M && is_zero(cfg.x0)) budget = *rc.gt.M + f0;
  rc.report.witness_kind = "q";
  rc.report.bound_formula = budget ? "|q(t)|^2 > 8 (r+2)^2 (M + f(0)) / t^2" : "detection needs M and x0 = 0";

  std::vector<std::string> head = {"t", "f"};
  const bool has_inf = ps && rc.gt.inf_g;
  if (has_inf) head.push_back("g_minus_inf");
  if (ps) head.insert(head.end(), {"p_err_sq", "p_gap", "q_err_sq", "q_gap"});
  const bool with_energy = ps && r2;
  if (with_energy) head.push_back("energy");
  Csv csv(head);

  std::vector<double> V, Vc;
  double g_x0 = 0.0;
  if (with_energy) {
    g_x0 = f.shifted_value(cfg.x0, *ps);
    V = continuous_energy(fine, f, cfg.x0, *ps, g_x0);
    Vc = continuous_energy(coarse, f, cfg.x0, *ps, g_x0);
  }

  std::optional<ContinuousBoundsReport> cb;
  if (ps && rc.gt.D && have_coarse) {
    BoundsContext ctx = make_bounds_context(f, cfg.x0, *ps, *rc.gt.D, rc.gt.D_exact);
    cb = continuous_bounds(fine, coarse, ctx, t_min);
    for (const auto& row : cb->rows) {
      const std::string at = at_t(row.t);
      auto chk = [&](const char* name, double lhs, double rhs) {
        rc.chk.bound(name, lhs, 1.001 * rhs, row.truncation, true, at);
      };
      chk("p_gap", row.p_gap, row.p_gap_bound);
      chk("q_error", row.q_err_sq, row.q_err_bound);
      if (row.p_err_bound_r2) chk("p_error_r2", row.p_err_sq, *row.p_err_bound_r2);
      if (row.p_gap_bound_r2) chk("p_gap_r2", row.p_gap, *row.p_gap_bound_r2);
      if (row.q_err_bound_r2) chk("q_error_r2", row.q_err_sq, *row.q_err_bound_r2);
    }
  }

  const auto ds = f.dual_set();
  const auto idx = have_coarse ? sample_indices(coarse, t_min, coarse.t.back()) : sample_indices(fine, t_min, cfg.t_end);
  std::optional<std::size_t> prev;
  std::optional<std::size_t> prev_c;
  for (std::size_t s : idx) {
    const std::size_t i = have_coarse ? 2 * s + 1 : s;
    if (i >= fine.t.size()) break;
    const double t = fine.t[i];
    const Vector p = fine.p(i);
    const Vector q = fine.q(i);
    std::vector<std::string> row = {cell(t), cell(f.value(fine.u[i]))};
    if (has_inf) row.push_back(cell(f.shifted_value(fine.u[i], *ps) - *rc.gt.inf_g));
    if (ps) {
      row.insert(row.end(),
                 {cell(norm_sq(p - *ps)), cell(norm_sq(p) - ps_sq), cell(norm_sq(q - *ps)), cell(norm_sq(q) - ps_sq)});
    }
    if (with_energy) {
      row.push_back(cell(V[i]));
      const double t2 = t * t;
      const double scale = 1.0 + 0.5 * t2 * (std::abs(f.shifted_value(fine.u[i], *ps)) + std::abs(g_x0)) +
                           norm_sq(fine.v[i] + *ps * (t2 / 4.0) - cfg.x0);
      const double slack_here = have_coarse ? std::abs(V[i] - Vc[s]) : 0.0;
      rc.chk.bound("energy_nonpositive", V[i], 0.0, slack_here + 1e-9 * scale, false, at_t(t));
      if (prev) {
        const double slack_prev = have_coarse ? std::abs(V[*prev] - Vc[*prev_c]) : 0.0;
        rc.chk.bound("energy_monotone", V[i] - V[*prev], 0.0, slack_here + slack_prev + 1e-9 * scale, false, at_t(t));
      }
    }
    if (ds) rc.chk.bound("membership", membership_gap(*ds, p), 0.0, 1e-6, false, at_t(t));
    if (budget) ode_detect(rc, t, q, 8.0 * (r + 2.0) * (r + 2.0) * *budget / (t * t));
    csv.row(row);
    prev = i;
    prev_c = s;
  }

  std::vector<const Vector*> anchors;
  for (std::size_t s : idx) {
    const std::size_t i = have_coarse ? 2 * s + 1 : s;
    if (i < fine.u.size()) anchors.push_back(&fine.u[i]);
  }
  smoothness_probe(rc.chk, f, anchors, cfg.seed);
  const std::size_t last = fine.t.size() - 1;
  rc.extra["final"] = {{"t", fine.t[last]}, {"x", vec_json(fine.u[last])}, {"p", vec_json(fine.p(last))},
                       {"q", vec_json(fine.q(last))}};
  rc.csv = csv.str();
}

void run_amd_ode_experiment(RunContext& rc) {
  const auto& cfg = rc.cfg;
  const Objective& psi = rc.f;
  const double R = cfg.R;
  const ODETrajectory fine = integrate_amd_ode(psi, cfg.x0, R, cfg.t_end, cfg.dt);
  const bool have_coarse = 2.0 * cfg.dt <= cfg.t_end;
  const ODETrajectory coarse = have_coarse ? integrate_amd_ode(psi, cfg.x0, R, cfg.t_end, 2.0 * cfg.dt) : fine;
  const double t_min = std::min(100.0 * cfg.dt, cfg.t_end);
  rc.extra["init_residual"] = fine.init_residual;
  rc.extra["sample_t_min"] = t_min;

  const auto& ps = rc.gt.p_star;
  const double ps_sq = ps ? norm_sq(*ps) : 0.0;
  std::optional<double> budget;
  if (rc.gt.M && is_zero(cfg.x0)) budget = *rc.gt.M + psi.value(cfg.x0);
  rc.report.witness_kind = "X";
  rc.report.bound_formula = budget ? "|X(t)|^2 > 2 R^2 (M + f(0)) / t^2" : "detection needs M and Z0 = 0";

  std::vector<std::string> head = {"t", "X_norm_sq"};
  if (ps) head.insert(head.end(), {"X_err_sq", "value_gap"});
  if (ps && rc.gt.D) head.push_back("value_bound");
  Csv csv(head);
  const auto ds = psi.dual_set();

  const auto idx = have_coarse ? sample_indices(coarse, t_min, coarse.t.back()) : sample_indices(fine, t_min, cfg.t_end);
  std::vector<const Vector*> anchors;
  for (std::size_t s : idx) {
    const std::size_t i = have_coarse ? 2 * s + 1 : s;
    if (i >= fine.t.size()) break;
    const double t = fine.t[i];
    const Vector& X = fine.u[i];
    anchors.push_back(&fine.v[i]);
    std::vector<std::string> row = {cell(t), cell(norm_sq(X))};
    if (ps) {
      const double gap = 0.5 * norm_sq(X) - 0.5 * ps_sq;
      row.insert(row.end(), {cell(norm_sq(X - *ps)), cell(gap)});
      if (rc.gt.D) {
        const double rhs = R * R * *rc.gt.D / (t * t);
        row.push_back(cell(rhs));
        const double trunc = have_coarse ? std::abs(0.5 * norm_sq(coarse.u[s]) - 0.5 * norm_sq(X)) : 0.0;
        rc.chk.bound("value", gap, 1.001 * rhs, trunc, true, at_t(t));
      }
    }
    if (ds) rc.chk.bound("membership", membership_gap(*ds, X), 0.0, 1e-6, false, at_t(t));
    if (budget) ode_detect(rc, t, X, 2.0 * R * R * *budget / (t * t));
    csv.row(row);
  }
  smoothness_probe(rc.chk, psi, anchors, cfg.seed);
  const std::size_t last = fine.t.size() - 1;
  rc.extra["final"] = {{"t", fine.t[last]}, {"X", vec_json(fine.u[last])}, {"Z", vec_json(fine.v[last])}};
  rc.csv = csv.str();
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunContext rc{cfg, *cfg.problem, ground_truth(cfg.problem, cfg.x0), {}, json::object(), {}, {}};
  switch (cfg.algorithm) {
    case Algorithm::NAG: run_nag_experiment(rc); break;
    case Algorithm::GD: run_gd_experiment(rc); break;
    case Algorithm::Mirror: run_mirror_experiment(rc); break;
    case Algorithm::NagOde: run_nag_ode_experiment(rc); break;
    case Algorithm::AmdOde: run_amd_ode_experiment(rc); break;
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  RunResult res;
  res.name = cfg.name;
  res.csv = std::move(rc.csv);
  res.assertions = rc.chk.results();
  res.report = rc.report;
  res.max_bound_slack = rc.chk.max_slack();

  json s;
  s["name"] = cfg.name;
  s["algorithm"] = algorithm_name(cfg.algorithm);
  if (!cfg.schedule.empty()) s["schedule"] = cfg.schedule;
  s["problem"] = cfg.problem_json;
  s["verdict"] = verdict_name(rc.report.verdict);
  s["trigger_index"] = rc.report.trigger_index ? json(*rc.report.trigger_index) : json(nullptr);
  s["witness"] = rc.report.witness.empty() ? json(nullptr) : vec_json(rc.report.witness);
  s["witness_kind"] = rc.report.witness_kind;
  s["threshold"] = rc.report.threshold_used;
  s["bound_formula"] = rc.report.bound_formula;
  s["max_bound_slack"] = res.max_bound_slack;
  s["runtime_ms"] = ms;
  const auto& gt = rc.gt;
  s["ground_truth"] = {{"p_star", gt.p_star ? vec_json(*gt.p_star) : json(nullptr)},
                       {"inf_g", gt.inf_g ? json(*gt.inf_g) : json(nullptr)},
                       {"inf_g_exact", gt.inf_g_exact},
                       {"D", gt.D ? json(*gt.D) : json(nullptr)},
                       {"D_exact", gt.D_exact},
                       {"M", gt.M ? json(*gt.M) : json(nullptr)},
                       {"notes", gt.notes}};
  for (const auto& [k, v] : rc.extra.items()) s[k] = v;
  json asserts = json::array();
  for (const auto& a : res.assertions) {
    json aj = {{"name", a.name}, {"pass", a.pass}, {"checked", a.checked}, {"max_slack", a.max_slack}};
    if (!a.pass) aj["first_failure"] = a.first_failure;
    asserts.push_back(aj);
  }
  s["assertions"] = asserts;
  s["pass"] = res.pass();
  res.summary = std::move(s);
  return res;
}

// ---------------------------------------------------------------------------
// cli

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void print_failures(const RunResult& r, std::ostream& err) {
  for (const auto& a : r.assertions) {
    if (!a.pass) err << r.name << ": assertion " << a.name << " failed (" << a.first_failure << ")\n";
  }
}

}  // namespace

int cli_run(const fs::path& config, const std::optional<fs::path>& out_dir, bool force_assert, std::ostream& out,
            std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
  if (force_assert) cfg.assert_bounds = true;
  RunResult res;
  try {
    res = run_experiment(cfg);
  } catch (const Error& e) {
    err << cfg.name << ": " << e.what() << "\n";
    return 1;
  }
  const fs::path dir = out_dir.value_or(fs::path("."));
  try {
    write_file(dir / cfg.csv_path, res.csv);
    write_file(dir / cfg.summary_path, res.summary.dump(2) + "\n");
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  }
  out << cfg.name << ": " << verdict_name(res.report.verdict);
  if (res.report.trigger_index) out << " at index " << *res.report.trigger_index;
  out << ", max bound slack " << format_double(res.max_bound_slack) << ", assertions "
      << (res.pass() ? "pass" : "FAIL") << "\n";
  if (!res.pass()) print_failures(res, err);
  return cfg.assert_bounds && !res.pass() ? 2 : 0;
}

int cli_certify(const fs::path& problem, std::size_t budget, std::ostream& out, std::ostream& err) {
  try {
    const json pj = read_json_file(problem);
    ObjectivePtr f;
    try {
      f = objective_from_json(pj, "problem");
    } catch (const InvalidArgument& e) {
      throw ConfigError(problem.string() + ": " + e.what());
    }
    const OnlineDetection d = certify_nag(*f, budget);
    json j = report_json(d.report);
    j["problem"] = problem.filename().string();
    j["budget"] = budget;
    j["estimate"] = vec_json(d.estimate);
    j["stop_index"] = d.stop_index;
    j["p_detector"] = report_json(d.p);
    j["q_detector"] = report_json(d.q);
    out << j.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    err << "certify: " << e.what() << "\n";
    return 1;
  }
}

int cli_sweep(const fs::path& dir, const std::optional<fs::path>& out_dir, std::ostream& out, std::ostream& err,
              unsigned threads) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    err << "sweep: " << dir.string() << " is not a directory\n";
    return 1;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  struct Entry {
    json report;
    bool pass = false;
    std::string log;
  };
  std::vector<Entry> entries(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      Entry& e = entries[i];
      e.report["config"] = files[i].filename().string();
      try {
        ExperimentConfig cfg = load_config(files[i]);
        e.report["name"] = cfg.name;
        const RunResult r = run_experiment(cfg);
        e.pass = r.pass();
        e.report["pass"] = e.pass;
        e.report["verdict"] = verdict_name(r.report.verdict);
        e.report["max_bound_slack"] = r.max_bound_slack;
        json failing = json::array();
        for (const auto& a : r.assertions) {
          if (!a.pass) failing.push_back({{"name", a.name}, {"first_failure", a.first_failure}});
        }
        e.report["failing_assertions"] = failing;
        if (out_dir) {
          const fs::path sub = *out_dir / cfg.name;
          write_file(sub / cfg.csv_path, r.csv);
          write_file(sub / cfg.summary_path, r.summary.dump(2) + "\n");
        }
        std::ostringstream log;
        print_failures(r, log);
        e.log = log.str();
      } catch (const Error& ex) {
        e.pass = false;
        e.report["pass"] = false;
        e.report["error"] = ex.what();
        e.log = files[i].filename().string() + ": " + ex.what() + "\n";
      }
    }
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(1, files.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json rep;
  rep["configs"] = json::array();
  json failing = json::array();
  std::size_t passed = 0;
  for (const auto& e : entries) {
    rep["configs"].push_back(e.report);
    if (e.pass) {
      ++passed;
    } else {
      failing.push_back(e.report["config"]);
    }
    err << e.log;
  }
  rep["total"] = entries.size();
  rep["passed"] = passed;
  rep["failed"] = failing;
  rep["pass"] = failing.empty();
  const std::string text = rep.dump(2) + "\n";
  out << text;
  if (out_dir) {
    try {
      write_file(*out_dir / "sweep_report.json", text);
    } catch (const Error& e) {
      err << e.what() << "\n";
      return 1;
    }
  }
  return failing.empty() ? 0 : 2;
}

}  // namespace divcert

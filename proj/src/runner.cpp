#include "kahlerdyn/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/entropy.hpp"
#include "kahlerdyn/error.hpp"
#include "kahlerdyn/forms.hpp"
#include "kahlerdyn/green.hpp"
#include "kahlerdyn/rng.hpp"
#include "kahlerdyn/spectral.hpp"
#include "kahlerdyn/superpotential.hpp"

namespace fs = std::filesystem;

namespace kahlerdyn {

namespace {

// Anchor strings attached to verdicts.
const char* const kConcave = "log d_q is concave";
const char* const kTopEntropy = "h_t(f)=max_q log d_q";
const char* const kDegreeLimit = "[∫_X (f^n)^*ω^q ∧ ω^{k−q}]^{1/n}";
const char* const kDuality = "are given by the same matrix";
const char* const kMassGrowth = "κ n^{m-1} d_q^n";
const char* const kMultiplicity = "multiplicity of the spectral radius";
const char* const kSurjective = "surjective real linear map";
const char* const kGreenConv = "converge SP-uniformly to a current";
const char* const kFunctional = "satisfies f^*(T_c)=T_{f^*(c)}";
const char* const kCesaro = "SP-uniformly to the current";
const char* const kUnique = "at most one positive closed";
const char* const kMixing = "is of multiplicity 1";
const char* const kInvariant = "is an invariant measure";
const char* const kErgodic = "ergodic, hyperbolic and of maximal entropy";
const char* const kModerate = "⟨ν, e^{λ|φ|}⟩ ≤ A";
const char* const kBrinKatok = "−(1/n) log ν(B_n(a,ε))";
const char* const kMisiurewicz = "entropy h(ν) satisfies the inequality";
const char* const kYomdin = "ν_n''(B_n(a,ε)) ≤ A e^{nδ}";
const char* const kMaxEntropy = "maximal entropy log d_p";
const char* const kDeThelin = "p positive Lyapounov exponents larger";
const char* const kLogEstimate = "1+log⁺‖R‖_{C¹}";

const std::set<std::string> kStochastic = {"uniqueness", "moderate", "entropy"};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

// Reads one object of the config, records normalized values and rejects
// unknown keys.
class Reader {
 public:
  Reader(const Json& src, std::string path) : src_(src.is_null() ? Json::object() : src), path_(std::move(path)) {
    if (!src_.is_object()) throw UsageError(path_ + ": expected an object");
  }

  double number(const std::string& key, double def, bool positive = false, bool nonneg = false) {
    double v = def;
    if (auto it = take(key)) {
      if (!it->is_number()) throw UsageError(at(key) + ": expected a number");
      v = it->get<double>();
    }
    if (!std::isfinite(v)) throw UsageError(at(key) + ": must be finite");
    if (positive && !(v > 0.0)) throw UsageError(at(key) + ": must be > 0");
    if (nonneg && v < 0.0) throw UsageError(at(key) + ": must be >= 0");
    out_[key] = v;
    return v;
  }

  long long integer(const std::string& key, long long def, long long lo, long long hi = (1LL << 40)) {
    long long v = def;
    if (auto it = take(key)) {
      if (!it->is_number_integer()) throw UsageError(at(key) + ": expected an integer");
      v = it->get<long long>();
    }
    if (v < lo || v > hi)
      throw UsageError(at(key) + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out_[key] = v;
    return v;
  }

  std::string choice(const std::string& key, const std::string& def, const std::vector<std::string>& allowed) {
    std::string v = def;
    if (auto it = take(key)) {
      if (!it->is_string()) throw UsageError(at(key) + ": expected a string");
      v = it->get<std::string>();
    }
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) throw UsageError(at(key) + ": unknown value " + v);
    out_[key] = v;
    return v;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def, bool nonneg = false) {
    std::vector<double> v = def;
    if (auto it = take(key)) {
      if (!it->is_array()) throw UsageError(at(key) + ": expected an array of numbers");
      v.clear();
      for (std::size_t i = 0; i < it->size(); ++i) {
        const Json& e = (*it)[i];
        if (!e.is_number()) throw UsageError(at(key) + "[" + std::to_string(i) + "]: expected a number");
        double x = e.get<double>();
        if (nonneg && x < 0.0) throw UsageError(at(key) + "[" + std::to_string(i) + "]: must be >= 0");
        v.push_back(x);
      }
    }
    out_[key] = v;
    return v;
  }

  /// Raw passthrough, validated by the caller.
  std::optional<Json> raw(const std::string& key) {
    auto it = take(key);
    if (it) out_[key] = *it;
    return it;
  }

  Json finish() {
    for (auto it = src_.begin(); it != src_.end(); ++it)
      if (!used_.count(it.key())) throw UsageError(at(it.key()) + ": unknown field");
    return out_;
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

 private:
  std::optional<Json> take(const std::string& key) {
    used_.insert(key);
    auto it = src_.find(key);
    if (it == src_.end()) return std::nullopt;
    return *it;
  }

  Json src_;
  std::string path_;
  Json out_ = Json::object();
  std::set<std::string> used_;
};

Json validate_params(const std::string& kind, const Json& raw) {
  Reader r(raw, "params");
  if (kind == "degrees") {
    r.number("tol", 1e-9, true);
    r.integer("limit_n", 60, 1, 100000);
    r.number("duality_tol", 1e-9, true);
  } else if (kind == "spectral") {
    r.number("tol", 1e-9, true);
    r.integer("N_max", 500, 1, 1000000);
    r.number("projector_tol", 1e-6, true);
    r.number("equivariance_tol", 1e-5, true);
  } else if (kind == "green" || kind == "cesaro") {
    r.integer("q", 1, 1, 64);
    r.integer("n_max", kind == "green" ? 14 : 40, 1, 100000);
    r.number("tol", kind == "green" ? 1e-7 : 1e-3, true);
    r.number("functional_tol", 1e-8, true);
    if (auto p = r.raw("perturbation")) {
      if (!p->is_array()) throw UsageError("params.perturbation: expected an array");
      for (std::size_t i = 0; i < p->size(); ++i) {
        Reader e((*p)[i], "params.perturbation[" + std::to_string(i) + "]");
        auto m = e.raw("mode");
        if (!m || !m->is_array()) throw UsageError(e.at("mode") + ": expected an integer array");
        for (const auto& v : *m)
          if (!v.is_number_integer()) throw UsageError(e.at("mode") + ": expected integers");
        e.number("amplitude", 0.01);
        e.finish();
      }
    }
  } else if (kind == "uniqueness") {
    r.integer("q", 1, 1, 64);
    r.integer("count", 10, 2, 1000);
    r.integer("n_max", 12, 1, 1000);
    r.number("amplitude", 0.02, true);
    r.integer("max_mode", 2, 1, 64);
    r.number("tol", 1e-7, true);
    r.number("functional_tol", 1e-8, true);
  } else if (kind == "measure") {
    r.integer("n_max", 14, 1, 1000);
    r.number("tol", 1e-8, true);
  } else if (kind == "mixing") {
    r.integer("N_max", 50, 2, 1000000);
    r.integer("N_decay", 2000, 4, 10000000);
    r.number("tol", 1e-9, true);
    r.number("max_norm", 8.0, false, true);
    r.integer("n_max", 12, 1, 1000);
    r.integer("n0_max", 10, 0, 1000);
    r.integer("offdiagonal_samples", 200, 0, 1000000);
  } else if (kind == "moderate") {
    r.integer("centers", 2, 1, 1000);
    r.number("r0", 0.2, true);
    r.numbers("lambda_grid", {0.0, 0.5, 1.0, 2.0}, true);
    r.integer("samples", 200000, 2, 1LL << 34);
    r.integer("n_max", 14, 1, 1000);
  } else if (kind == "entropy") {
    r.integer("n", 20, 1, 10000);
    r.number("epsilon", 0.05, true);
    r.integer("centers", 4, 1, 1000);
    r.integer("samples", 1000000, 1, 1LL << 34);
    r.choice("method", "auto", {"auto", "exact-box", "monte-carlo"});
    r.number("rel_tol", 0.05, true);
    r.integer("yomdin_n_max", 8, 1, 1000);
    r.number("yomdin_delta", 0.2, true);
  } else if (kind == "lyapunov") {
    r.number("tol", 1e-9, true);
    r.number("sum_tol", 1e-10, true);
  } else if (kind == "sweep") {
    r.integer("p", 1, 1, 64);
    r.integer("max_norm", 16, 1, 4096);
    r.integer("small_box", 1, 0, 8);
    r.integer("extension_norm", 160, 1, 1 << 20);
  }
  return r.finish();
}

Json validate_expect(const Json& raw) {
  Reader r(raw, "expect");
  if (auto d = r.raw("degrees")) real_vector_from_json(*d, "expect.degrees");
  if (auto e = r.raw("entropy"))
    if (!e->is_number()) throw UsageError("expect.entropy: expected a number");
  if (auto e = r.raw("exponents")) real_vector_from_json(*e, "expect.exponents");
  if (auto m = r.raw("mixing"))
    if (!m->is_boolean()) throw UsageError("expect.mixing: expected a boolean");
  if (auto m = r.raw("decay_rate"))
    if (!m->is_number()) throw UsageError("expect.decay_rate: expected a number");
  r.number("rtol", 1e-9, true);
  r.number("atol", 1e-10, true);
  r.number("rate_tol", 0.2, true);
  return r.finish();
}

void add_verdict(ExperimentReport& rep, const std::string& name, bool passed, const char* anchor,
                 const std::string& detail) {
  rep.verdicts.push_back({name, passed, anchor, detail});
}

void add_sequence(ExperimentReport& rep, const std::string& name, const std::vector<double>& ys, double x0 = 1.0) {
  Json s = Json::array();
  for (std::size_t i = 0; i < ys.size(); ++i) s.push_back({x0 + static_cast<double>(i), ys[i]});
  rep.sequences[name] = s;
}

TorusMap torus_map(const Json& cfg) { return TorusMap(torus_from_json(cfg.at("torus"), "torus")); }

CohomologyModel model_of(const Json& cfg) {
  if (cfg.contains("torus")) return build_torus_cohomology(torus_from_json(cfg.at("torus"), "torus"));
  return model_from_json(cfg.at("model"), "model");
}

Json degrees_json(const DegreeProfile& d) {
  return {{"degrees", d.degrees},
          {"multiplicity", d.multiplicity},
          {"p", d.p},
          {"p_prime", d.p_prime},
          {"entropy", d.entropy},
          {"limit_estimate", d.limit_estimate},
          {"limit_n", d.limit_n}};
}

void expect_degrees(ExperimentReport& rep, const DegreeProfile& prof, const Json& expect) {
  const double rtol = expect.value("rtol", 1e-9);
  if (expect.contains("degrees")) {
    Eigen::VectorXd want = real_vector_from_json(expect["degrees"], "expect.degrees");
    bool ok = static_cast<std::size_t>(want.size()) == prof.degrees.size();
    double worst = 0.0;
    for (Eigen::Index q = 0; ok && q < want.size(); ++q) {
      worst = std::max(worst, std::abs(prof.degrees[q] - want(q)) / std::max(1.0, std::abs(want(q))));
    }
    ok = ok && worst <= rtol;
    add_verdict(rep, "expected_degrees", ok, kDegreeLimit, "max relative deviation " + fmt(worst));
  }
  if (expect.contains("entropy")) {
    const double want = expect["entropy"].get<double>();
    const double dev = std::abs(prof.entropy - want) / std::max(1.0, std::abs(want));
    add_verdict(rep, "expected_entropy", dev <= rtol, kTopEntropy,
                "entropy " + fmt(prof.entropy) + " vs " + fmt(want));
  }
}

void run_degrees(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  const double tol = P["tol"];
  const Json expect = cfg.value("expect", Json::object());
  DegreeProfile prof;
  std::optional<CohomologyModel> model;
  if (cfg.contains("degrees")) {
    Eigen::VectorXd d = real_vector_from_json(cfg["degrees"], "degrees");
    prof = degree_profile_from(std::vector<double>(d.data(), d.data() + d.size()), tol);
  } else {
    model = model_of(cfg);
    prof = dynamical_degrees(*model, tol, static_cast<int>(P["limit_n"].get<long long>()));
  }
  rep.results["profile"] = degrees_json(prof);
  const int k = static_cast<int>(prof.degrees.size()) - 1;
  const bool ends = std::abs(prof.degrees.front() - 1.0) <= tol && std::abs(prof.degrees.back() - 1.0) <= tol;
  add_verdict(rep, "endpoint_degrees", ends, kConcave,
              "d_0 = " + fmt(prof.degrees.front()) + ", d_k = " + fmt(prof.degrees.back()));
  try {
    auto cv = check_log_concavity(prof, tol);
    add_verdict(rep, "log_concavity", true, kConcave,
                "p = " + std::to_string(cv.p) + ", p' = " + std::to_string(cv.p_prime));
  } catch (const Error& e) {
    add_verdict(rep, "log_concavity", false, kConcave, e.what());
  }
  if (model) {
    const double dtol = P["duality_tol"];
    Json res = Json::array();
    for (int q = 0; q <= k; ++q) {
      auto d = duality_check(*model, q, dtol);
      res.push_back(d.residual);
      add_verdict(rep, "duality_q" + std::to_string(q), d.residual < dtol, kDuality, "residual " + fmt(d.residual));
    }
    rep.results["duality_residuals"] = res;
    if (prof.degrees[prof.p] > 1.0 + tol) {
      auto g = mass_growth(*model, prof.p, model->omega_class[prof.p], 5, 40);
      rep.results["mass_growth"] = {{"q", g.q},
                                    {"growth_rate", g.growth_rate},
                                    {"expected_rate", g.expected_rate},
                                    {"poly_degree", g.poly_degree},
                                    {"expected_poly", g.expected_poly}};
      add_verdict(rep, "mass_growth", g.rate_ok && g.poly_ok, kMassGrowth,
                  "rate " + fmt(g.growth_rate) + " vs " + fmt(g.expected_rate));
    }
    std::vector<double> est(prof.limit_estimate.begin(), prof.limit_estimate.end());
    add_sequence(rep, "limit_estimate", est, 0.0);
  }
  add_sequence(rep, "degrees", prof.degrees, 0.0);
  expect_degrees(rep, prof, expect);
}

void run_spectral(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  Eigen::MatrixXd L = real_matrix_from_json(cfg.at("matrix"), "matrix");
  auto snapped = integral_snap(L, 0.0);
  RealMatrix M = snapped ? *snapped : RealMatrix(L);
  const double tol = P["tol"];
  SpectralProfile prof = compute_spectral_profile(M, tol);
  Json eig = Json::array();
  for (const auto& c : prof.eigenvalues)
    eig.push_back({{"value", complex_to_json(c.value)}, {"algebraic", c.algebraic}, {"jordan_sizes", c.jordan_sizes}});
  rep.results["eigenvalues"] = eig;
  rep.results["spectral_radius"] = prof.spectral_radius;
  rep.results["multiplicity_m"] = prof.multiplicity_m;
  rep.results["theta"] = prof.theta;
  rep.results["theta_group"] = prof.theta_group.description;
  rep.results["warnings"] = prof.warnings;
  rep.results["exact_path"] = prof.exact_path;
  const Eigen::MatrixXd& H = prof.H_basis;
  double h_res = H.cols() == 0 ? 0.0 : (L * H - prof.spectral_radius * H).norm();
  add_verdict(rep, "H_is_lambda_eigenspace", H.cols() > 0 && h_res <= 1e-8 * std::max(1.0, prof.spectral_radius),
              kMultiplicity, "residual " + fmt(h_res));
  auto pr = limit_projector(M, prof, P["projector_tol"], P["N_max"].get<long long>());
  rep.results["projector"] = {{"N_used", pr.N_used},
                              {"residual", pr.residual},
                              {"rank", pr.rank},
                              {"image_residual", pr.image_residual},
                              {"equivariance_residual", pr.equivariance_residual},
                              {"matrix", matrix_to_json(pr.projector)}};
  add_verdict(rep, "projector_converged", pr.converged && pr.residual < P["projector_tol"].get<double>(), kSurjective,
              "N = " + std::to_string(pr.N_used) + ", residual " + fmt(pr.residual));
  add_verdict(rep, "projector_equivariance", pr.equivariance_residual < P["equivariance_tol"].get<double>(),
              kSurjective, "||P L - lambda P|| = " + fmt(pr.equivariance_residual));
  add_verdict(rep, "projector_image_in_H", pr.image_residual < P["equivariance_tol"].get<double>(), kSurjective,
              "residual " + fmt(pr.image_residual));
  Json gaps = Json::array();
  for (const auto& [N, g] : pr.raw_gaps) gaps.push_back({static_cast<double>(N), g});
  rep.sequences["cesaro_raw_gap"] = gaps;
}

FourierForm initial_form(const TorusMap& f, const Json& P) {
  const int q = static_cast<int>(P["q"].get<long long>());
  auto X = f.torus();
  if (q > X->k()) throw UsageError("params.q: exceeds the dimension");
  FourierForm S = FourierForm::omega_power(X, q);
  for (const auto& e : P.value("perturbation", Json::array())) {
    Mode m = e["mode"].get<Mode>();
    if (static_cast<int>(m.size()) != 2 * X->k()) throw UsageError("params.perturbation: mode needs 2k entries");
    FourierForm phi = FourierForm::cos_mode(X, m, e["amplitude"].get<double>());
    for (int j = 1; j < q; ++j) phi = wedge(phi, FourierForm::omega_power(X, 1));
    S += ddc(phi);
  }
  return S;
}

void record_run(ExperimentReport& rep, const IterationRun& run) {
  rep.results["q"] = run.q;
  rep.results["m"] = run.m;
  rep.results["d_q"] = run.d_q;
  rep.results["n_used"] = run.n_used;
  rep.results["limit_class"] = vector_to_json(run.limit_class);
  rep.results["class_F_residual"] = run.class_F_residual;
  rep.results["fitted_rate"] = run.fitted_rate;
  rep.results["limit"] = form_to_json(run.limit);
  rep.dropped_mass["pullbacks"] = run.dropped_mass_total;
  rep.dropped_mass["truncated"] = run.truncated;
  add_sequence(rep, "step_distance", run.step_distances, 2.0);
  add_sequence(rep, "limit_distance", run.limit_distances, 1.0);
}

void run_green(const Json& cfg, ExperimentReport& rep, bool cesaro) {
  const Json& P = cfg["params"];
  TorusMap f = torus_map(cfg);
  FourierForm S0 = initial_form(f, P);
  const int n = static_cast<int>(P["n_max"].get<long long>());
  IterationRun run = cesaro ? cesaro_green(f, S0, n) : iterate_green(f, S0, n);
  record_run(rep, run);
  const double tol = P["tol"];
  const double last = run.limit_distances.back();
  add_verdict(rep, "converged", last < tol && !run.truncated, cesaro ? kCesaro : kGreenConv,
              "final C^-2 distance " + fmt(last));
  if (cesaro) {
    // Averages converge like C/N when the iterates converge fast: N d_N levels off.
    const auto& d = run.limit_distances;
    double lo = INFINITY, hi = 0.0;
    for (std::size_t N = (3 * d.size()) / 4 + 1; N <= d.size(); ++N) {
      lo = std::min(lo, N * d[N - 1]);
      hi = std::max(hi, N * d[N - 1]);
    }
    rep.results["n_times_distance"] = {lo, hi};
    add_verdict(rep, "one_over_n_rate", d.size() >= 4 && hi <= 1.05 * lo, kCesaro,
                "N d_N in [" + fmt(lo) + ", " + fmt(hi) + "] over the last quarter");
  }
  const double fe = functional_equation_residual(f, run.limit, run.d_q);
  rep.results["functional_residual"] = fe;
  add_verdict(rep, "functional_equation", fe < P["functional_tol"].get<double>(), kFunctional,
              "||d^-1 f^* T - T|| = " + fmt(fe));
  add_verdict(rep, "limit_class_dominant", run.class_F_residual < 1e-9, kFunctional,
              "distance to F " + fmt(run.class_F_residual));
}

void run_uniqueness(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  TorusMap f = torus_map(cfg);
  const int q = static_cast<int>(P["q"].get<long long>());
  const auto count = static_cast<std::size_t>(P["count"].get<long long>());
  auto fam = random_positive_perturbations(f.torus(), q, count, cfg["seed"].get<std::uint64_t>(),
                                           P["amplitude"], static_cast<int>(P["max_mode"].get<long long>()));
  const int n = static_cast<int>(P["n_max"].get<long long>());
  std::vector<IterationRun> runs;
  double worst_fe = 0.0;
  for (const auto& S : fam) {
    runs.push_back(iterate_green(f, S, n));
    worst_fe = std::max(worst_fe, functional_equation_residual(f, runs.back().limit, runs.back().d_q));
  }
  double worst = 0.0;
  Json pairs = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      double d = c_minus_l(runs[i].final_iterate - runs[j].final_iterate, 2.0);
      worst = std::max(worst, d);
      pairs.push_back({i, j, d});
    }
  rep.results["pairwise"] = pairs;
  rep.results["max_pairwise_distance"] = worst;
  rep.results["max_functional_residual"] = worst_fe;
  rep.results["d_q"] = runs.front().d_q;
  double dropped = 0.0;
  for (const auto& r : runs) dropped = std::max(dropped, r.dropped_mass_total);
  rep.dropped_mass["pullbacks"] = dropped;
  add_sequence(rep, "limit_distance_first", runs.front().limit_distances);
  add_verdict(rep, "pairwise_limits_agree", worst < P["tol"].get<double>(), kUnique,
              std::to_string(count) + " perturbations, max distance " + fmt(worst));
  add_verdict(rep, "functional_equation", worst_fe < P["functional_tol"].get<double>(), kFunctional,
              "max residual " + fmt(worst_fe));
}

struct GreenPair {
  FourierForm T_plus, T_minus;
  MixingReport mix;
  int p;
};

GreenPair green_pair(const TorusMap& f, int n_max) {
  auto model = build_torus_cohomology(f);
  auto mix = mixing_criterion(model);
  const int p = mix.p;
  const int k = f.k();
  if (p < 1 || p >= k) throw Error("no dominant degree strictly between 0 and k");
  auto X = f.torus();
  FourierForm Tp = iterate_green(f, FourierForm::omega_power(X, p), n_max).limit;
  FourierForm Tm = iterate_green(f.inverse(), FourierForm::omega_power(X, k - p), n_max).limit;
  return {Tp, Tm, mix, p};
}

MeasureDensity normalized_measure(const TorusMap& f, const GreenPair& g) {
  MeasureDensity mu = equilibrium_measure(f, g.T_plus, g.T_minus, g.mix.cond2);
  if (mu.mass > 0.0) {
    mu.density *= std::complex<double>(1.0 / mu.mass, 0.0);
    mu.nonneg_certificate /= mu.mass;
    mu.mass = 1.0;
  }
  return mu;
}

void run_measure(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  TorusMap f = torus_map(cfg);
  GreenPair g = green_pair(f, static_cast<int>(P["n_max"].get<long long>()));
  MeasureDensity mu = equilibrium_measure(f, g.T_plus, g.T_minus, g.mix.cond2);
  rep.results["p"] = g.p;
  rep.results["mass"] = mu.mass;
  rep.results["nonneg_certificate"] = mu.nonneg_certificate;
  rep.results["invariance_residual"] = mu.invariance_residual;
  rep.results["flag"] = mu.flag;
  rep.results["density"] = form_to_json(mu.density);
  rep.results["mixing_criterion"] = g.mix.cond2;
  auto model = build_torus_cohomology(f);
  const double cup = class_coordinates(g.T_plus).dot(model.P[g.p] * class_coordinates(g.T_minus));
  rep.results["cup_pairing"] = cup;
  const double tol = P["tol"];
  add_verdict(rep, "invariant", mu.invariant && mu.invariance_residual < tol * std::max(1.0, mu.mass), kInvariant,
              "residual " + fmt(mu.invariance_residual));
  add_verdict(rep, "nonnegative_density", mu.nonneg_certificate >= -tol * std::max(1.0, mu.mass), kInvariant,
              "grid minimum " + fmt(mu.nonneg_certificate));
  add_verdict(rep, "mass_equals_cup_product", std::abs(mu.mass - cup) <= tol * std::max(1.0, std::abs(cup)), kMixing,
              "mass " + fmt(mu.mass) + ", cup " + fmt(cup));
  add_verdict(rep, "positive_mass_iff_criterion", (mu.mass > 0.0) == g.mix.cond2, kMixing,
              std::string("criterion ") + (g.mix.cond2 ? "holds" : "fails") + ", mass " + fmt(mu.mass));
}

FourierForm character(std::shared_ptr<const Torus> X, const Mode& m) {
  Eigen::VectorXcd c(1);
  c(0) = 1.0;
  return FourierForm::single_mode(X, {0, 0}, m, c);
}

void run_mixing(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  const Json expect = cfg.value("expect", Json::object());
  CohomologyModel model = model_of(cfg);
  auto mix = mixing_criterion(model, P["N_max"].get<long long>(), P["N_decay"].get<long long>(), P["tol"]);
  rep.results["criterion"] = {{"p", mix.p},
                              {"hypotheses_met", mix.hypotheses_met},
                              {"note", mix.note},
                              {"cond2", mix.cond2},
                              {"cond3", mix.cond3},
                              {"multiplicity", mix.multiplicity},
                              {"floor", mix.floor},
                              {"fitted_limit", mix.fitted_limit},
                              {"fitted_rate", mix.fitted_rate},
                              {"bounded_below", mix.bounded_below}};
  Json ms = Json::array();
  for (const auto& [N, v] : mix.mass_series) ms.push_back({static_cast<double>(N), v});
  rep.sequences["mass_series"] = ms;
  Json dp = Json::array();
  for (const auto& [N, v] : mix.decay_points) dp.push_back({static_cast<double>(N), v});
  rep.sequences["mass_decay"] = dp;
  if (mix.hypotheses_met) {
    add_verdict(rep, "cond2_iff_cond3", mix.equivalent, kMixing,
                std::string("cond2 ") + (mix.cond2 ? "true" : "false") + ", cond3 " + (mix.cond3 ? "true" : "false"));
    add_verdict(rep, "mass_series_matches_criterion", mix.bounded_below == mix.cond2, kMixing,
                "floor " + fmt(mix.floor) + ", limit " + fmt(mix.fitted_limit));
  }
  if (expect.contains("mixing"))
    add_verdict(rep, "expected_mixing", mix.cond2 == expect["mixing"].get<bool>(), kMixing,
                std::string("cond2 ") + (mix.cond2 ? "true" : "false"));
  if (expect.contains("decay_rate")) {
    const double want = expect["decay_rate"], rt = expect.value("rate_tol", 0.2);
    add_verdict(rep, "expected_decay_rate", std::abs(mix.fitted_rate - want) <= rt * std::abs(want), kMixing,
                "fitted " + fmt(mix.fitted_rate) + " vs " + fmt(want));
  }

  if (!cfg.contains("torus") || !mix.cond2) return;
  // Correlations of characters: C_n(e_m, e_m') can only be nonzero when
  // m' = -(f^n)^* m, so every pair of the ball is covered by the orbit pairs;
  // a deterministic sample of other pairs is checked as well.
  TorusMap f = torus_map(cfg);
  auto X = f.torus();
  GreenPair g = green_pair(f, 14);
  MeasureDensity mu = normalized_measure(f, g);
  const double R = P["max_norm"];
  const int n_max = static_cast<int>(P["n_max"].get<long long>());
  const int n0_max = static_cast<int>(P["n0_max"].get<long long>());
  const int dim = 2 * X->k();
  const auto r = static_cast<long long>(std::floor(R));
  std::vector<Mode> ball;
  Mode m(static_cast<std::size_t>(dim), -r);
  while (true) {
    bool nonzero = std::any_of(m.begin(), m.end(), [](long long v) { return v != 0; });
    if (nonzero && mode_norm(m) <= R) ball.push_back(m);
    int i = 0;
    while (i < dim && m[i] == r) m[i++] = -r;
    if (i == dim) break;
    ++m[i];
  }
  long long pairs = 0;
  int worst_n0 = 0;
  bool tails = true;
  for (const auto& a : ball) {
    FourierForm img = character(X, a);
    for (int n = 0; n <= n_max; ++n) {
      if (n > 0) img = pullback(f, img);
      if (img.coefficients().empty()) break;  // left the mode box
      const Mode& an = img.coefficients().begin()->first;
      Mode b = negate(an);
      if (mode_norm(b) > R) continue;
      auto run = mixing_correlations(mu, f, character(X, a), character(X, b), n_max);
      ++pairs;
      tails = tails && run.tail_zero;
      worst_n0 = std::max(worst_n0, run.n0);
    }
  }
  CounterRng rng(cfg.value("seed", 0ULL), 0);
  const long long extra = P["offdiagonal_samples"].get<long long>();
  for (long long s = 0; s < extra && ball.size() > 1; ++s) {
    const Mode& a = ball[static_cast<std::size_t>(rng.integer(0, static_cast<long long>(ball.size()) - 1))];
    const Mode& b = ball[static_cast<std::size_t>(rng.integer(0, static_cast<long long>(ball.size()) - 1))];
    auto run = mixing_correlations(mu, f, character(X, a), character(X, b), n_max);
    ++pairs;
    tails = tails && run.tail_zero;
    worst_n0 = std::max(worst_n0, run.n0);
  }
  rep.results["correlations"] = {{"modes", ball.size()}, {"pairs_checked", pairs}, {"max_n0", worst_n0}};
  add_verdict(rep, "correlation_tails_vanish", tails && worst_n0 <= n0_max, kErgodic,
              std::to_string(ball.size()) + " modes, max n0 " + std::to_string(worst_n0));
}

void run_moderate(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  TorusMap f = torus_map(cfg);
  auto X = f.torus();
  GreenPair g = green_pair(f, static_cast<int>(P["n_max"].get<long long>()));
  MeasureDensity mu = normalized_measure(f, g);
  const std::uint64_t seed = cfg["seed"];
  std::vector<LogSingularFunction> fam;
  for (long long c = 0; c < P["centers"].get<long long>(); ++c) {
    CounterRng rng(seed, 1000 + static_cast<std::uint64_t>(c));
    Eigen::VectorXd a(X->real_dim());
    for (int i = 0; i < a.size(); ++i) a(i) = rng.uniform();
    fam.push_back({a, P["r0"].get<double>(), 1.0});
  }
  auto grid = P["lambda_grid"].get<std::vector<double>>();
  auto rep_m = moderate_check(mu, fam, grid, P["samples"].get<long long>(), seed);
  Json cells = Json::array();
  for (const auto& c : rep_m.cells)
    cells.push_back({{"u", c.u_index}, {"lambda", c.lambda}, {"value", c.value}, {"std_error", c.std_error},
                     {"inconclusive", c.inconclusive}, {"flag", c.flag}});
  rep.results["cells"] = cells;
  rep.results["lambda_max"] = rep_m.lambda_max;
  rep.results["bound"] = rep_m.bound;
  std::vector<double> vals;
  for (const auto& c : rep_m.cells)
    if (c.u_index == 0) vals.push_back(c.value);
  Json s = Json::array();
  for (std::size_t i = 0; i < vals.size(); ++i) s.push_back({grid[i], vals[i]});
  rep.sequences["exp_integral_u0"] = s;
  add_verdict(rep, "moderate", rep_m.finite && rep_m.lambda_max > 0.0, kModerate,
              "lambda_max " + fmt(rep_m.lambda_max) + ", A " + fmt(rep_m.bound));
}

void run_entropy(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  TorusSpec spec = torus_from_json(cfg.at("torus"), "torus");
  TorusMap f(spec);
  const std::uint64_t seed = cfg["seed"];
  auto prof = dynamical_degrees(build_torus_cohomology(f));
  const double ht = prof.entropy;
  const int n = static_cast<int>(P["n"].get<long long>());
  const double eps = P["epsilon"];
  const double rel = P["rel_tol"];
  std::vector<Eigen::VectorXd> centers;
  for (long long c = 0; c < P["centers"].get<long long>(); ++c) {
    CounterRng rng(seed, 2000 + static_cast<std::uint64_t>(c));
    Eigen::VectorXd a(f.torus()->real_dim());
    for (int i = 0; i < a.size(); ++i) a(i) = rng.uniform();
    centers.push_back(a);
  }
  auto est = brin_katok_estimate(spec, n, eps, centers, P["samples"].get<long long>(), seed, P["method"]);
  rep.results["brin_katok"] = {{"h_value", est.h_value}, {"raw_value", est.raw_value}, {"n_used", est.n_used},
                               {"epsilon", est.epsilon}, {"method", est.method}, {"error_bar", est.error_bar},
                               {"per_center", est.per_center}};
  rep.results["degree_entropy"] = ht;
  rep.results["degrees"] = prof.degrees;
  add_verdict(rep, "gromov_yomdin", std::abs(est.h_value - ht) <= rel * ht + 1e-12, kTopEntropy,
              "Brin-Katok " + fmt(est.h_value) + " vs max log d_q " + fmt(ht));
  add_verdict(rep, "brin_katok_error_bar", est.error_bar <= rel * std::max(ht, 1.0), kBrinKatok,
              "error bar " + fmt(est.error_bar));

  // Misiurewicz bound from Bowen volumes at n = 2, 4, .., n.
  std::vector<double> c, ns;
  const BowenBasis basis = bowen_basis(f);
  for (int i = 2; i <= n; i += 2) {
    double lv;
    if (basis.eigen) {
      lv = bowen_ball_log_volume({spec, i, eps, {}});
    } else {
      auto mc = bowen_ball_monte_carlo({spec, i, eps, {}}, P["samples"].get<long long>(), seed, 5000 + i);
      if (mc.hits == 0) break;
      lv = mc.log_volume;
    }
    c.push_back(std::exp(lv));
    ns.push_back(i);
  }
  if (c.size() >= 2) {
    const double mb = misiurewicz_bound(c, ns);
    rep.results["misiurewicz_bound"] = mb;
    add_verdict(rep, "misiurewicz_lower_bound", mb <= ht + 1e-6, kMisiurewicz,
                "bound " + fmt(mb) + " <= " + fmt(ht));
    if (ht > 0.0)
      add_verdict(rep, "maximal_entropy", mb >= (1.0 - rel) * ht, kMaxEntropy,
                  "bound " + fmt(mb) + " vs log d_p " + fmt(ht));
    std::vector<double> lc;
    for (double v : c) lc.push_back(std::log(v));
    Json s = Json::array();
    for (std::size_t i = 0; i < lc.size(); ++i) s.push_back({ns[i], lc[i]});
    rep.sequences["bowen_log_volume"] = s;
  }

  auto y = yomdin_ball_mass(spec, static_cast<int>(P["yomdin_n_max"].get<long long>()), eps, P["yomdin_delta"],
                            P["samples"].get<long long>(), seed, 4, std::max(1, prof.p));
  rep.results["yomdin"] = {{"p", y.p}, {"A", y.A}, {"growth_rate", y.growth_rate}, {"method", y.method},
                           {"inconclusive", y.inconclusive}, {"values", y.values}};
  add_sequence(rep, "yomdin_mass", y.values, 0.0);
  add_verdict(rep, "yomdin_bounded", y.bounded, kYomdin, "A " + fmt(y.A) + ", slope " + fmt(y.growth_rate));
}

void run_lyapunov(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  const Json expect = cfg.value("expect", Json::object());
  TorusSpec spec = torus_from_json(cfg.at("torus"), "torus");
  auto ly = lyapunov_exponents(spec, P["tol"]);
  Json distinct = Json::array();
  for (const auto& [v, mult] : ly.distinct) distinct.push_back({v, mult});
  rep.results["exponents"] = ly.exponents;
  rep.results["distinct"] = distinct;
  rep.results["sum"] = ly.sum;
  rep.results["hyperbolic"] = ly.hyperbolic;
  add_sequence(rep, "exponents", ly.exponents, 0.0);
  add_verdict(rep, "exponent_sum_zero", std::abs(ly.sum) < P["sum_tol"].get<double>(), kErgodic,
              "sum " + fmt(ly.sum));
  if (expect.contains("exponents")) {
    Eigen::VectorXd want = real_vector_from_json(expect["exponents"], "expect.exponents");
    const double atol = expect.value("atol", 1e-10);
    bool ok = static_cast<std::size_t>(want.size()) == ly.exponents.size();
    double worst = 0.0;
    for (Eigen::Index i = 0; ok && i < want.size(); ++i) worst = std::max(worst, std::abs(ly.exponents[i] - want(i)));
    add_verdict(rep, "expected_exponents", ok && worst <= atol, kErgodic, "max deviation " + fmt(worst));
  }
  auto prof = dynamical_degrees(build_torus_cohomology(spec));
  try {
    auto v = de_thelin_check(ly, prof, P["tol"]);
    rep.results["de_thelin"] = {{"p", v.p}, {"bound_plus", v.bound_plus}, {"bound_minus", v.bound_minus},
                                {"count_plus", v.count_plus}, {"count_minus", v.count_minus},
                                {"equality_gap", v.equality_gap}};
    add_verdict(rep, "de_thelin", v.passed, kDeThelin, v.details + ", gap " + fmt(v.equality_gap));
    add_verdict(rep, "hyperbolic", ly.hyperbolic, kErgodic, ly.hyperbolic ? "no zero exponent" : "zero exponent");
  } catch (const Error& e) {
    rep.results["de_thelin"] = {{"skipped", e.what()}};
  }
}

void run_sweep(const Json& cfg, ExperimentReport& rep) {
  const Json& P = cfg["params"];
  TorusMap f = torus_map(cfg);
  auto X = f.torus();
  const int p = static_cast<int>(P["p"].get<long long>());
  if (p > X->k()) throw UsageError("params.p: exceeds the dimension");
  auto basis = NormalizationBasis::standard(X, p);
  const int max_norm = static_cast<int>(P["max_norm"].get<long long>());
  // Random positive perturbation plus dyadic modes on the first axis, so the
  // family actually sees S.
  FourierForm S = random_positive_perturbations(X, p, 1, cfg.value("seed", 0ULL))[0];
  FourierForm ladder(X, {p - 1, p - 1});
  for (int j = 1; j <= max_norm; j *= 2) {
    Mode m(static_cast<std::size_t>(2 * X->k()), 0);
    m[0] = j;
    FourierForm c = FourierForm::cos_mode(X, m, 1.0 / (double(j) * j));
    for (int i = 1; i < p; ++i) c = wedge(c, FourierForm::omega_power(X, 1));
    ladder += c;
  }
  const FourierForm bump = ddc(ladder);
  double a = 0.02 / std::max(1e-300, bump.max_coefficient());
  for (int tries = 0; tries < 60 && positivity_constant(S + a * bump, NormOptions{}) > 0.0; ++tries) a *= 0.5;
  S += a * bump;
  rep.results["ladder_amplitude"] = a;
  auto fam = probe_family(X, p, max_norm,
                          static_cast<int>(P["small_box"].get<long long>()));
  auto ext = probe_family(X, p, static_cast<int>(P["extension_norm"].get<long long>()), 0);
  auto sw = main_estimate_sweep(S, fam, basis, ext);
  rep.results["c"] = sw.c;
  rep.results["c_extended"] = sw.c_extended;
  rep.results["family_size"] = fam.size();
  rep.results["extension_size"] = ext.size();
  Json t = Json::array();
  for (const auto& [x, y] : sw.table) t.push_back({x, y});
  rep.sequences["abs_U_vs_c1"] = t;
  add_verdict(rep, "log_estimate_constant_stable", std::isfinite(sw.c) && sw.stable, kLogEstimate,
              "c " + fmt(sw.c) + ", extended " + fmt(sw.c_extended));
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
}

std::string sequence_csv(const Json& seq) {
  std::ostringstream out;
  out << std::setprecision(17) << "x,y\n";
  for (const auto& pt : seq) {
    out << pt[0].get<double>() << ",";
    if (pt[1].is_number())
      out << pt[1].get<double>();
    else
      out << "nan";
    out << "\n";
  }
  return out.str();
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"degrees", "spectral", "green",    "cesaro",   "uniqueness", "measure",
                                                 "mixing",  "moderate", "entropy",  "lyapunov", "sweep"};
  return kinds;
}

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

Json ExperimentReport::to_json(bool with_timing) const {
  Json vs = Json::array();
  for (const auto& v : verdicts)
    vs.push_back({{"name", v.name}, {"passed", v.passed}, {"anchor", v.anchor}, {"detail", v.detail}});
  Json echo = config;
  echo.erase("output_dir");
  Json out = {{"report_version", kReportVersion},
              {"kind", kind},
              {"name", name},
              {"config", echo},
              {"results", results},
              {"sequences", sequences},
              {"verdicts", vs},
              {"dropped_mass", dropped_mass},
              {"passed", passed()}};
  if (with_timing) out["timing"] = {{"seconds", timing_seconds}};
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError(path + ": invalid JSON: " + e.what());
  }
}

Json validate_config(const Json& raw, const std::string& base_dir) {
  Reader top(raw, "config");
  Json out = Json::object();
  const long long version = top.integer("schema_version", kSchemaVersion, kSchemaVersion, kSchemaVersion);
  out["schema_version"] = version;
  auto kind_j = top.raw("kind");
  if (!kind_j || !kind_j->is_string()) throw UsageError("config.kind: missing or not a string");
  const std::string kind = kind_j->get<std::string>();
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) throw UsageError("config.kind: unknown kind " + kind);
  out["kind"] = kind;
  auto name = top.raw("name");
  if (name && !name->is_string()) throw UsageError("config.name: expected a string");
  out["name"] = name ? name->get<std::string>() : kind;
  if (auto d = top.raw("description")) out["description"] = *d;
  if (auto o = top.raw("output_dir")) {
    if (!o->is_string()) throw UsageError("config.output_dir: expected a string");
    out["output_dir"] = *o;
  }

  auto torus = top.raw("torus");
  auto model = top.raw("model");
  auto model_path = top.raw("model_path");
  auto degrees = top.raw("degrees");
  auto matrix = top.raw("matrix");
  if (model_path) {
    if (!model_path->is_string()) throw UsageError("config.model_path: expected a string");
    if (model) throw UsageError("config.model_path: give either model or model_path");
    fs::path p = fs::path(base_dir) / model_path->get<std::string>();
    model = load_json_file(p.string());
  }
  const int inputs = (torus ? 1 : 0) + (model ? 1 : 0) + (degrees ? 1 : 0) + (matrix ? 1 : 0);
  if (inputs > 1) throw UsageError("config: give exactly one of torus, model, model_path, degrees, matrix");
  const std::set<std::string> torus_only = {"green", "cesaro", "uniqueness", "measure", "moderate",
                                            "entropy", "lyapunov", "sweep"};
  if (kind == "spectral") {
    if (!matrix) throw UsageError("config.matrix: required for kind spectral");
    Eigen::MatrixXd L = real_matrix_from_json(*matrix, "config.matrix");
    if (L.rows() != L.cols()) throw UsageError("config.matrix: must be square");
    out["matrix"] = *matrix;
  } else if (torus_only.count(kind)) {
    if (!torus) throw UsageError("config.torus: required for kind " + kind);
  } else if (kind == "degrees") {
    if (inputs != 1 || matrix) throw UsageError("config: kind degrees needs one of torus, model, model_path, degrees");
  } else if (kind == "mixing") {
    if (!torus && !model) throw UsageError("config: kind mixing needs torus or model");
  }
  if (torus) {
    TorusSpec spec = torus_from_json(*torus, "config.torus");
    try {
      TorusMap f(spec);
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(std::string("config.torus: ") + e.what());
    }
    out["torus"] = *torus;
  }
  if (model) {
    model_from_json(*model, "config.model");
    out["model"] = *model;
  }
  if (degrees) {
    Eigen::VectorXd d = real_vector_from_json(*degrees, "config.degrees");
    if (d.size() < 2) throw UsageError("config.degrees: need at least d_0 and d_1");
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (!(d(i) > 0.0)) throw UsageError("config.degrees[" + std::to_string(i) + "]: must be > 0");
    out["degrees"] = *degrees;
  }
  if (auto s = top.raw("seed")) {
    if (!s->is_number_unsigned()) throw UsageError("config.seed: expected a nonnegative integer");
    out["seed"] = *s;
  } else if (kStochastic.count(kind)) {
    throw UsageError("config.seed: required for kind " + kind);
  }
  auto params = top.raw("params");
  out["params"] = validate_params(kind, params ? *params : Json::object());
  if (auto e = top.raw("expect")) out["expect"] = validate_expect(*e);
  top.finish();
  return out;
}

ExperimentReport run_experiment(const Json& config) {
  ExperimentReport rep;
  rep.kind = config.at("kind");
  rep.name = config.at("name");
  rep.config = config;
  const auto start = std::chrono::steady_clock::now();
  static const std::map<std::string, std::function<void(const Json&, ExperimentReport&)>> dispatch = {
      {"degrees", run_degrees},
      {"spectral", run_spectral},
      {"green", [](const Json& c, ExperimentReport& r) { run_green(c, r, false); }},
      {"cesaro", [](const Json& c, ExperimentReport& r) { run_green(c, r, true); }},
      {"uniqueness", run_uniqueness},
      {"measure", run_measure},
      {"mixing", run_mixing},
      {"moderate", run_moderate},
      {"entropy", run_entropy},
      {"lyapunov", run_lyapunov},
      {"sweep", run_sweep},
  };
  try {
    dispatch.at(rep.kind)(config, rep);
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw Error(rep.kind + " '" + rep.name + "': " + e.what());
  }
  rep.timing_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string output_root(const Json& config) {
  if (config.contains("output_dir")) return config["output_dir"].get<std::string>();
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return "runs";
}

std::string run_directory(const Json& config) {
  Json keyed = config;
  keyed.erase("output_dir");
  const std::string name = config.value("name", config.value("kind", std::string("run")));
  std::string safe;
  for (char ch : name) safe += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
  return (fs::path(output_root(config)) / (safe + "-" + hex64(fnv1a64(keyed.dump())))).string();
}

std::string persist_report(const ExperimentReport& report) {
  const fs::path dir = run_directory(report.config);
  fs::create_directories(dir);
  Json echo = report.config;
  echo.erase("output_dir");
  write_file(dir / "config.json", echo.dump(2) + "\n");
  write_file(dir / "report.json", report.to_json(false).dump(2) + "\n");
  write_file(dir / "timing.json", Json{{"seconds", report.timing_seconds}}.dump(2) + "\n");
  std::ostringstream plot;
  plot << std::setprecision(17) << "figure,x,y\n";
  for (auto it = report.sequences.begin(); it != report.sequences.end(); ++it) {
    write_file(dir / (it.key() + ".csv"), sequence_csv(it.value()));
    for (const auto& pt : it.value()) {
      plot << it.key() << "," << pt[0].get<double>() << ",";
      if (pt[1].is_number())
        plot << pt[1].get<double>();
      else
        plot << "nan";
      plot << "\n";
    }
  }
  write_file(dir / "plot_data.csv", plot.str());
  return dir.string();
}

bool SuiteSummary::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.passed; });
}

Json SuiteSummary::to_json() const {
  Json rows = Json::array();
  for (const auto& e : entries)
    rows.push_back({{"config", e.config_path},
                    {"name", e.name},
                    {"kind", e.kind},
                    {"run_dir", e.run_dir},
                    {"verdicts_passed", e.verdicts_passed},
                    {"verdicts_total", e.verdicts_total},
                    {"passed", e.passed},
                    {"error", e.error}});
  return {{"entries", rows}, {"passed", passed()}};
}

std::string SuiteSummary::table() const {
  std::ostringstream out;
  out << std::left << std::setw(28) << "name" << std::setw(12) << "kind" << std::setw(10) << "verdicts"
      << "status\n";
  for (const auto& e : entries) {
    out << std::left << std::setw(28) << e.name << std::setw(12) << e.kind << std::setw(10)
        << (std::to_string(e.verdicts_passed) + "/" + std::to_string(e.verdicts_total))
        << (e.passed ? "PASS" : "FAIL");
    if (!e.error.empty()) out << "  " << e.error;
    out << "\n";
  }
  out << entries.size() << " configs, " << (passed() ? "all passed" : "failures present") << "\n";
  return out.str();
}

SuiteSummary run_suite(const std::string& manifest_path, bool persist, int workers) {
  const Json manifest = load_json_file(manifest_path);
  if (!manifest.is_object() || !manifest.contains("configs") || !manifest["configs"].is_array())
    throw UsageError(manifest_path + ": expected {\"configs\": [...]}");
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<std::string> paths;
  for (const auto& c : manifest["configs"]) {
    if (!c.is_string()) throw UsageError(manifest_path + ": configs must be strings");
    fs::path p = base / c.get<std::string>();
    if (!fs::exists(p)) throw UsageError("missing config file: " + p.string());
    paths.push_back(p.string());
  }
  std::vector<Json> configs;
  for (const auto& p : paths) configs.push_back(validate_config(load_json_file(p), fs::path(p).parent_path().string()));

  SuiteSummary sum;
  sum.entries.resize(paths.size());
  parallel_for_shards(
      static_cast<long long>(paths.size()),
      [&](long long i) {
        SuiteEntry& e = sum.entries[static_cast<std::size_t>(i)];
        const Json& cfg = configs[static_cast<std::size_t>(i)];
        e.config_path = paths[static_cast<std::size_t>(i)];
        e.name = cfg["name"];
        e.kind = cfg["kind"];
        try {
          ExperimentReport rep = run_experiment(cfg);
          e.verdicts_total = static_cast<int>(rep.verdicts.size());
          for (const auto& v : rep.verdicts) e.verdicts_passed += v.passed ? 1 : 0;
          e.passed = rep.passed();
          if (persist) e.run_dir = persist_report(rep);
        } catch (const std::exception& ex) {
          e.passed = false;
          e.error = ex.what();
        }
      },
      workers);
  return sum;
}

std::string show_run(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const Json rep = load_json_file((dir / "report.json").string());
  std::ostringstream out;
  out << rep.value("name", std::string()) << " (" << rep.value("kind", std::string()) << ")\n";
  for (const auto& v : rep["verdicts"])
    out << (v["passed"].get<bool>() ? "PASS " : "FAIL ") << v["name"].get<std::string>() << ": "
        << v["detail"].get<std::string>() << "  [" << v["anchor"].get<std::string>() << "]\n";
  if (fs::exists(dir / "timing.json")) {
    const Json t = load_json_file((dir / "timing.json").string());
    out << "time " << t.value("seconds", 0.0) << " s\n";
  }
  out << (rep.value("passed", false) ? "passed" : "failed") << "\n";
  return out.str();
}

}  // namespace kahlerdyn

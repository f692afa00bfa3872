#include "kahlerdyn/serialize.hpp"

#include <cstdio>
#include <sstream>

#include "kahlerdyn/error.hpp"

namespace kahlerdyn {

namespace {

const Json& array_at(const Json& j, const std::string& path) {
  if (!j.is_array()) throw UsageError(path + ": expected an array");
  return j;
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw UsageError(path + ": expected a number");
  return j.get<double>();
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw UsageError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw UsageError(path + "." + key + ": missing");
  return *it;
}

int int_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw UsageError(path + ": expected an integer");
  return j.get<int>();
}

}  // namespace

std::complex<double> complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
  throw UsageError(path + ": expected a number or [re, im]");
}

Json complex_to_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

Eigen::MatrixXcd complex_matrix_from_json(const Json& j, const std::string& path) {
  array_at(j, path);
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) throw UsageError(path + ": empty matrix");
  const auto cols = static_cast<Eigen::Index>(array_at(j[0], path + "[0]").size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols) throw UsageError(rp + ": ragged row");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

Eigen::VectorXcd complex_vector_from_json(const Json& j, const std::string& path) {
  array_at(j, path);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd real_matrix_from_json(const Json& j, const std::string& path) {
  Eigen::MatrixXcd m = complex_matrix_from_json(j, path);
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) throw UsageError(path + ": expected real entries");
  return m.real();
}

Eigen::VectorXd real_vector_from_json(const Json& j, const std::string& path) {
  array_at(j, path);
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number_at(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

TorusSpec torus_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw UsageError(path + ": expected an object");
  if (j.contains("product")) {
    const Json& p = array_at(j["product"], path + ".product");
    if (p.size() != 2) throw UsageError(path + ".product: expected two tori");
    return product_torus_spec(torus_from_json(p[0], path + ".product[0]"), torus_from_json(p[1], path + ".product[1]"));
  }
  if (j.contains("random")) {
    const Json& r = j["random"];
    const std::string rp = path + ".random";
    const int k = int_at(field(r, "k", rp), rp + ".k");
    if (k < 1) throw UsageError(rp + ".k: must be >= 1");
    const Json& seed = field(r, "seed", rp);
    if (!seed.is_number_unsigned()) throw UsageError(rp + ".seed: expected a nonnegative integer");
    int moves = r.contains("moves") ? int_at(r["moves"], rp + ".moves") : 6;
    return random_automorphism_spec(k, seed.get<std::uint64_t>(), moves);
  }
  const int k = int_at(field(j, "k", path), path + ".k");
  if (k < 1) throw UsageError(path + ".k: must be >= 1");
  Eigen::MatrixXcd A = complex_matrix_from_json(field(j, "A", path), path + ".A");
  if (A.rows() != k || A.cols() != k) throw UsageError(path + ".A: expected a k x k matrix");
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(k);
  if (j.contains("translation")) {
    b = complex_vector_from_json(j["translation"], path + ".translation");
    if (b.size() != k) throw UsageError(path + ".translation: expected k entries");
  }
  TorusSpec spec = TorusSpec::standard(k, A, b);
  if (j.contains("lattice") && !(j["lattice"].is_string() && j["lattice"] == "standard")) {
    const std::string lp = path + ".lattice";
    const Json& l = array_at(j["lattice"], lp);
    if (static_cast<int>(l.size()) != 2 * k) throw UsageError(lp + ": expected 2k vectors");
    spec.lattice_basis.clear();
    for (std::size_t i = 0; i < l.size(); ++i) {
      Eigen::VectorXcd v = complex_vector_from_json(l[i], lp + "[" + std::to_string(i) + "]");
      if (v.size() != k) throw UsageError(lp + "[" + std::to_string(i) + "]: expected k entries");
      spec.lattice_basis.push_back(v);
    }
  }
  return spec;
}

Json torus_to_json(const TorusSpec& spec) {
  auto cmat = [](const Eigen::MatrixXcd& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
      out.push_back(row);
    }
    return out;
  };
  Json lattice = Json::array();
  for (const auto& v : spec.lattice_basis) {
    Json row = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(complex_to_json(v(i)));
    lattice.push_back(row);
  }
  Json t = Json::array();
  for (Eigen::Index i = 0; i < spec.translation.size(); ++i) t.push_back(complex_to_json(spec.translation(i)));
  return {{"k", spec.k}, {"A", cmat(spec.A)}, {"lattice", lattice}, {"translation", t}};
}

CohomologyModel model_from_json(const Json& j, const std::string& path) {
  CohomologyModel m;
  m.k = int_at(field(j, "k", path), path + ".k");
  if (m.k < 1) throw UsageError(path + ".k: must be >= 1");
  const Json& Ms = array_at(field(j, "M", path), path + ".M");
  const Json& Ps = array_at(field(j, "P", path), path + ".P");
  const Json& Ws = array_at(field(j, "omega_class", path), path + ".omega_class");
  const auto n = static_cast<std::size_t>(m.k + 1);
  if (Ms.size() != n || Ps.size() != n || Ws.size() != n) throw UsageError(path + ": expected k+1 entries in M, P, omega_class");
  for (std::size_t q = 0; q < n; ++q) {
    const std::string idx = "[" + std::to_string(q) + "]";
    Eigen::MatrixXd M = real_matrix_from_json(Ms[q], path + ".M" + idx);
    auto snapped = integral_snap(M, 0.0);
    m.M.push_back(snapped ? *snapped : RealMatrix(M));
    m.P.push_back(real_matrix_from_json(Ps[q], path + ".P" + idx));
    m.omega_class.push_back(real_vector_from_json(Ws[q], path + ".omega_class" + idx));
  }
  if (j.contains("label") && j["label"].is_string()) m.label = j["label"].get<std::string>();
  try {
    m.validate();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
  return m;
}

Json model_to_json(const CohomologyModel& model) {
  Json M = Json::array(), P = Json::array(), W = Json::array();
  for (int q = 0; q <= model.k; ++q) {
    M.push_back(matrix_to_json(model.M[q].values()));
    P.push_back(matrix_to_json(model.P[q]));
    W.push_back(vector_to_json(model.omega_class[q]));
  }
  return {{"k", model.k}, {"M", M}, {"P", P}, {"omega_class", W}, {"label", model.label}};
}

Json form_to_json(const FourierForm& F) {
  Json modes = Json::array();
  for (const auto& [m, c] : F.coefficients()) {
    Json cs = Json::array();
    for (Eigen::Index i = 0; i < c.size(); ++i) cs.push_back(complex_to_json(c(i)));
    modes.push_back({{"m", m}, {"c", cs}});
  }
  return {{"k", F.k()}, {"bidegree", {F.bidegree().p, F.bidegree().q}}, {"modes", modes}};
}

FourierForm form_from_json(std::shared_ptr<const Torus> torus, const Json& j, const std::string& path) {
  const int k = int_at(field(j, "k", path), path + ".k");
  if (k != torus->k()) throw UsageError(path + ".k: does not match the torus");
  const Json& b = array_at(field(j, "bidegree", path), path + ".bidegree");
  if (b.size() != 2) throw UsageError(path + ".bidegree: expected [p, q]");
  FourierForm F(torus, {int_at(b[0], path + ".bidegree[0]"), int_at(b[1], path + ".bidegree[1]")});
  const Json& modes = array_at(field(j, "modes", path), path + ".modes");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string mp = path + ".modes[" + std::to_string(i) + "]";
    const Json& mj = array_at(field(modes[i], "m", mp), mp + ".m");
    if (static_cast<int>(mj.size()) != 2 * k) throw UsageError(mp + ".m: expected 2k integers");
    Mode m;
    for (const auto& v : mj) {
      if (!v.is_number_integer()) throw UsageError(mp + ".m: expected integers");
      m.push_back(v.get<long long>());
    }
    Eigen::VectorXcd c = complex_vector_from_json(field(modes[i], "c", mp), mp + ".c");
    if (c.size() != F.dim()) throw UsageError(mp + ".c: expected " + std::to_string(F.dim()) + " components");
    F.add(m, c);
  }
  return F;
}

std::string form_to_csv(const FourierForm& F) {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < 2 * F.k(); ++i) out << "m" << i << ",";
  out << "component,re,im\n";
  for (const auto& [m, c] : F.coefficients()) {
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      for (auto v : m) out << v << ",";
      out << i << "," << c(i).real() << "," << c(i).imag() << "\n";
    }
  }
  return out.str();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace kahlerdyn

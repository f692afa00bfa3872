// JSON and CSV layouts for tori, cohomology models and Fourier forms.
//
// Complex numbers are written as a bare number (real) or [re, im].
// Parse errors are UsageError("<field path>: <message>").
#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"
#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/forms.hpp"
#include "kahlerdyn/torus.hpp"

namespace kahlerdyn {

using Json = nlohmann::json;

std::complex<double> complex_from_json(const Json& j, const std::string& path);
Json complex_to_json(std::complex<double> z);
Eigen::MatrixXcd complex_matrix_from_json(const Json& j, const std::string& path);
Eigen::VectorXcd complex_vector_from_json(const Json& j, const std::string& path);
Eigen::MatrixXd real_matrix_from_json(const Json& j, const std::string& path);
Eigen::VectorXd real_vector_from_json(const Json& j, const std::string& path);
Json matrix_to_json(const Eigen::MatrixXd& m);
Json vector_to_json(const Eigen::VectorXd& v);

/// {"k", "A", "translation"?, "lattice"?} | {"product": [t1, t2]} |
/// {"random": {"k", "seed", "moves"?}}. "lattice" is "standard" (default) or
/// 2k vectors of k complex numbers.
TorusSpec torus_from_json(const Json& j, const std::string& path);
Json torus_to_json(const TorusSpec& spec);

/// {"k", "M": [matrices], "P": [matrices], "omega_class": [vectors], "label"?}.
/// Integral M_q are stored exactly.
CohomologyModel model_from_json(const Json& j, const std::string& path);
Json model_to_json(const CohomologyModel& model);

/// {"k", "bidegree": [p, q], "modes": [{"m": [...], "c": [z, ...]}, ...]}, modes sorted.
Json form_to_json(const FourierForm& F);
FourierForm form_from_json(std::shared_ptr<const Torus> torus, const Json& j, const std::string& path);
/// Columns m_0..m_{2k-1}, component, re, im.
std::string form_to_csv(const FourierForm& F);

/// FNV-1a over the bytes of s.
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace kahlerdyn

#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "spinspace.hpp"
#include "witness.hpp"

namespace qmetro {

using json = nlohmann::json;

namespace detail {
inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError("expected a complex number as [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Spin spin_from(const json& j) {
  if (j.contains("two_j")) {
    if (!j["two_j"].is_number_integer()) throw ValidationError("two_j must be an integer");
    return Spin(j["two_j"].get<int>());
  }
  if (j.contains("j")) {
    if (!j["j"].is_number()) throw ValidationError("j must be a number");
    return Spin::from_j(j["j"].get<double>());
  }
  throw ValidationError("missing spin header (two_j or j)");
}

inline json header(const Spin& s) {
  return {{"two_j", s.two_j()}, {"j", s.j()}, {"basis", "z"}, {"order", "mu_descending"}};
}

inline void check_header(const json& j) {
  if (j.contains("basis") && j["basis"] != "z") throw ValidationError("only the z basis is supported");
  if (j.contains("order") && j["order"] != "mu_descending") throw ValidationError("only mu_descending order is supported");
}
}  // namespace detail

/// Non-finite numbers become the string "inf" / "-inf" / "nan".
inline json number_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline json to_json(const DickeState& s) {
  json out = detail::header(s.spin());
  json amps = json::array();
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) amps.push_back(detail::complex_json(s.amplitudes()(i)));
  out["amplitudes"] = std::move(amps);
  return out;
}

inline json to_json(const DensityOperator& rho) {
  json out = detail::header(rho.spin());
  json rows = json::array();
  const MatrixXcd& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(detail::complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  out["matrix"] = std::move(rows);
  return out;
}

inline DickeState state_from_json(const json& j) {
  detail::check_header(j);
  const Spin spin = detail::spin_from(j);
  if (!j.contains("amplitudes") || !j["amplitudes"].is_array()) throw ValidationError("state: missing amplitudes array");
  const json& a = j["amplitudes"];
  VectorXcd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = detail::complex_from(a[i]);
  return {spin, std::move(v)};
}

/// Parses and validates (Hermiticity, trace, positivity) a serialized density operator.
inline DensityOperator density_from_json(const json& j) {
  detail::check_header(j);
  const Spin spin = detail::spin_from(j);
  if (!j.contains("matrix") || !j["matrix"].is_array()) throw ValidationError("density: missing matrix array");
  const json& rows = j["matrix"];
  const auto d = static_cast<Eigen::Index>(rows.size());
  if (d != spin.dim()) throw ValidationError("density: matrix has " + std::to_string(d) + " rows, expected " + std::to_string(spin.dim()));
  MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) throw ValidationError("density: matrix is not square");
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = detail::complex_from(row[static_cast<std::size_t>(c)]);
  }
  return {spin, std::move(m)};
}

inline json direction_json(const Direction& n) { return json::array({n.x(), n.y(), n.z()}); }

inline json to_json(const WitnessReport& r) {
  return {
      {"N", r.n},
      {"direction", direction_json(r.direction)},
      {"frame", {{"n1", direction_json(r.frame.n1)}, {"n2", direction_json(r.frame.n2)}, {"n3", direction_json(r.frame.n3)}}},
      {"F_Q", number_json(r.fq)},
      {"chi2", number_json(r.chi2)},
      {"xi2", number_json(r.xi2)},
      {"qcr_bound", number_json(r.qcr_bound)},
      {"statistical_speed", number_json(r.statistical_speed)},
      {"critical_speed", number_json(r.critical_speed)},
      {"max_speed", number_json(r.max_speed)},
      {"shot_noise", number_json(r.shot_noise)},
      {"heisenberg_limit", number_json(r.heisenberg_limit)},
      {"entangled_useful", r.entangled_useful},
      {"spin_squeezed", r.spin_squeezed},
      {"verdict", to_string(r.verdict)},
  };
}

}  // namespace qmetro

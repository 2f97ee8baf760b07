#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <string>

#include "jctes/errors.hpp"
#include "jctes/wigner.hpp"

namespace jctes::io {

using nlohmann::json;

/// {"re": [[...]], "im": [[...]]}, row-major.
inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json re = json::array(), im = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ir = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

inline Eigen::MatrixXcd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw InvalidArgument(where + ": expected an object with \"re\" and \"im\"");
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty())
    throw InvalidArgument(where + ": \"re\" and \"im\" must be non-empty arrays of equal size");
  const auto rows = static_cast<Index>(re.size());
  const auto cols = static_cast<Index>(re.at(0).size());
  Eigen::MatrixXcd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& rr = re.at(r);
    const json& ir = im.at(r);
    if (!rr.is_array() || !ir.is_array() || static_cast<Index>(rr.size()) != cols ||
        static_cast<Index>(ir.size()) != cols)
      throw InvalidArgument(where + ": ragged matrix row " + std::to_string(r));
    for (Index c = 0; c < cols; ++c) {
      if (!rr.at(c).is_number() || !ir.at(c).is_number())
        throw InvalidArgument(where + ": non-numeric entry at (" + std::to_string(r) + "," + std::to_string(c) + ")");
      m(r, c) = cplx(rr.at(c).get<double>(), ir.at(c).get<double>());
    }
  }
  return m;
}

inline json spec_to_json(const PhaseGridSpec& s) {
  return {{"re_range", {s.re_min, s.re_max}}, {"im_range", {s.im_min, s.im_max}}, {"n_re", s.n_re}, {"n_im", s.n_im}};
}

/// Grid spec, normalization and values[i][j] = W(re_i + i im_j).
inline json phase_grid_to_json(const PhaseGrid& g) {
  json values = json::array();
  for (Index i = 0; i < g.spec.n_re; ++i) {
    json row = json::array();
    for (Index j = 0; j < g.spec.n_im; ++j) row.push_back(g.values(i, j));
    values.push_back(std::move(row));
  }
  json out = spec_to_json(g.spec);
  out["normalization"] = g.normalization();
  out["values"] = std::move(values);
  return out;
}

}  // namespace jctes::io

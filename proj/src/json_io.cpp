#include "cartan/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cartan::io {

namespace {

double finite_number(const Json& j, std::string_view what) {
  if (!j.is_number()) throw Error(ErrorKind::input, std::string(what) + ": expected a number, got " + j.dump());
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::input, std::string(what) + ": non-finite number");
  return x;
}

}  // namespace

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Tensor3& t) {
  Json outer = Json::array();
  for (Index a = 0; a < t.dim(); ++a) {
    Json middle = Json::array();
    for (Index b = 0; b < t.dim(); ++b) {
      Json inner = Json::array();
      for (Index c = 0; c < t.dim(); ++c) inner.push_back(t(a, b, c));
      middle.push_back(std::move(inner));
    }
    outer.push_back(std::move(middle));
  }
  return outer;
}

Json to_json(const Domain& domain) { return Json{{"lower", to_json(domain.lower())}, {"upper", to_json(domain.upper())}}; }

Json to_json(const RectangleLoopSpec& spec) {
  return Json{{"base", to_json(spec.base)}, {"axes", {spec.axes[0], spec.axes[1]}}, {"sides", {spec.sides[0], spec.sides[1]}}};
}

Json to_json(const HolonomySample& sample) {
  return Json{{"spec", to_json(sample.spec)}, {"element", to_json(sample.element.matrix())}, {"log", to_json(sample.log.matrix())}};
}

Json to_json(const AlgebraEstimate& estimate) {
  Json basis = Json::array();
  for (const AlgebraElement& b : estimate.basis) basis.push_back(to_json(b.matrix()));
  return Json{{"basis", std::move(basis)},
              {"dimension", estimate.dimension},
              {"inSO", estimate.in_so},
              {"soResidual", estimate.so_residual},
              {"inSL", estimate.in_sl},
              {"slResidual", estimate.sl_residual},
              {"closed", estimate.closed},
              {"closureRounds", estimate.closure_rounds}};
}

Json to_json(const FormGrid& grid) {
  Json nodes = Json::array();
  for (const auto& node : grid.nodes) {
    Json mats = Json::array();
    for (const Matrix& m : node) mats.push_back(to_json(m));
    nodes.push_back(std::move(mats));
  }
  return Json{{"baseDim", grid.base_dim},
              {"fiberDim", grid.fiber_dim},
              {"domain", to_json(grid.domain)},
              {"shape", grid.shape},
              {"nodes", std::move(nodes)}};
}

Json curve_to_json(const Curve& curve) {
  if (!curve.samples()) throw Error(ErrorKind::input, "only sampled curves serialize");
  Json rows = Json::array();
  for (const CurveSample& s : *curve.samples()) {
    Json row = Json::array({s.t});
    for (Index i = 0; i < s.point.size(); ++i) row.push_back(s.point(i));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::input, std::string(what) + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw Error(ErrorKind::input, std::string(what) + ": row 0 is not a non-empty array");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorKind::input, std::string(what) + ": row " + std::to_string(r) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) =
          finite_number(j[r][c], std::string(what) + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

Vector vector_from_json(const Json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::input, std::string(what) + ": expected a non-empty array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = finite_number(j[i], std::string(what) + "[" + std::to_string(i) + "]");
  }
  return v;
}

Domain domain_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("lower") || !j.contains("upper")) {
    throw Error(ErrorKind::input, "domain: expected {\"lower\": [...], \"upper\": [...]}");
  }
  return Domain(vector_from_json(j.at("lower"), "domain.lower"), vector_from_json(j.at("upper"), "domain.upper"));
}

FormGrid grid_from_json(const Json& j) {
  for (const char* key : {"baseDim", "fiberDim", "domain", "shape", "nodes"}) {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::input, std::string("grid form: missing field '") + key + "'");
  }
  FormGrid grid;
  if (!j.at("baseDim").is_number_integer() || !j.at("fiberDim").is_number_integer()) {
    throw Error(ErrorKind::input, "grid form: baseDim and fiberDim must be integers");
  }
  grid.base_dim = j.at("baseDim").get<Index>();
  grid.fiber_dim = j.at("fiberDim").get<Index>();
  grid.domain = domain_from_json(j.at("domain"));
  if (!j.at("shape").is_array()) throw Error(ErrorKind::input, "grid form: shape must be an array");
  for (const Json& s : j.at("shape")) {
    if (!s.is_number_integer()) throw Error(ErrorKind::input, "grid form: shape entries must be integers");
    grid.shape.push_back(s.get<Index>());
  }
  if (!j.at("nodes").is_array()) throw Error(ErrorKind::input, "grid form: nodes must be an array");
  for (std::size_t k = 0; k < j.at("nodes").size(); ++k) {
    const Json& node = j.at("nodes")[k];
    if (!node.is_array()) throw Error(ErrorKind::input, "grid form: node " + std::to_string(k) + " must be an array");
    std::vector<Matrix> mats;
    for (std::size_t i = 0; i < node.size(); ++i) {
      mats.push_back(matrix_from_json(node[i], "grid node " + std::to_string(k) + " matrix " + std::to_string(i)));
    }
    grid.nodes.push_back(std::move(mats));
  }
  return grid;
}

Curve curve_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::input, "curve: expected a list of [t, coords...] rows");
  std::vector<CurveSample> samples;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const Json& row = j[k];
    if (!row.is_array() || row.size() < 2) {
      throw Error(ErrorKind::input, "curve: row " + std::to_string(k) + " must be [t, coords...]");
    }
    const Vector values = vector_from_json(row, "curve row " + std::to_string(k));
    samples.push_back({values(0), values.tail(values.size() - 1)});
  }
  return Curve::polyline(std::move(samples));
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::input, "malformed JSON in '" + path.string() + "' at line " + std::to_string(line) +
                                      ", column " + std::to_string(col) + ": " + e.what());
  }
}

}  // namespace cartan::io

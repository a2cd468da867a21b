#include <memory>

#include "cartan/json_io.hpp"
#include "doctest.h"

using namespace cartan;
using io::Json;

TEST_CASE("matrices and vectors round-trip") {
  Matrix m(2, 3);
  m << 1.0, -0.1, 1e-300, 3.5, 0.0, 1.0 / 3.0;
  CHECK(io::matrix_from_json(io::to_json(m)) == m);
  const Vector v{{0.25, -7.0}};
  CHECK(io::vector_from_json(io::to_json(v)) == v);
}

TEST_CASE("malformed values name the offending field") {
  try {
    io::matrix_from_json(Json::parse("[[1, 2], [3]]"), "k");
    FAIL("ragged matrix accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::input);
    CHECK(std::string(e.what()).find("k: row 1") != std::string::npos);
  }
  CHECK_THROWS_AS(io::matrix_from_json(Json::parse("[[1, \"x\"]]")), Error);
  CHECK_THROWS_AS(io::vector_from_json(Json::parse("[]")), Error);
  CHECK_THROWS_AS(io::domain_from_json(Json::parse("{\"lower\": [0], \"upper\": [1, 2]}")), Error);
  CHECK_THROWS_AS(io::curve_from_json(Json::parse("[[0, 1], [1]]")), Error);
}

TEST_CASE("tensors serialize with the first index outermost") {
  Tensor3 t(2);
  t(1, 0, 1) = 5.0;
  const Json j = io::to_json(t);
  CHECK(j[1][0][1] == 5.0);
  CHECK(j[0][1][1] == 0.0);
}

TEST_CASE("curves and grid forms round-trip") {
  const Json rows = Json::parse("[[0, 0.0, 1.0], [0.5, 0.3, 1.2], [1.0, 0.6, 1.0]]");
  const Curve c = io::curve_from_json(rows);
  CHECK(io::curve_to_json(c) == rows);

  const Domain box(Vector{{0.0, 0.0}}, Vector{{1.0, 2.0}});
  Matrix a(1, 1), b(1, 1);
  a << 2.0;
  b << -1.0;
  const ConnectionForm form(2, 1, box, [a, b](const ChartPoint& x) {
    return std::vector<Matrix>{Matrix(a * x(0)), Matrix(b * x(1))};
  });
  const FormGrid grid = sample_form(form, {3, 2});
  const FormGrid back = io::grid_from_json(io::to_json(grid));
  CHECK(back.shape == grid.shape);
  CHECK(back.base_dim == 2);
  CHECK(back.fiber_dim == 1);
  REQUIRE(back.nodes.size() == grid.nodes.size());
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) CHECK(back.nodes[k][1] == grid.nodes[k][1]);
  const ConnectionForm restored = grid_form(std::make_shared<const FormGrid>(back));
  CHECK(restored(Vector{{0.25, 1.0}})[0](0, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(io::grid_from_json(Json::parse("{\"baseDim\": 2}")), Error);
}

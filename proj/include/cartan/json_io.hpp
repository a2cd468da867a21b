#pragma once

// JSON encodings shared by the library and the CLI. Matrices are row-major
// arrays of arrays of finite doubles; curves are lists of [t, coords...] rows.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "cartan/holonomy.hpp"
#include "cartan/statmanifold.hpp"

namespace cartan::io {

using Json = nlohmann::json;

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
/// Nested arrays, first index outermost (k outermost for Gamma^k_ij).
Json to_json(const Tensor3& t);
Json to_json(const Domain& domain);
Json to_json(const RectangleLoopSpec& spec);
Json to_json(const HolonomySample& sample);
Json to_json(const AlgebraEstimate& estimate);
Json to_json(const FormGrid& grid);
Json curve_to_json(const Curve& curve);

/// Throws Error{input} naming `what` when the value is not a rectangular
/// array of finite numbers.
Matrix matrix_from_json(const Json& j, std::string_view what = "matrix");
Vector vector_from_json(const Json& j, std::string_view what = "vector");
Domain domain_from_json(const Json& j);
FormGrid grid_from_json(const Json& j);
Curve curve_from_json(const Json& j);

/// Parses a file; errors carry the path, line and column.
Json read_file(const std::filesystem::path& path);

}  // namespace cartan::io

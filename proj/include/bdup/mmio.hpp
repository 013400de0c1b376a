#pragma once

#include "bdup/types.hpp"

#include <string>

namespace bdup {

/// Reads a MatrixMarket file (coordinate or array, real; general or
/// symmetric) into a dense matrix. Throws std::runtime_error carrying
/// the offending line number on malformed input.
Matrix read_matrix_market(const std::string& path);

void write_matrix_market(const std::string& path, const Matrix& A, double drop_tol = 0.0);

/// Dense comma-separated matrix, one row per line.
Matrix read_dense_csv(const std::string& path);
void write_dense_csv(const std::string& path, const Matrix& A);

/// Dispatches on the extension: .mtx -> MatrixMarket, .csv -> dense CSV.
Matrix read_matrix_auto(const std::string& path);

/// One value per line.
Vector read_vector_file(const std::string& path);
void write_vector_file(const std::string& path, const Vector& v);

}  // namespace bdup

#pragma once

#include <fpa/types.hpp>

#include <iosfwd>
#include <string>

namespace fpa::mm {

/// Reads a real/integer Matrix Market file (array or coordinate, general or
/// symmetric) into a dense matrix. Malformed or short input raises ParseError
/// with the offending line.
Matrix read_matrix(const std::string& path);
Matrix read_matrix(std::istream& is, const std::string& name = "<stream>");

/// Writes `array real general`, column-major, %.17g (round-trips exactly).
void write_matrix(const std::string& path, const Matrix& A);
void write_matrix(std::ostream& os, const Matrix& A);

/// Whitespace-separated reals, one per line on write.
Vector read_vector(const std::string& path);
void write_vector(const std::string& path, const Vector& v);

/// Whitespace-separated rows of equal length.
Matrix read_dense_text(const std::string& path);

}  // namespace fpa::mm

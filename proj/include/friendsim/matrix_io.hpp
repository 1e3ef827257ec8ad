#pragma once

// Plain-text matrix format shared by kets, density matrices and projectors:
//
//   dims: 2 2
//   0.5+0i 0+0i 0+0i 0+0i
//   ...
//
// One matrix row per line, entries written as "re+imi" (a bare real is also
// accepted). A ket is a single row of prod(dims) entries. Blank lines and lines
// starting with '#' are ignored.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "friendsim/qstate.hpp"

namespace friendsim {

using LoadedState = std::variant<Ket, DensityMatrix>;

std::optional<cplx> parse_complex(std::string_view token);
std::string format_complex(cplx z);

std::string format_ket(const Ket& psi);
std::string format_matrix(const Dims& dims, const CMatrix& m);

/// Parses text; `source` prefixes error messages (usually the file name).
LoadedState parse_state_text(std::string_view text, std::string_view source = "<text>");
LoadedState load_matrix_file(const std::filesystem::path& path);

/// Square matrix with no density-matrix invariants applied (projectors, observables).
Operator parse_operator_text(std::string_view text, std::string_view source = "<text>");
Operator load_operator_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace friendsim

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "metrokit/linalg.hpp"
#include "metrokit/qcore.hpp"
#include "metrokit/qec.hpp"

namespace metrokit::serialize {

/// {"dim": n, "re": [[...]], "im": [[...]]}, row-major.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

nlohmann::json kraus_to_json(const qcore::KrausChannel& channel);
qcore::KrausChannel kraus_from_json(const nlohmann::json& j);

/// State vectors with declared tensor factor dims.
nlohmann::json code_pair_to_json(const qec::CodePair& code);
qec::CodePair code_pair_from_json(const nlohmann::json& j);

/// JSON writer with every double rendered as a 17-significant-digit decimal,
/// so serialized numerics are byte-stable and round-trip exactly.
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace metrokit::serialize

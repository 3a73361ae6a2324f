#pragma once

// nlohmann::json conversions shared by the formatting code. Kept out of the
// public headers so that json.hpp stays a private dependency.

#include <json.hpp>

#include "liftode/diffring.hpp"

namespace liftode::detail {

/// [ { "num", "den", "monomial": [ { "sym", "order", "exp" } ] } ] in
/// canonical term order.
nlohmann::json terms_to_json(const DiffPoly& a);
DiffPoly terms_from_json(const nlohmann::json& terms);

}  // namespace liftode::detail

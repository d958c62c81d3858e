#pragma once

// JSON forms. A DiffPoly serializes as
//   {"terms": [{"coeff": "-3", "k_power": 0,
//               "factors": [{"index": 1, "order": 1, "exp": 1}, ...]}, ...]}
// with terms in canonical (descending) order and exact rational coefficients as strings.
// A FrameField serializes as {"dim": n, "coeffs": ["<DiffPoly text>", ...]}.

#include <json.hpp>

#include "kharmonic/diffpoly.hpp"
#include "kharmonic/frenet.hpp"

namespace kharmonic {

nlohmann::json diffpoly_to_json(const DiffPoly& p);
DiffPoly diffpoly_from_json(const nlohmann::json& j);

nlohmann::json frame_field_to_json(const FrameField& v);
FrameField frame_field_from_json(const nlohmann::json& j);

}  // namespace kharmonic

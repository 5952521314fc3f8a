#pragma once

#include <string>
#include <string_view>

#include "anytime_ville/curves.hpp"

namespace av {

// Curve specs are {"kind": "...", "params": {...}}. Kinds and params:
//   Constant            {c}
//   LogFloor            {scale, offset = 0}
//   QuadraticThreshold  {a, b, base: <curve>}
//   ExpConcaveThreshold {h: <dampener>, base: <curve>}
//   LilThreshold        {d}
//   Tabulated           {points: [[x, v], ...] | csv: <path>, extend_constant = false}
// Dampeners are {"kind": "Polynomial" | "FatTail", "params": {a, b, c}}.

Curve curve_from_json(std::string_view text);
std::string curve_to_json(const Curve& curve);

Dampener dampener_from_json(std::string_view text);
std::string dampener_to_json(const Dampener& h);

/// Reads a CSV with header `x,value`.
Curve tabulated_from_csv(const std::string& path, bool extend_constant = false);

}  // namespace av

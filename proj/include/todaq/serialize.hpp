#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

#include "todaq/expalg.hpp"

namespace todaq {

using Json = nlohmann::ordered_json;

Json to_json(const LinForm& l);
Json to_json(const CoefPoly& c);
Json to_json(const ExpPoly& f);

LinForm linform_from_json(const Json& j);
ExpPoly exppoly_from_json(const Json& j);

// Canonical single-line document; parse(serialize(f)) == f.
std::string serialize(const ExpPoly& f);
ExpPoly parse_exppoly(std::string_view text);

}  // namespace todaq

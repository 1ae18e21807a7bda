#pragma once

#include <string>

#include <json.hpp>

#include "clonecover/instance.hpp"
#include "clonecover/pipeline.hpp"
#include "clonecover/term.hpp"

namespace clonecover {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// Points are [x, y]; tuples are objects keyed by index; partial functions
// list their entries in domain order.
Json to_json(const Point& p);
Json to_json(const MTuple& t);
Json to_json(const PointFn& p);
Json to_json(const TupleFn& p);
Json to_json(const Term& t);
Json to_json(const TermBundle& b);
Json to_json(const Instance& inst);
Json to_json(const Report& r);
Json to_json(const DecompositionTrace& trace);
Json to_json(const VerificationReport& r);

// Parsers throw ParseError naming the offending location.
Point point_from_json(const Json& j, const std::string& where = "");
MTuple tuple_from_json(const Json& j, const std::string& where = "");
PointFn point_fn_from_json(const Json& j, const std::string& where = "");
TermPtr term_from_json(const Json& j, const std::string& where = "");
TermBundle term_bundle_from_json(const Json& j);
Instance instance_from_json(const Json& j);

// Text form used for files: two-space indented JSON with a trailing newline.
std::string dump(const Json& j);
Json parse(const std::string& text);

std::string serialize(const Instance& inst);
std::string serialize(const TermBundle& b);
std::string serialize(const Report& r);
Instance deserialize_instance(const std::string& text);
TermBundle deserialize_term(const std::string& text);

}  // namespace clonecover

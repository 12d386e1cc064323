#pragma once

// Names and parameter sets of the recorded mesh stages. Parameters travel as
// JSON objects (project files, HTTP bodies); normalize_params() fills in the
// defaults and checks every value, so a stored stage is always explicit.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "brickstart/error.hpp"
#include "brickstart/grid.hpp"
#include "brickstart/meshops.hpp"
#include "brickstart/reconstruct.hpp"

namespace brickstart {

using Json = nlohmann::ordered_json;

enum class Operation { Extrude, Lathe, Triplanar, Smooth, Lattice, Scale, Merge };

constexpr std::string_view to_string(Operation op) {
  switch (op) {
    case Operation::Extrude: return "extrude";
    case Operation::Lathe: return "lathe";
    case Operation::Triplanar: return "triplanar";
    case Operation::Smooth: return "smooth";
    case Operation::Lattice: return "lattice";
    case Operation::Scale: return "scale";
    case Operation::Merge: return "merge";
  }
  return "extrude";
}

inline std::optional<Operation> find_operation(std::string_view s) {
  for (auto op : {Operation::Extrude, Operation::Lathe, Operation::Triplanar, Operation::Smooth,
                  Operation::Lattice, Operation::Scale, Operation::Merge}) {
    if (to_string(op) == s) return op;
  }
  return std::nullopt;
}

inline Operation parse_operation(std::string_view s) {
  if (auto op = find_operation(s)) return *op;
  throw Error(ErrorCode::InvalidArgument, "pipeline", "unknown operation '" + std::string(s) + "'");
}

constexpr bool is_reconstruction(Operation op) {
  return op == Operation::Extrude || op == Operation::Lathe || op == Operation::Triplanar;
}

inline std::vector<std::string_view> param_keys(Operation op) {
  switch (op) {
    case Operation::Extrude: return {"side", "depth", "depth_mm", "direction"};
    case Operation::Lathe: return {"side", "axis", "segments"};
    case Operation::Triplanar: return {"sides"};
    case Operation::Smooth: return {"iterations", "lambda", "mu", "preserve_volume"};
    case Operation::Lattice: return {"strut_mm"};
    case Operation::Scale: return {"factor"};
    case Operation::Merge: return {"primitive", "size", "translation", "segments", "resolution_mm"};
  }
  return {};
}

namespace detail {

class ParamReader {
 public:
  ParamReader(Operation op, const Json& given) : op_(op), given_(given) {
    if (!given_.is_null() && !given_.is_object()) fail("params must be a JSON object");
    if (given_.is_object()) {
      const auto keys = param_keys(op);
      for (auto it = given_.begin(); it != given_.end(); ++it) {
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
          fail("unknown parameter '" + it.key() + "'");
        }
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(op_)), msg);
  }

  const Json* find(const char* key) const {
    if (!given_.is_object() || !given_.contains(key)) return nullptr;
    return &given_.at(key);
  }

  long long integer(const char* key, std::optional<long long> def, long long lo, long long hi) const {
    const Json* v = find(key);
    if (!v) {
      if (!def) fail(std::string("missing parameter '") + key + "'");
      return *def;
    }
    if (!v->is_number_integer()) fail(std::string(key) + " must be an integer");
    const long long x = v->get<long long>();
    if (x < lo || x > hi) {
      fail(std::string(key) + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
  }

  double number(const char* key, std::optional<double> def) const {
    const Json* v = find(key);
    if (!v) {
      if (!def) fail(std::string("missing parameter '") + key + "'");
      return *def;
    }
    if (!v->is_number()) fail(std::string(key) + " must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(std::string(key) + " must be finite");
    return x;
  }

  double positive(const char* key, std::optional<double> def) const {
    const double x = number(key, def);
    if (!(x > 0.0)) fail(std::string(key) + " must be positive");
    return x;
  }

  bool boolean(const char* key, bool def) const {
    const Json* v = find(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(std::string(key) + " must be true or false");
    return v->get<bool>();
  }

  std::string choice(const char* key, const char* def, std::initializer_list<const char*> allowed) const {
    const Json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) fail(std::string(key) + " must be a string");
    const auto s = v->get<std::string>();
    for (const char* a : allowed)
      if (s == a) return s;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
    fail(std::string(key) + " must be one of " + list);
  }

 private:
  Operation op_;
  const Json& given_;
};

}  // namespace detail

/// Explicit, validated copy of `given`: every key present, in a fixed order.
inline Json normalize_params(Operation op, const Json& given = Json::object()) {
  const detail::ParamReader r(op, given);
  Json out = Json::object();
  switch (op) {
    case Operation::Extrude: {
      out["side"] = r.choice("side", "front", {"front", "right", "top"});
      out["depth"] = r.integer("depth", 1, 1, 10000);
      const Json* mm = r.find("depth_mm");
      out["depth_mm"] = (mm && !mm->is_null()) ? Json(r.positive("depth_mm", std::nullopt)) : Json(nullptr);
      out["direction"] = r.choice("direction", "positive", {"positive", "negative"});
      break;
    }
    case Operation::Lathe:
      out["side"] = r.choice("side", "front", {"front", "right", "top"});
      out["axis"] = r.choice("axis", "left", {"left", "right"});
      out["segments"] = r.integer("segments", 64, 8, 100000);
      break;
    case Operation::Triplanar: {
      Json sides = Json::array();
      if (const Json* v = r.find("sides")) {
        if (!v->is_array()) r.fail("sides must be an array");
        bool seen[3] = {false, false, false};
        for (const auto& s : *v) {
          if (!s.is_string()) r.fail("sides must hold side names");
          Side side;
          try {
            side = parse_side(s.get<std::string>());
          } catch (const Error& e) {
            r.fail(e.what());
          }
          if (seen[static_cast<int>(side)]) r.fail("duplicate side " + s.get<std::string>());
          seen[static_cast<int>(side)] = true;
        }
        for (auto side : {Side::Front, Side::Right, Side::Top})
          if (seen[static_cast<int>(side)]) sides.push_back(std::string(to_string(side)));
        if (sides.size() == 1) r.fail("triplanar needs two or three sides");
      }
      out["sides"] = sides;
      break;
    }
    case Operation::Smooth:
      out["iterations"] = r.integer("iterations", 10, 0, 10000);
      out["lambda"] = r.number("lambda", 0.5);
      out["mu"] = r.number("mu", -0.53);
      out["preserve_volume"] = r.boolean("preserve_volume", true);
      break;
    case Operation::Lattice:
      out["strut_mm"] = r.positive("strut_mm", kDefaultStrutMm);
      break;
    case Operation::Scale:
      out["factor"] = r.positive("factor", std::nullopt);
      break;
    case Operation::Merge: {
      out["primitive"] = r.choice("primitive", "cube", {"cube", "sphere"});
      out["size"] = r.positive("size", std::nullopt);
      Json t = Json::array({0.0, 0.0, 0.0});
      if (const Json* v = r.find("translation")) {
        if (!v->is_array() || v->size() != 3) r.fail("translation must be [x, y, z]");
        for (std::size_t i = 0; i < 3; ++i) {
          if (!(*v)[i].is_number() || !std::isfinite((*v)[i].get<double>())) r.fail("translation must be [x, y, z]");
          t[i] = (*v)[i].get<double>();
        }
      }
      out["translation"] = t;
      out["segments"] = r.integer("segments", 32, 4, 4096);
      out["resolution_mm"] = r.positive("resolution_mm", kDefaultMergeResolutionMm);
      break;
    }
  }
  return out;
}

// Typed views of normalized parameters.

inline ExtrudeParams extrude_params(const Json& p) {
  ExtrudeParams e;
  e.depth_cells = p.at("depth").get<int>();
  if (!p.at("depth_mm").is_null()) e.depth_mm = p.at("depth_mm").get<double>();
  e.direction = p.at("direction") == "negative" ? ExtrudeDirection::Negative : ExtrudeDirection::Positive;
  return e;
}

inline LatheParams lathe_params(const Json& p) {
  LatheParams l;
  l.axis_side = p.at("axis") == "right" ? LatheParams::Axis::RightEdge : LatheParams::Axis::LeftEdge;
  l.angular_segments = p.at("segments").get<int>();
  return l;
}

inline SmoothParams smooth_params(const Json& p) {
  return {p.at("iterations").get<int>(), p.at("lambda").get<double>(), p.at("mu").get<double>(),
          p.at("preserve_volume").get<bool>()};
}

inline Primitive merge_primitive_params(const Json& p) {
  Primitive prim;
  prim.kind = parse_primitive_kind(p.at("primitive").get<std::string>());
  prim.scale = p.at("size").get<double>();
  const auto& t = p.at("translation");
  prim.translation = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
  prim.segments = p.at("segments").get<int>();
  return prim;
}

}  // namespace brickstart

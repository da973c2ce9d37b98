#include "bsharp/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bsharp/errors.hpp"

namespace bsharp {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json parse_json(std::string_view text) {
  try {
    return ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 1, e.byte);
  }
}

Coefficient coeff_from(const ordered_json& j, const std::string& where) {
  if (j.is_string()) return Coefficient::parse(j.get<std::string>());
  if (j.is_number_integer()) return Coefficient(j.get<long>());
  throw ValidationError(where + ": coefficients must be strings");
}

std::vector<Coefficient> vector_from(const ordered_json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + " must be an array");
  std::vector<Coefficient> out;
  for (const auto& x : j) out.push_back(coeff_from(x, where));
  return out;
}

}  // namespace

std::string series_to_json(const TruncatedBSeries& s, int indent) {
  ordered_json j;
  j["kind"] = s.kind() == SeriesKind::flow ? "flow" : "map";
  j["max_order"] = s.max_order();
  j["empty"] = s.empty_coeff().to_string();
  ordered_json coeffs = ordered_json::object();
  for (std::size_t i = 0; i < s.size(); ++i) {
    coeffs[s.basis().tree(i).to_string()] = s.at_index(i).to_string();
  }
  j["coefficients"] = std::move(coeffs);
  return j.dump(indent);
}

namespace {

TruncatedBSeries series_from_json_impl(std::string_view text) {
  const ordered_json j = parse_json(text);
  if (!j.is_object() || !j.contains("max_order") || !j.contains("coefficients")) {
    throw ValidationError("series JSON needs 'max_order' and 'coefficients'");
  }
  const auto max_order = j.at("max_order").get<std::size_t>();
  const std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "";
  Coefficient empty = j.contains("empty") ? coeff_from(j.at("empty"), "empty")
                                          : Coefficient(kind == "flow" ? 0 : 1);
  if (!kind.empty()) {
    if (kind == "flow" && !empty.is_zero()) {
      throw ValidationError("flow-kind series must have empty coefficient 0");
    }
    if (kind == "map" && empty.is_zero()) {
      throw ValidationError("map-kind series must have a non-zero empty coefficient");
    }
    if (kind != "flow" && kind != "map") {
      throw ValidationError("unknown series kind '" + kind + "'");
    }
  }
  TruncatedBSeries s(max_order, std::move(empty));
  const auto& coeffs = j.at("coefficients");
  if (!coeffs.is_object()) throw ValidationError("'coefficients' must be an object");
  for (const auto& [key, value] : coeffs.items()) {
    const RootedTree t = RootedTree::parse(key);
    if (t.is_empty()) {
      s.set_empty_coeff(coeff_from(value, key));
    } else if (t.order() <= max_order) {
      s.set(t, coeff_from(value, key));
    } else {
      throw ValidationError("tree " + key + " exceeds max_order");
    }
  }
  return s;
}

}  // namespace

TruncatedBSeries series_from_json(std::string_view text) {
  try {
    return series_from_json_impl(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed series JSON: ") + e.what());
  }
}

std::string tableau_to_json(const ButcherTableau& tab, int indent) {
  ordered_json j;
  ordered_json A = ordered_json::array();
  for (const auto& row : tab.A()) {
    ordered_json r = ordered_json::array();
    for (const auto& a : row) r.push_back(a.to_string());
    A.push_back(std::move(r));
  }
  j["A"] = std::move(A);
  ordered_json b = ordered_json::array();
  for (const auto& x : tab.b()) b.push_back(x.to_string());
  j["b"] = std::move(b);
  ordered_json c = ordered_json::array();
  for (const auto& x : tab.c()) c.push_back(x.to_string());
  j["c"] = std::move(c);
  j["symbols"] = tab.symbols();
  return j.dump(indent);
}

namespace {

ButcherTableau tableau_from_json_impl(std::string_view text) {
  const ordered_json j = parse_json(text);
  if (!j.is_object() || !j.contains("A") || !j.contains("b")) {
    throw ValidationError("tableau JSON needs 'A' and 'b'");
  }
  ButcherTableau::Matrix A;
  if (!j.at("A").is_array()) throw ValidationError("'A' must be an array of rows");
  for (const auto& row : j.at("A")) A.push_back(vector_from(row, "A"));
  auto b = vector_from(j.at("b"), "b");
  if (j.contains("c")) {
    return ButcherTableau(std::move(A), std::move(b), vector_from(j.at("c"), "c"));
  }
  return ButcherTableau(std::move(A), std::move(b));
}

}  // namespace

ButcherTableau tableau_from_json(std::string_view text) {
  try {
    return tableau_from_json_impl(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed tableau JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bsharp

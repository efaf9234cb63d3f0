#include "smoothfix/model_config.hpp"

#include <cstdio>
#include <fstream>

#include "smoothfix/error.hpp"

namespace smoothfix {

using nlohmann::json;

namespace {

double number_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ValidationError(where + ": numeric field '" + key + "' required");
  }
  return j.at(key).get<double>();
}

}  // namespace

Complex complex_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      throw ValidationError("complex value must be a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_object()) throw ValidationError("complex value must be an object, pair, or number");
  if (j.contains("modulus") || j.contains("arg")) {
    return std::polar(number_field(j, "modulus", "complex"), number_field(j, "arg", "complex"));
  }
  return {number_field(j, "re", "complex"), number_field(j, "im", "complex")};
}

json complex_to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

WeightModel model_from_json(const json& doc) {
  const json& m = doc.contains("model") ? doc.at("model") : doc;
  if (!m.is_object() || !m.contains("type") || !m.at("type").is_string()) {
    throw ValidationError("model: string field 'type' required");
  }
  const auto type = m.at("type").get<std::string>();
  if (type == "biggins") {
    if (!m.contains("lambda")) throw ValidationError("model.lambda required for biggins");
    return WeightModel::biggins(complex_from_json(m.at("lambda")));
  }
  if (type == "polya") {
    if (!m.contains("b") || !m.at("b").is_number_integer()) {
      throw ValidationError("model.b (integer) required for polya");
    }
    return WeightModel::polya(m.at("b").get<int>());
  }
  if (type == "tabular") {
    if (!m.contains("atoms") || !m.at("atoms").is_array()) {
      throw ValidationError("model.atoms (array) required for tabular");
    }
    std::vector<TabularAtom> atoms;
    for (const auto& a : m.at("atoms")) {
      const double p = number_field(a, "probability", "model.atoms[]");
      if (!a.contains("weights") || !a.at("weights").is_array()) {
        throw ValidationError("model.atoms[].weights (array of [re, im]) required");
      }
      std::vector<Complex> w;
      for (const auto& z : a.at("weights")) w.push_back(complex_from_json(z));
      atoms.push_back({p, WeightDraw(std::move(w))});
    }
    return WeightModel::tabular(std::move(atoms));
  }
  throw ValidationError("model.type must be one of biggins, polya, tabular (got '" + type + "')");
}

json model_to_json(const WeightModel& model) {
  json out;
  out["type"] = std::string(model.kind());
  if (const auto* b = std::get_if<BigginsBinary>(&model.params())) {
    out["lambda"] = complex_to_json(b->lambda);
  } else if (const auto* p = std::get_if<CyclicPolya>(&model.params())) {
    out["b"] = p->b;
  } else {
    json atoms = json::array();
    for (const auto& a : std::get<Tabular>(model.params()).atoms) {
      json w = json::array();
      for (Complex z : a.weights.weights()) w.push_back({z.real(), z.imag()});
      atoms.push_back({{"probability", a.probability}, {"weights", w}});
    }
    out["atoms"] = atoms;
  }
  return json{{"model", out}};
}

WeightModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model config '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError("model config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

std::string model_fingerprint(const WeightModel& model) {
  // FNV-1a over the canonical dump (object keys are sorted by nlohmann::json).
  const std::string text = model_to_json(model).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace smoothfix

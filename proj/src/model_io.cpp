#include "thirdq/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace thirdq {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ModelFileError("model file: " + where + " must be a [re, im] pair");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

ComplexMatrix parse_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ModelFileError("model file: " + where + " must be an " + std::to_string(n) + "x" +
                         std::to_string(n) + " matrix");
  }
  ComplexMatrix out(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) {
      throw ModelFileError("model file: " + where + " row " + std::to_string(r) +
                           " has wrong length");
    }
    for (int c = 0; c < n; ++c) {
      out(r, c) = parse_complex(j[r][c], where + "[" + std::to_string(r) + "][" +
                                             std::to_string(c) + "]");
    }
  }
  return out;
}

ComplexVector parse_vector(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ModelFileError("model file: " + where + " must have length " + std::to_string(n));
  }
  ComplexVector out(n);
  for (int i = 0; i < n; ++i) {
    out(i) = parse_complex(j[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

ordered_json dump_complex(const Complex& z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json dump_matrix(const ComplexMatrix& a) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < a.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < a.cols(); ++c) row.push_back(dump_complex(a(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json dump_vector(const ComplexVector& v) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(dump_complex(v(i)));
  return out;
}

}  // namespace

LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFileError("cannot open model file '" + path + "'");

  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ModelFileError("model file '" + path + "' is not valid JSON: " + e.what());
  }

  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) {
    throw ModelFileError("model file: top level must be an object with integer 'n'");
  }
  const int n = j["n"].get<int>();
  if (n <= 0 || n > 64) {
    throw ModelFileError("model file: 'n' must be in [1, 64]");
  }
  for (const char* key : {"H", "K", "baths"}) {
    if (!j.contains(key)) throw ModelFileError(std::string("model file: missing '") + key + "'");
  }

  ComplexMatrix h = parse_matrix(j["H"], n, "H");
  ComplexMatrix k = parse_matrix(j["K"], n, "K");

  if (!j["baths"].is_array()) throw ModelFileError("model file: 'baths' must be an array");
  std::vector<BathVector> baths;
  for (std::size_t mu = 0; mu < j["baths"].size(); ++mu) {
    const auto& bj = j["baths"][mu];
    const std::string where = "baths[" + std::to_string(mu) + "]";
    if (!bj.is_object() || !bj.contains("l") || !bj.contains("k")) {
      throw ModelFileError("model file: " + where + " must have 'l' and 'k'");
    }
    BathVector b;
    b.l = parse_vector(bj["l"], n, where + ".l");
    b.k = parse_vector(bj["k"], n, where + ".k");
    baths.push_back(std::move(b));
  }

  LoadedModel out;
  try {
    out.model = make_quadratic_model(h, k, std::move(baths));
  } catch (const std::invalid_argument& e) {
    throw ModelFileError("model file '" + path + "': " + e.what());
  }

  if (j.contains("hp")) {
    const auto& hp = j["hp"];
    if (!hp.is_object() || !hp.contains("S") || !hp.contains("orientations")) {
      throw ModelFileError("model file: 'hp' must have 'S' and 'orientations'");
    }
    HPFrame frame;
    if (!hp["S"].is_number()) throw ModelFileError("model file: hp.S must be a number");
    frame.spin = hp["S"].get<double>();
    if (!(frame.spin > 0.0)) throw ModelFileError("model file: hp.S must be positive");
    if (!hp["orientations"].is_array() ||
        static_cast<int>(hp["orientations"].size()) != n) {
      throw ModelFileError("model file: hp.orientations must list one entry per mode");
    }
    for (const auto& o : hp["orientations"]) {
      if (o == "up") {
        frame.orientations.push_back(Orientation::up_vacuum);
      } else if (o == "down") {
        frame.orientations.push_back(Orientation::down_vacuum);
      } else {
        throw ModelFileError("model file: orientation must be 'up' or 'down'");
      }
    }
    out.frame = std::move(frame);
  }
  return out;
}

void save_model_file(const std::string& path, const QuadraticModel& model,
                     const std::optional<HPFrame>& frame) {
  ordered_json j;
  j["n"] = model.n;
  j["H"] = dump_matrix(model.h);
  j["K"] = dump_matrix(model.k);
  j["baths"] = ordered_json::array();
  for (const auto& b : model.baths) {
    ordered_json bj;
    bj["l"] = dump_vector(b.l);
    bj["k"] = dump_vector(b.k);
    j["baths"].push_back(std::move(bj));
  }
  if (frame) {
    ordered_json hp;
    hp["S"] = frame->spin;
    hp["orientations"] = ordered_json::array();
    for (auto o : frame->orientations) {
      hp["orientations"].push_back(o == Orientation::up_vacuum ? "up" : "down");
    }
    j["hp"] = std::move(hp);
  }

  std::ofstream out(path);
  if (!out) throw ModelFileError("cannot write model file '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace thirdq

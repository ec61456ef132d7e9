#include <json.hpp>

#include <fstream>
#include <sstream>

#include "feigdim/error.hpp"
#include "feigdim/fixed_point.hpp"

namespace feigdim {

using nlohmann::json;

std::string to_json(const FixedPointMap& fp) {
  // Keys in schema order; ordered_json keeps them that way on disk.
  nlohmann::ordered_json j;
  j["schema"] = kFixedPointSchema;
  j["p"] = fp.combinatorics().p;
  j["orientation"] = to_string(fp.combinatorics().orientation);
  j["ell"] = fp.ell();
  j["alpha"] = fp.alpha();
  j["basis"] = "chebyshev-u";
  j["degree"] = fp.degree();
  j["coeffs"] = fp.coeffs();
  j["residual"] = fp.residual();
  j["tol"] = fp.meta().tol;
  j["iterations"] = fp.meta().iterations;
  return j.dump(2) + "\n";
}

FixedPointMap from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::CorruptFile, std::string("unparseable fixed-point file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string()) {
    throw Error(ErrorCode::CorruptFile, "fixed-point file has no schema tag");
  }
  if (j["schema"].get<std::string>() != kFixedPointSchema) {
    throw Error(ErrorCode::SchemaMismatch, "expected schema " + std::string(kFixedPointSchema) +
                                               ", found " + j["schema"].get<std::string>());
  }
  try {
    Combinatorics comb;
    comb.p = j.at("p").get<int>();
    const auto orient = j.at("orientation").get<std::string>();
    if (orient == "reversing") {
      comb.orientation = Orientation::reversing;
    } else if (orient == "preserving") {
      comb.orientation = Orientation::preserving;
    } else {
      throw Error(ErrorCode::CorruptFile, "unknown orientation '" + orient + "'");
    }
    if (j.at("basis").get<std::string>() != "chebyshev-u") {
      throw Error(ErrorCode::SchemaMismatch, "unsupported basis");
    }
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    const auto degree = j.at("degree").get<std::size_t>();
    if (coeffs.size() != degree + 1) {
      throw Error(ErrorCode::CorruptFile, "coefficient count does not match degree");
    }
    SolverMeta meta;
    meta.tol = j.at("tol").get<double>();
    meta.iterations = j.at("iterations").get<int>();
    meta.seed = "loaded from cache";
    return FixedPointMap(comb, j.at("ell").get<int>(), j.at("alpha").get<double>(),
                         std::move(coeffs), j.at("residual").get<double>(), std::move(meta));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("malformed fixed-point file: ") + e.what());
  }
}

void save_fixed_point(const FixedPointMap& fp, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::CorruptFile, "cannot write " + path.string());
  out << to_json(fp);
}

FixedPointMap load_fixed_point(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::CorruptFile, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace feigdim

#include <fstream>

#include <json.hpp>

#include "vmdkit/error.hpp"
#include "vmdkit/unfolded.hpp"

namespace vmdkit::unfolded {

using nlohmann::json;

void save_params(const std::filesystem::path& path, const Params& params) {
  params.validate();
  json j;
  j["schema"] = kParamsSchema;
  j["kind"] = "vmdkit.uvmd_params";
  j["modes"] = params.modes;
  j["depth"] = params.depth;
  j["grid_length"] = params.grid_length;
  j["shared_alpha"] = params.shared_alpha;
  j["alpha_raw"] = params.alpha_raw;
  j["multipliers"] = json::array();
  for (const auto& layer : params.multipliers) {
    json re = json::array(), im = json::array();
    for (const auto& v : layer) {
      re.push_back(v.real());
      im.push_back(v.imag());
    }
    j["multipliers"].push_back({{"re", std::move(re)}, {"im", std::move(im)}});
  }
  j["normalization"] = json::array();
  for (const auto& n : params.normalization) {
    j["normalization"].push_back({{"id", n.id}, {"mean", n.norm.mean}, {"std", n.norm.std}});
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(1) << '\n';
}

Params load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open parameter file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("parameter file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.at("schema").get<int>() != kParamsSchema) {
      throw DataError("parameter file '" + path.string() + "' has unsupported schema " + j.at("schema").dump());
    }
    Params p;
    p.modes = j.at("modes").get<std::size_t>();
    p.depth = j.at("depth").get<std::size_t>();
    p.grid_length = j.at("grid_length").get<std::size_t>();
    p.shared_alpha = j.value("shared_alpha", false);
    p.alpha_raw = j.at("alpha_raw").get<RealVec>();
    for (const auto& layer : j.at("multipliers")) {
      const auto re = layer.at("re").get<RealVec>();
      const auto im = layer.at("im").get<RealVec>();
      if (re.size() != im.size()) throw DataError("multiplier re/im lengths differ");
      ComplexVec h(re.size());
      for (std::size_t i = 0; i < re.size(); ++i) h[i] = Complex(re[i], im[i]);
      p.multipliers.push_back(std::move(h));
    }
    for (const auto& n : j.value("normalization", json::array())) {
      p.normalization.push_back(
          NamedNormalization{n.at("id").get<std::string>(), {n.at("mean").get<double>(), n.at("std").get<double>()}});
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw DataError("parameter file '" + path.string() + "' is malformed: " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DataError) throw;
    throw DataError("parameter file '" + path.string() + "' is inconsistent: " + e.what());
  }
}

}  // namespace vmdkit::unfolded

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "steerfid/errors.hpp"
#include "steerfid/states.hpp"

namespace steerfid {

using nlohmann::json;

DensityMatrix state_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("state JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layout") || !doc.contains("matrix")) {
    throw ConfigError("state JSON: expected an object with \"layout\" and \"matrix\"");
  }
  const json& jl = doc["layout"];
  if (!jl.is_array() || jl.empty()) throw ConfigError("state JSON: \"layout\" must be a non-empty array");
  std::vector<Subsystem> subsystems;
  for (const auto& entry : jl) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_number_integer() ||
        entry[1].get<long long>() < 1) {
      throw ConfigError("state JSON: layout entries must be [label, positive dim], got " + entry.dump());
    }
    subsystems.push_back({entry[0].get<std::string>(), entry[1].get<std::size_t>()});
  }
  Layout layout;
  try {
    layout = Layout(std::move(subsystems));
  } catch (const Error& e) {
    throw ConfigError(std::string("state JSON: invalid layout: ") + e.what());
  }
  if (layout.total_dim() > kMaxTotalDim) throw ConfigError("state JSON: total dimension above 256");

  const json& jm = doc["matrix"];
  const auto d = layout.total_dim();
  if (!jm.is_array() || jm.size() != d) {
    throw ConfigError("state JSON: matrix must have " + std::to_string(d) + " rows for layout " + layout.to_string());
  }
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    if (!jm[r].is_array() || jm[r].size() != d) throw ConfigError("state JSON: row " + std::to_string(r) + " has wrong length");
    for (std::size_t c = 0; c < d; ++c) {
      const json& z = jm[r][c];
      double re = 0.0;
      double im = 0.0;
      if (z.is_number()) {
        re = z.get<double>();
      } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
        re = z[0].get<double>();
        im = z[1].get<double>();
      } else {
        throw ConfigError("state JSON: entry (" + std::to_string(r) + "," + std::to_string(c) + ") must be [re, im]");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cplx(re, im);
    }
  }
  return {std::move(m), std::move(layout)};
}

DensityMatrix load_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open state file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return state_from_json(buf.str());
}

std::string state_to_json(const DensityMatrix& rho) {
  json doc;
  doc["layout"] = json::array();
  for (const auto& s : rho.layout().subsystems()) doc["layout"].push_back({s.label, s.dim});
  doc["matrix"] = json::array();
  for (Eigen::Index r = 0; r < rho.matrix().rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < rho.matrix().cols(); ++c) {
      row.push_back({rho.matrix()(r, c).real(), rho.matrix()(r, c).imag()});
    }
    doc["matrix"].push_back(std::move(row));
  }
  return doc.dump();
}

}  // namespace steerfid

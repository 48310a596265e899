#include "qanalysis/json_io.hpp"

#include <string>

namespace qa {

nlohmann::json operator_to_json(const Operator& o) {
  const auto rows = o.rows();
  const auto cols = o.cols();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < rows; ++r) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < cols; ++c) {
      re_row.push_back(o(r, c).real());
      im_row.push_back(o(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return {{"dim", rows}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Operator operator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re")) {
    throw FormatError("operator JSON needs at least 'dim' and 're'");
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "dim" && key != "re" && key != "im") {
      throw FormatError("unknown key '" + key + "' in operator JSON");
    }
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long>() <= 0) {
    throw FormatError("operator 'dim' must be a positive integer");
  }
  const long d = j["dim"].get<long>();
  auto read_part = [&](const char* key, Operator& out, bool real_part) {
    if (!j.contains(key)) return;
    const auto& rows = j[key];
    if (!rows.is_array() || static_cast<long>(rows.size()) != d) {
      throw FormatError(std::string("operator '") + key + "' must have dim rows");
    }
    for (long r = 0; r < d; ++r) {
      const auto& row = rows[r];
      if (!row.is_array() || static_cast<long>(row.size()) != d) {
        throw FormatError(std::string("operator '") + key + "' row " + std::to_string(r) +
                          " must have dim entries");
      }
      for (long c = 0; c < d; ++c) {
        if (!row[c].is_number()) throw FormatError("operator entries must be numbers");
        const double v = row[c].get<double>();
        if (real_part) {
          out(r, c).real(v);
        } else {
          out(r, c).imag(v);
        }
      }
    }
  };
  Operator o = Operator::Zero(d, d);
  read_part("re", o, true);
  read_part("im", o, false);
  return o;
}

}  // namespace qa

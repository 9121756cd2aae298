#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spherekern/certify.hpp"
#include "spherekern/interp.hpp"
#include "spherekern/scheme.hpp"

namespace spherekern {

/// Malformed or contradictory input document.
class SpecError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses a kernel specification document.  One-sided Hermitian entries
/// are mirrored automatically; contradictory mirrors are hard errors.
CoefficientScheme parse_spec(const nlohmann::json& doc);
CoefficientScheme load_spec(const std::string& path);

/// Serializes a scheme back into the specification document format.
nlohmann::json scheme_to_json(const CoefficientScheme& scheme);

/// CSV point file: either polar columns theta1..theta{d-1} or Cartesian
/// x1..xd (auto-normalized, warning above 1e-6 deviation), optionally
/// followed by value_re,value_im.
struct PointsData {
  std::vector<SpherePoint> points;
  std::vector<Complex> values;
  bool has_values = false;
  std::vector<std::string> warnings;
};
PointsData load_points(const std::string& path, int expected_dim);

nlohmann::json certificate_to_json(const Certificate& cert);
nlohmann::json witness_to_json(const Witness& witness);
nlohmann::json gram_sidecar_json(const GramSystem& gs);
std::string gram_to_csv(const Eigen::MatrixXcd& gram);

/// Two-space-indented dump with sorted keys (the parser keeps documents
/// in sorted-map form, so serialization is deterministic).
std::string dump_json(const nlohmann::json& doc);

/// Writes via a temporary file plus rename.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace spherekern

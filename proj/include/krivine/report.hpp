#ifndef KRIVINE_REPORT_HPP
#define KRIVINE_REPORT_HPP

#include <json.hpp>
#include <ostream>
#include <string>

#include "krivine/pipeline.hpp"

namespace krivine {

// Non-finite numbers serialize as null.
nlohmann::json to_json(const IdentityReport& report);
nlohmann::json to_json(const CutResult& result);
nlohmann::json to_json(const CompareReport& report);
nlohmann::json to_json(const ExactCut& exact);

/// Header `rho,estimate,std_error,target,deviation_in_se`, one row per grid
/// point, numbers in shortest round-trip form.
void write_identity_csv(std::ostream& out, const IdentityReport& report);

/// Estimate +- 3 SE against the (2/pi) arcsin curve.
void write_identity_svg(std::ostream& out, const IdentityReport& report);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

}  // namespace krivine

#endif  // KRIVINE_REPORT_HPP

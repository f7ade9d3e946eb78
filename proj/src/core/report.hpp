#ifndef LAPLAB_CORE_REPORT_HPP
#define LAPLAB_CORE_REPORT_HPP

#include <string>

#include <json.hpp>

#include "core/experiments.hpp"
#include "core/geometry.hpp"
#include "core/oracle1d.hpp"
#include "core/weighted.hpp"

namespace laplab {

nlohmann::json to_json(const CertificateReport& r);
nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const std::vector<BoundRow>& rows);
nlohmann::json to_json(const ScanReport& r);
nlohmann::json to_json(const ChainReport& r);
nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const LapLimitTable& t);

// Fixed column orders; see the repository README for the documented layouts.
std::string sweep_rows_csv(const SweepReport& r);
std::string bounds_csv(const std::vector<BoundRow>& rows);
std::string scan_rows_csv(const ScanReport& r);
std::string identity_csv(const IdentityReport& r);
std::string flux_csv(const FluxProbe& p);
std::string field_csv(const GridFunction& u);
std::string exact_solution_csv(const ExactSolution& sol, double lo, double hi,
                               int samples);

std::string format_number(double v);  // %.17g, locale-independent
void write_text_file(const std::string& path, const std::string& content);

}  // namespace laplab

#endif

#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "biabd/frontend.hpp"

namespace biabd {

namespace {

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string millis(double v) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(3) << v;
  return o.str();
}

}  // namespace

ReportRow make_row(const Problem& p, const SolveResult& r) {
  ReportRow row;
  row.name = p.name;
  row.status = status_name(r.status);
  row.solutionCount = static_cast<int>(r.solutions.size());
  if (!r.solutions.empty()) {
    row.bestM = render(r.solutions[0].antiframe);
    row.bestF = render(r.solutions[0].frame);
    row.validated = r.solutions[0].validated;
  }
  row.solveMillis = r.solveMillis;
  row.validateMillis = r.validateMillis;
  row.partial = r.partial;
  row.result = r;
  return row;
}

std::string report_json(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json doc;
  doc["problems"] = nlohmann::ordered_json::array();
  for (auto& row : rows) {
    nlohmann::ordered_json p;
    p["name"] = row.name;
    p["status"] = row.status;
    p["partial"] = row.partial;
    p["solutions"] = nlohmann::ordered_json::array();
    for (auto& s : row.result.solutions) {
      nlohmann::ordered_json j;
      j["guards"] = render(s.guards);
      j["antiframe"] = render(s.antiframe);
      j["frame"] = render(s.frame);
      j["validated"] = s.validated;
      p["solutions"].push_back(j);
    }
    p["solveMs"] = row.solveMillis;
    p["validateMs"] = row.validateMillis;
    doc["problems"].push_back(p);
  }
  return doc.dump(2) + "\n";
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream o;
  o << "name,status,solutionCount,bestM,bestF,solveMillis,validateMillis,validated\n";
  for (auto& r : rows)
    o << csvField(r.name) << ',' << r.status << ',' << r.solutionCount << ',' << csvField(r.bestM) << ','
      << csvField(r.bestF) << ',' << millis(r.solveMillis) << ',' << millis(r.validateMillis) << ','
      << (r.validated ? "true" : "false") << '\n';
  return o.str();
}

std::string report_text(const std::vector<ReportRow>& rows) {
  std::ostringstream o;
  for (auto& r : rows) {
    o << r.name << ": " << r.status;
    if (r.partial) o << " (partial)";
    o << "  [solve " << millis(r.solveMillis) << " ms, validate " << millis(r.validateMillis) << " ms]\n";
    int i = 0;
    for (auto& s : r.result.solutions) {
      o << "  #" << ++i << (s.validated ? "" : " (not validated)") << "\n";
      if (!s.guards.empty()) o << "    when " << render(s.guards) << "\n";
      o << "    M = " << render(s.antiframe) << "\n";
      o << "    F = " << render(s.frame) << "\n";
    }
  }
  return o.str();
}

}  // namespace biabd

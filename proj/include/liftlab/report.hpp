#pragma once

// Machine-parseable checker reports: one line per condition,
//   condition=<name> measured=<value> threshold=<value> pass=<0|1>

#include <ostream>
#include <string>
#include <vector>

namespace liftlab {

struct ReportLine {
  std::string condition;
  std::string measured;
  std::string threshold;
  bool pass = false;
};

inline void print_report(std::ostream& out, const std::vector<ReportLine>& lines) {
  for (const auto& l : lines)
    out << "condition=" << l.condition << " measured=" << l.measured
        << " threshold=" << l.threshold << " pass=" << (l.pass ? 1 : 0) << "\n";
}

inline bool report_all_pass(const std::vector<ReportLine>& lines) {
  for (const auto& l : lines)
    if (!l.pass) return false;
  return true;
}

}  // namespace liftlab

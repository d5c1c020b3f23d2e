#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "macgrid/metrics.hpp"

namespace macgrid {

namespace {

using nlohmann::ordered_json;

ordered_json counts_json(const EvalCounts& counts, const Prf& scores) {
  ordered_json out;
  out["precision"] = scores.precision;
  out["recall"] = scores.recall;
  out["f1"] = scores.f1;
  out["tp"] = counts.true_positives;
  out["predicted"] = counts.predicted;
  out["gold"] = counts.gold;
  return out;
}

ordered_json filtered_json(const FilteredScore& score) {
  ordered_json out = counts_json(score.counts, score.prf);
  out["empty_filter"] = score.empty_filter;
  return out;
}

ordered_json rows_json(const std::vector<BreakdownRow>& rows) {
  ordered_json out = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    r["label"] = row.label;
    r.update(counts_json(row.counts, row.prf));
    out.push_back(std::move(r));
  }
  return out;
}

std::string fixed(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

void text_line(std::ostringstream& os, const std::string& label, const EvalCounts& c,
               const Prf& s, bool empty = false) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-14s P %s  R %s  F1 %s  (tp %ld / pred %ld / gold %ld)%s\n",
                label.c_str(), fixed(s.precision).c_str(), fixed(s.recall).c_str(),
                fixed(s.f1).c_str(), c.true_positives, c.predicted, c.gold,
                empty ? "  [empty filter]" : "");
  os << buf;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  ordered_json doc;
  doc["sentences"] = report.sentences;
  doc["overall"] = filtered_json(report.overall);
  doc["disc_sentence"] = filtered_json(report.disc_sentence);
  doc["disc_only"] = filtered_json(report.disc_only);
  ordered_json patterns;
  patterns["rule"] = std::string(kOverlapPatternRule);
  for (const auto& row : report.patterns) patterns[row.label] = counts_json(row.counts, row.prf);
  doc["patterns"] = std::move(patterns);
  ordered_json buckets;
  buckets["interval"] = rows_json(report.interval);
  buckets["span"] = rows_json(report.span);
  doc["buckets"] = std::move(buckets);
  return doc.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream os;
  os << "sentences " << report.sentences << "\n";
  text_line(os, "overall", report.overall.counts, report.overall.prf,
            report.overall.empty_filter);
  text_line(os, "disc_sentence", report.disc_sentence.counts, report.disc_sentence.prf,
            report.disc_sentence.empty_filter);
  text_line(os, "disc_only", report.disc_only.counts, report.disc_only.prf,
            report.disc_only.empty_filter);
  os << "\noverlap patterns (" << kOverlapPatternRule << ")\n";
  for (const auto& row : report.patterns) text_line(os, row.label, row.counts, row.prf);
  os << "\ninterval length (discontinuous mentions)\n";
  for (const auto& row : report.interval) text_line(os, row.label, row.counts, row.prf);
  os << "\nspan length (discontinuous mentions)\n";
  for (const auto& row : report.span) text_line(os, row.label, row.counts, row.prf);
  return os.str();
}

}  // namespace macgrid

// Copyright 2026 The Pseudokit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <map>

#include "pseudokit/error.h"
#include "pseudokit/eval.h"
#include "pseudokit/rewrite.h"
#include "pseudokit/text.h"

namespace pseudokit {

double LeakageCount::rate() const {
  return total == 0 ? 0.0
                    : 100.0 * static_cast<double>(leaked) /
                          static_cast<double>(total);
}

LeakageReport leakage_report(std::span<const Document> gold,
                             std::span<const Document> rewritten,
                             LeakageOptions options) {
  std::map<std::string_view, const Document*> by_id;
  for (const auto& d : rewritten) by_id.emplace(d.id, &d);

  std::vector<std::string> unmatched;
  std::map<std::string_view, bool> gold_ids;
  for (const auto& d : gold) {
    gold_ids.emplace(d.id, true);
    if (!by_id.contains(d.id)) unmatched.push_back(d.id + " (gold only)");
  }
  for (const auto& d : rewritten) {
    if (!gold_ids.contains(d.id)) unmatched.push_back(d.id + " (rewritten only)");
  }
  if (!unmatched.empty()) {
    std::string msg = "document ids do not match:";
    for (const auto& id : unmatched) msg += " " + id;
    throw Error(msg);
  }

  std::vector<std::array<LeakageCount, 3>> per_doc(gold.size());
  parallel_for(gold.size(), options.workers, [&](std::size_t i) {
    const Document& g = gold[i];
    if (!g.gold_spans) {
      throw Error("gold document '" + g.id + "' has no entities");
    }
    std::u32string text = utf8_decode(by_id.at(g.id)->text);
    if (options.fold_case) text = fold_case(std::u32string_view(text));
    for (const auto& span : *g.gold_spans) {
      std::u32string needle = utf8_decode(span.surface);
      if (options.fold_case) needle = fold_case(std::u32string_view(needle));
      auto& c = per_doc[i][static_cast<std::size_t>(span.category)];
      ++c.total;
      if (contains_word(text, needle)) ++c.leaked;
    }
  });

  LeakageReport report;
  for (const auto& counts : per_doc) {
    for (std::size_t c = 0; c < 3; ++c) {
      report.per_category[c].leaked += counts[c].leaked;
      report.per_category[c].total += counts[c].total;
    }
  }
  std::size_t leaked = 0, total = 0, present = 0;
  double rate_sum = 0;
  for (const auto& c : report.per_category) {
    leaked += c.leaked;
    total += c.total;
    if (c.total > 0) {
      ++present;
      rate_sum += c.rate();
    }
  }
  report.micro_mean =
      total == 0 ? 0.0
                 : 100.0 * static_cast<double>(leaked) /
                       static_cast<double>(total);
  report.macro_mean = present == 0 ? 0.0 : rate_sum / static_cast<double>(present);
  return report;
}

nlohmann::ordered_json leakage_row_json(const LeakageReport& report,
                                        std::string_view system) {
  nlohmann::ordered_json row;
  row["system"] = system;
  // Columns in PER, ORG, LOC order.
  constexpr EntityCategory kColumns[] = {
      EntityCategory::kPer, EntityCategory::kOrg, EntityCategory::kLoc};
  for (auto c : kColumns) row[std::string(category_name(c))] = report.at(c).rate();
  row["micro"] = report.micro_mean;
  row["macro"] = report.macro_mean;
  nlohmann::ordered_json counts;
  for (auto c : kColumns) {
    counts[std::string(category_name(c))] = {{"leaked", report.at(c).leaked},
                                             {"total", report.at(c).total}};
  }
  row["counts"] = std::move(counts);
  return row;
}

nlohmann::ordered_json leakage_table_json(
    std::span<const std::pair<std::string, LeakageReport>> rows) {
  nlohmann::ordered_json j;
  j["columns"] = {"PER", "ORG", "LOC", "micro", "macro"};
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& [system, report] : rows) {
    j["rows"].push_back(leakage_row_json(report, system));
  }
  return j;
}

}  // namespace pseudokit

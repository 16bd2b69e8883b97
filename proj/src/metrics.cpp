#include "evokg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "evokg/error.hpp"
#include "evokg/text.hpp"

namespace evokg {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Entity: return "entity";
    case MetricKind::RelStrict: return "rel_strict";
    case MetricKind::EventTrigger: return "event_trigger";
    case MetricKind::EventArgument: return "event_argument";
  }
  return "?";
}

MetricKind parse_metric(std::string_view s) {
  for (MetricKind k : {MetricKind::Entity, MetricKind::RelStrict, MetricKind::EventTrigger,
                       MetricKind::EventArgument}) {
    if (s == to_string(k)) return k;
  }
  throw DataError("unknown metric: " + std::string(s));
}

namespace {

std::string key_of(std::initializer_list<std::string_view> fields) {
  std::string key;
  bool first = true;
  for (auto f : fields) {
    if (!first) key += '\x1f';
    key += f;
    first = false;
  }
  return key;
}

}  // namespace

std::vector<std::string> match_keys(const Annotations& a, MetricKind kind) {
  std::vector<std::string> keys;
  switch (kind) {
    case MetricKind::Entity:
      for (const auto& e : a.entities) keys.push_back(key_of({e.mention.text, canonical_name(e.type)}));
      break;
    case MetricKind::RelStrict:
      for (const auto& r : a.relations) {
        keys.push_back(key_of({r.head.text, canonical_name(r.head_type), canonical_name(r.relation),
                               r.tail.text, canonical_name(r.tail_type)}));
      }
      break;
    case MetricKind::EventTrigger:
      for (const auto& ev : a.events) keys.push_back(key_of({ev.trigger.text, canonical_name(ev.type)}));
      break;
    case MetricKind::EventArgument:
      for (const auto& ev : a.events) {
        const std::string type = canonical_name(ev.type);
        for (const auto& arg : ev.args) {
          keys.push_back(key_of({arg.mention.text, canonical_name(arg.role), type}));
        }
      }
      break;
  }
  return keys;
}

PRF prf_from_counts(std::size_t n_pred, std::size_t n_gold, std::size_t n_correct) {
  PRF out;
  out.n_pred = n_pred;
  out.n_gold = n_gold;
  out.n_correct = n_correct;
  out.precision = n_pred ? static_cast<double>(n_correct) / static_cast<double>(n_pred) : 0.0;
  out.recall = n_gold ? static_cast<double>(n_correct) / static_cast<double>(n_gold) : 0.0;
  const double s = out.precision + out.recall;
  out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
  return out;
}

namespace {

std::map<std::string, const Example*> index_by_id(const std::vector<Example>& xs, const char* side) {
  std::map<std::string, const Example*> out;
  for (const auto& x : xs) {
    if (!out.emplace(x.id, &x).second) {
      throw DataError(std::string("duplicate example id in ") + side + ": " + x.id);
    }
  }
  return out;
}

}  // namespace

PRF micro_f1(const std::vector<Example>& pred, const std::vector<Example>& gold, MetricKind kind,
             MatchMode mode) {
  const auto p_idx = index_by_id(pred, "predictions");
  const auto g_idx = index_by_id(gold, "gold");
  std::vector<std::string> unmatched;
  for (const auto& [id, ex] : g_idx) {
    if (!p_idx.count(id)) unmatched.push_back(id);
  }
  for (const auto& [id, ex] : p_idx) {
    if (!g_idx.count(id)) unmatched.push_back(id);
  }
  if (!unmatched.empty()) {
    std::sort(unmatched.begin(), unmatched.end());
    std::string msg = "example ids do not match between predictions and gold (" +
                      std::to_string(unmatched.size()) + " unmatched):";
    for (std::size_t i = 0; i < unmatched.size() && i < 5; ++i) msg += " " + unmatched[i];
    throw DataError(msg);
  }

  std::size_t n_pred = 0;
  std::size_t n_gold = 0;
  std::size_t n_correct = 0;
  for (const auto& [id, g] : g_idx) {
    auto pk = match_keys(p_idx.at(id)->gold, kind);
    auto gk = match_keys(g->gold, kind);
    std::sort(pk.begin(), pk.end());
    std::sort(gk.begin(), gk.end());
    if (mode == MatchMode::Set) {
      pk.erase(std::unique(pk.begin(), pk.end()), pk.end());
      gk.erase(std::unique(gk.begin(), gk.end()), gk.end());
    }
    // Sorted-range intersection is a multiset intersection, which is the plain
    // set intersection once both sides are deduplicated.
    std::vector<std::string> common;
    std::set_intersection(pk.begin(), pk.end(), gk.begin(), gk.end(), std::back_inserter(common));
    n_pred += pk.size();
    n_gold += gk.size();
    n_correct += common.size();
  }
  return prf_from_counts(n_pred, n_gold, n_correct);
}

double iteration_average(const std::vector<double>& values) {
  if (values.empty()) throw DataError("average over zero iterations");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::string format_2dp(double value) {
  // The small nudge keeps binary representations of x.xx5 on the upper side.
  const double rounded = std::floor(value * 100.0 + 0.5 + 1e-7) / 100.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", rounded);
  return buf;
}

std::string render_report(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw DataError("report has no rows");
  const std::size_t n = rows.front().f1.size();
  if (n == 0) throw DataError("report rows have no iterations");
  for (const auto& r : rows) {
    if (r.f1.size() != n) {
      throw DataError("ragged report: row " + r.model + "/" + r.metric + " has " +
                      std::to_string(r.f1.size()) + " iterations, expected " + std::to_string(n));
    }
  }
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Model", "Metric"};
  for (std::size_t i = 1; i <= n; ++i) header.push_back("Iter " + std::to_string(i));
  header.push_back("AVE");
  cells.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line{r.model, r.metric};
    for (double f : r.f1) line.push_back(format_2dp(f * 100.0));
    line.push_back(format_2dp(iteration_average(r.f1) * 100.0));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  auto emit = [&](const std::vector<std::string>& line) {
    std::string s = "|";
    for (std::size_t c = 0; c < line.size(); ++c) {
      s += ' ' + line[c] + std::string(width[c] - line[c].size(), ' ') + " |";
    }
    return s + '\n';
  };
  std::string out = emit(cells.front());
  std::string rule = "|";
  for (std::size_t c = 0; c < width.size(); ++c) rule += std::string(width[c] + 2, '-') + '|';
  out += rule + '\n';
  for (std::size_t i = 1; i < cells.size(); ++i) out += emit(cells[i]);
  return out;
}

nlohmann::ordered_json eval_report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["model"] = report.model;
  j["metric"] = report.metric;
  auto iters = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < report.iterations.size(); ++k) {
    const PRF& p = report.iterations[k];
    nlohmann::ordered_json ji;
    ji["i"] = k < report.index.size() ? report.index[k] : static_cast<int>(k + 1);
    ji["p"] = p.precision;
    ji["r"] = p.recall;
    ji["f1"] = p.f1;
    ji["n_pred"] = p.n_pred;
    ji["n_gold"] = p.n_gold;
    ji["n_correct"] = p.n_correct;
    iters.push_back(std::move(ji));
  }
  j["iterations"] = std::move(iters);
  j["ave"] = report.ave;
  return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    r.model = j.value("model", std::string("model"));
    r.metric = j.at("metric").get<std::string>();
    for (const auto& ji : j.at("iterations")) {
      PRF p;
      p.precision = ji.at("p").get<double>();
      p.recall = ji.at("r").get<double>();
      p.f1 = ji.at("f1").get<double>();
      p.n_pred = ji.value("n_pred", std::size_t{0});
      p.n_gold = ji.value("n_gold", std::size_t{0});
      p.n_correct = ji.value("n_correct", std::size_t{0});
      r.index.push_back(ji.at("i").get<int>());
      r.iterations.push_back(p);
    }
    r.ave = j.value("ave", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed eval report: ") + e.what());
  }
  return r;
}

}  // namespace evokg

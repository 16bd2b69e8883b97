#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "evokg/corpus.hpp"

namespace evokg {

enum class MetricKind { Entity, RelStrict, EventTrigger, EventArgument };

std::string_view to_string(MetricKind kind);  // "entity", "rel_strict", ...
MetricKind parse_metric(std::string_view s);

/// Set: each distinct key counts once per example. Multiset: keys are matched
/// one to one, so repeated predictions need repeated gold.
enum class MatchMode { Set, Multiset };

/// Match keys of one example, one per annotation (duplicates kept):
///   entity          mention | type
///   rel_strict      head | head type | relation | tail | tail type
///   event_trigger   trigger | event type
///   event_argument  argument | role | event type
/// Mentions compare by exact surface string, names in canonical form.
std::vector<std::string> match_keys(const Annotations& annotations, MetricKind kind);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n_pred = 0;
  std::size_t n_gold = 0;
  std::size_t n_correct = 0;
};

PRF prf_from_counts(std::size_t n_pred, std::size_t n_gold, std::size_t n_correct);

/// Micro-pooled P/R/F1 over examples aligned by id. Throws DataError listing the
/// ids present on only one side (first five) or duplicated within a side.
PRF micro_f1(const std::vector<Example>& pred, const std::vector<Example>& gold, MetricKind kind,
             MatchMode mode = MatchMode::Set);

/// Arithmetic mean; throws DataError on an empty list.
double iteration_average(const std::vector<double>& values);

/// Two decimals, rounding half up.
std::string format_2dp(double value);

struct ReportRow {
  std::string model;
  std::string metric;
  std::vector<double> f1;  // per iteration, in [0, 1]
};

/// Markdown table "| Model | Metric | Iter 1 | ... | Iter N | AVE |" with F1 x 100.
/// Throws DataError when rows have different iteration counts.
std::string render_report(const std::vector<ReportRow>& rows);

struct EvalReport {
  std::string model;
  std::string metric;
  std::vector<int> index;   // iteration numbers
  std::vector<PRF> iterations;
  double ave = 0.0;
};

nlohmann::ordered_json eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

}  // namespace evokg

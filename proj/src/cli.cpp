#include "evokg/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

#include "CLI11.hpp"

#include "evokg/config.hpp"
#include "evokg/corpus.hpp"
#include "evokg/decode.hpp"
#include "evokg/error.hpp"
#include "evokg/evolve.hpp"
#include "evokg/lineal.hpp"
#include "evokg/llmclient.hpp"
#include "evokg/metrics.hpp"
#include "evokg/text.hpp"

namespace evokg {

namespace fs = std::filesystem;

namespace {

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw DataError("cannot create " + parent.string() + ": " + ec.message());
}

void refuse_overwrite(const std::string& path, bool force) {
  if (!force && fs::exists(path)) {
    throw UsageError("refusing to overwrite " + path + " (pass --force)");
  }
}

void write_output(const std::string& path, std::string_view contents, bool force) {
  refuse_overwrite(path, force);
  ensure_parent(path);
  write_file(path, contents);
}

std::vector<Example> by_id(std::vector<Example> xs) {
  std::stable_sort(xs.begin(), xs.end(), [](const Example& a, const Example& b) { return a.id < b.id; });
  return xs;
}

// ---- build -----------------------------------------------------------------

struct BuildArgs {
  std::string config;
  std::string raw_schema, train, dev, test, embeddings, corpus, lexicon, out;
  std::optional<std::string> strategy, aggregation;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations, n_init, n_iter, window;
  std::optional<double> alpha, threshold;
  bool force = false;
};

void add_build(CLI::App& app, BuildArgs& a) {
  auto* c = app.add_subcommand("build", "Build an evolving-schema benchmark");
  c->add_option("--config", a.config, "JSON run config");
  c->add_option("--raw-schema", a.raw_schema, "Raw taxonomy (overrides config)");
  c->add_option("--train", a.train, "Training split JSONL");
  c->add_option("--dev", a.dev, "Dev split JSONL");
  c->add_option("--test", a.test, "Test split JSONL");
  c->add_option("--embeddings", a.embeddings, "word2vec text embeddings");
  c->add_option("--corpus", a.corpus, "Plain-text corpus for co-occurrence counts");
  c->add_option("--lexicon", a.lexicon, "Candidate words for analogous renaming");
  c->add_option("--out", a.out, "Output directory");
  c->add_option("--strategy", a.strategy, "horizontal | vertical | hybrid | analogous");
  c->add_option("--seed", a.seed, "PRNG seed");
  c->add_option("--iterations", a.iterations, "Number of iterations N");
  c->add_option("--n-init", a.n_init, "Sub nodes in the first schema");
  c->add_option("--n-iter", a.n_iter, "Nodes added or renamed per iteration");
  c->add_option("--alpha", a.alpha, "Hybrid horizontal ratio");
  c->add_option("--window", a.window, "Co-occurrence window");
  c->add_option("--threshold", a.threshold, "Analogous NPMI threshold");
  c->add_option("--aggregation", a.aggregation, "max | mean");
  c->add_flag("--force", a.force, "Replace existing artifacts");
}

int do_build(const BuildArgs& a, std::ostream& err) {
  RunConfig cfg;
  if (!a.config.empty()) {
    if (!fs::exists(a.config)) throw DataError("config not found: " + a.config);
    cfg = load_run_config(a.config);
  }
  auto over = [](std::string& dst, const std::string& src) {
    if (!src.empty()) dst = src;
  };
  over(cfg.raw_schema, a.raw_schema);
  over(cfg.train, a.train);
  over(cfg.dev, a.dev);
  over(cfg.test, a.test);
  over(cfg.embeddings, a.embeddings);
  over(cfg.corpus, a.corpus);
  over(cfg.lexicon, a.lexicon);
  over(cfg.output_dir, a.out);
  auto& e = cfg.evolution;
  try {
    if (a.strategy) e.strategy = parse_strategy(*a.strategy);
    if (a.aggregation) e.aggregation = parse_aggregation(*a.aggregation);
  } catch (const DataError& ex) {
    throw UsageError(ex.what());
  }
  if (a.seed) e.seed = *a.seed;
  if (a.iterations) e.iterations = *a.iterations;
  if (a.n_init) e.n_init = *a.n_init;
  if (a.n_iter) e.n_iter = *a.n_iter;
  if (a.alpha) e.alpha = *a.alpha;
  if (a.window) e.window = *a.window;
  if (a.threshold) e.analogous_threshold = *a.threshold;
  validate_build_inputs(cfg);

  const fs::path out_dir(cfg.output_dir);
  if (fs::exists(out_dir)) {
    std::vector<fs::path> stale;
    for (const auto& entry : fs::directory_iterator(out_dir)) {
      const std::string name = entry.path().filename().string();
      if (name == "manifest.json" || name.rfind("iter_", 0) == 0) stale.push_back(entry.path());
    }
    if (!stale.empty()) {
      if (!a.force) throw UsageError("refusing to overwrite artifacts in " + out_dir.string() + " (pass --force)");
      std::sort(stale.begin(), stale.end());
      for (const auto& p : stale) fs::remove_all(p);
    }
  }

  const SchemaGraph raw = load_schema(cfg.raw_schema);
  SplitSet splits{load_jsonl(cfg.train), load_jsonl(cfg.dev), load_jsonl(cfg.test)};
  std::optional<EmbeddingStore> store;
  std::optional<CoocTable> cooc;
  BenchmarkInputs inputs;
  inputs.raw = &raw;
  inputs.splits = &splits;
  if (!cfg.embeddings.empty() && (e.strategy == Strategy::Horizontal || e.strategy == Strategy::Hybrid)) {
    store = EmbeddingStore::load(cfg.embeddings);
    inputs.embeddings = &*store;
  }
  if (!cfg.corpus.empty() && e.strategy == Strategy::Analogous) {
    cooc = CoocTable::build(load_corpus(cfg.corpus), static_cast<std::size_t>(e.window));
    inputs.cooc = &*cooc;
    if (!cfg.lexicon.empty()) inputs.lexicon = load_lexicon(cfg.lexicon);
  }

  std::vector<std::string> warnings;
  const auto artifacts = build_benchmark(inputs, e, &warnings);

  nlohmann::ordered_json extra;
  auto name_of = [](const std::string& p) { return p.empty() ? std::string() : fs::path(p).filename().string(); };
  extra["raw_schema"] = name_of(cfg.raw_schema);
  extra["train"] = name_of(cfg.train);
  extra["dev"] = name_of(cfg.dev);
  extra["test"] = name_of(cfg.test);
  if (inputs.embeddings) extra["embeddings"] = name_of(cfg.embeddings);
  if (inputs.cooc) extra["corpus"] = name_of(cfg.corpus);
  write_benchmark(cfg.output_dir, artifacts, build_manifest(artifacts, e, extra));

  std::set<std::string> seen;
  for (const auto& w : warnings) {
    if (seen.insert(w).second) err << "warning: " << w << '\n';
  }
  err << "built " << artifacts.size() << " iterations in " << cfg.output_dir << '\n';
  return kExitOk;
}

// ---- extract ---------------------------------------------------------------

struct ExtractArgs {
  std::string config, schema, input, out;
  std::optional<std::string> scorer;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_len;
  std::optional<int> threads;
  std::vector<std::string> favored;
  bool force = false;
};

void add_extract(CLI::App& app, ExtractArgs& a) {
  auto* c = app.add_subcommand("extract", "Decode a split under a schema with a toy scorer");
  c->add_option("--config", a.config, "JSON run config (decode settings)");
  c->add_option("--schema", a.schema, "Schema snapshot JSON")->required();
  c->add_option("--input", a.input, "Examples JSONL")->required();
  c->add_option("--out", a.out, "Prediction JSONL; a sibling .txt holds the linearized output")->required();
  c->add_option("--scorer", a.scorer, "oracle | uniform | random | adversarial");
  c->add_option("--seed", a.seed, "Seed for random and adversarial scorers");
  c->add_option("--max-len", a.max_len, "Maximum output length in tokens");
  c->add_option("--threads", a.threads, "Decoding threads");
  c->add_option("--favor", a.favored, "Words the adversarial scorer prefers");
  c->add_flag("--force", a.force, "Replace existing outputs");
}

int do_extract(const ExtractArgs& a, std::ostream& err) {
  DecodeSettings d;
  if (!a.config.empty()) d = load_run_config(a.config).decode;
  if (a.scorer) d.scorer = *a.scorer;
  if (a.seed) d.seed = *a.seed;
  if (a.max_len) d.max_len = *a.max_len;
  if (a.threads) d.threads = *a.threads;
  if (!a.favored.empty()) d.favored = a.favored;
  if (d.threads < 1) throw UsageError("--threads must be positive");
  if (d.max_len < 2) throw UsageError("--max-len must be at least 2");
  static const std::set<std::string> scorers{"oracle", "uniform", "random", "adversarial"};
  if (!scorers.count(d.scorer)) throw UsageError("unknown scorer: " + d.scorer);

  std::string txt_path = fs::path(a.out).replace_extension(".txt").string();
  if (txt_path == a.out) txt_path += ".txt";
  refuse_overwrite(a.out, a.force);
  refuse_overwrite(txt_path, a.force);

  const SchemaGraph schema = load_schema(a.schema);
  const auto examples = by_id(load_jsonl(a.input));
  const TypeTrie trie = build_trie(schema);
  const DecodeOptions options{d.max_len};

  std::vector<DecodeResult> results(examples.size());
  std::vector<std::string> failures(examples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    const UniformScorer uniform;
    const RandomScorer random(d.seed);
    const AdversarialScorer adversarial(d.favored, d.seed);
    for (std::size_t i = next++; i < examples.size(); i = next++) {
      const Example& ex = examples[i];
      try {
        if (d.scorer == "oracle") {
          const OracleScorer oracle(ex.gold, schema.task());
          results[i] = decode_greedy(ex.text, oracle, schema, trie, options);
        } else {
          const Scorer& s = d.scorer == "uniform" ? static_cast<const Scorer&>(uniform)
                            : d.scorer == "random" ? static_cast<const Scorer&>(random)
                                                   : static_cast<const Scorer&>(adversarial);
          results[i] = decode_greedy(ex.text, s, schema, trie, options);
        }
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(d.threads),
                                               std::max<std::size_t>(1, examples.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!failures[i].empty()) throw DataError("example " + examples[i].id + ": " + failures[i]);
  }

  std::vector<Example> preds;
  std::string lines;
  std::size_t truncated = 0;
  std::size_t diagnostics = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    preds.push_back({examples[i].id, examples[i].text, results[i].annotations});
    lines += to_line(results[i].sequence) + '\n';
    truncated += results[i].truncated ? 1 : 0;
    diagnostics += results[i].diagnostics.size();
  }
  write_output(a.out, to_jsonl(preds), true);
  write_output(txt_path, lines, true);
  err << "decoded " << preds.size() << " examples (" << truncated << " truncated, " << diagnostics
      << " diagnostics)\n";
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> gold, pred;
  std::string metric, model = "model", mode = "set", out_json, out_table;
  bool force = false;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* c = app.add_subcommand("eval", "Score predictions against gold, one pair per iteration");
  c->add_option("--gold", a.gold, "Gold JSONL (repeat per iteration)")->required();
  c->add_option("--pred", a.pred, "Prediction JSONL (repeat per iteration)")->required();
  c->add_option("--metric", a.metric, "entity | rel_strict | event_trigger | event_argument")->required();
  c->add_option("--model", a.model, "Model name for the report");
  c->add_option("--mode", a.mode, "set | multiset");
  c->add_option("--out-json", a.out_json, "Report JSON")->required();
  c->add_option("--out-table", a.out_table, "Rendered table");
  c->add_flag("--force", a.force, "Replace existing outputs");
}

int do_eval(const EvalArgs& a, std::ostream& err) {
  if (a.gold.size() != a.pred.size()) throw UsageError("--gold and --pred must be given in pairs");
  MetricKind kind;
  try {
    kind = parse_metric(a.metric);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  if (a.mode != "set" && a.mode != "multiset") throw UsageError("unknown --mode: " + a.mode);
  const MatchMode mode = a.mode == "set" ? MatchMode::Set : MatchMode::Multiset;
  refuse_overwrite(a.out_json, a.force);
  if (!a.out_table.empty()) refuse_overwrite(a.out_table, a.force);

  EvalReport report;
  report.model = a.model;
  report.metric = std::string(to_string(kind));
  std::vector<double> f1;
  LoadOptions lenient;
  lenient.allow_unknown_offsets = true;
  for (std::size_t i = 0; i < a.gold.size(); ++i) {
    const auto gold = load_jsonl(a.gold[i]);
    const auto pred = load_jsonl(a.pred[i], lenient);
    const PRF prf = micro_f1(pred, gold, kind, mode);
    report.index.push_back(static_cast<int>(i + 1));
    report.iterations.push_back(prf);
    f1.push_back(prf.f1);
  }
  report.ave = iteration_average(f1);
  write_output(a.out_json, eval_report_to_json(report).dump(2) + "\n", true);
  if (!a.out_table.empty()) {
    write_output(a.out_table, render_report({{report.model, report.metric, f1}}), true);
  }
  err << report.metric << " AVE " << format_2dp(report.ave * 100.0) << '\n';
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
  bool force = false;
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* c = app.add_subcommand("report", "Merge eval reports into one table");
  c->add_option("--in", a.inputs, "Eval report JSON (repeatable)")->required();
  c->add_option("--out", a.out, "Markdown table")->required();
  c->add_flag("--force", a.force, "Replace an existing table");
}

int do_report(const ReportArgs& a, std::ostream& err) {
  refuse_overwrite(a.out, a.force);
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::map<int, double>> rows;
  for (const auto& path : a.inputs) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": " + e.what());
    }
    const EvalReport r = eval_report_from_json(j);
    const auto key = std::make_pair(r.model, r.metric);
    if (!rows.count(key)) order.push_back(key);
    auto& cells = rows[key];
    for (std::size_t k = 0; k < r.iterations.size(); ++k) {
      if (!cells.emplace(r.index[k], r.iterations[k].f1).second) {
        throw DataError(path + ": iteration " + std::to_string(r.index[k]) + " of " + r.model + "/" +
                        r.metric + " already reported");
      }
    }
  }
  std::vector<ReportRow> table;
  for (const auto& key : order) {
    ReportRow row{key.first, key.second, {}};
    for (const auto& [i, f] : rows[key]) row.f1.push_back(f);
    table.push_back(std::move(row));
  }
  write_output(a.out, render_report(table), true);
  err << "report with " << table.size() << " rows written to " << a.out << '\n';
  return kExitOk;
}

// ---- prompt ----------------------------------------------------------------

struct PromptArgs {
  std::string schema, demos, input, out_dir, endpoint, config;
  int n_demos = 20;
  std::optional<std::size_t> limit;
  bool send = false;
  bool force = false;
};

void add_prompt(CLI::App& app, PromptArgs& a) {
  auto* c = app.add_subcommand("prompt", "Render in-context RE prompts and optionally send them");
  c->add_option("--schema", a.schema, "Schema snapshot JSON (RE)")->required();
  c->add_option("--demos", a.demos, "JSONL with demonstration examples")->required();
  c->add_option("--input", a.input, "JSONL with query examples")->required();
  c->add_option("--out-dir", a.out_dir, "Output directory")->required();
  c->add_option("--n-demos", a.n_demos, "Number of demonstrations");
  c->add_option("--limit", a.limit, "Only the first N queries (by id)");
  c->add_flag("--send", a.send, "Post prompts to the chat endpoint");
  c->add_option("--endpoint", a.endpoint, "Endpoint config JSON");
  c->add_option("--config", a.config, "Run config with an endpoint section");
  c->add_flag("--force", a.force, "Replace existing outputs");
}

std::string file_stem_for(const std::string& id) {
  std::string s;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    s += ok ? c : '_';
  }
  return s.empty() ? "_" : s;
}

int do_prompt(const PromptArgs& a, std::ostream& err, std::shared_ptr<HttpTransport> transport) {
  if (a.n_demos < 0) throw UsageError("--n-demos must be non-negative");
  const SchemaGraph schema = load_schema(a.schema);
  if (schema.task() != Task::RE) throw DataError("prompt templates exist for relation extraction only");
  const fs::path dir(a.out_dir);
  refuse_overwrite((dir / "prompts").string(), a.force);
  if (a.send) refuse_overwrite((dir / "parsed.jsonl").string(), a.force);

  const auto names = relation_names(schema);
  const std::set<std::string> allowed(names.begin(), names.end());
  PromptSpec base;
  base.schema = names;
  for (const auto& ex : by_id(load_jsonl(a.demos))) {
    if (base.demos.size() >= static_cast<std::size_t>(a.n_demos)) break;
    Demonstration demo{ex.text, {}};
    for (const auto& r : ex.gold.relations) {
      if (allowed.count(canonical_name(r.relation))) demo.relations.push_back(r);
    }
    if (!demo.relations.empty()) base.demos.push_back(std::move(demo));
  }
  if (base.demos.size() < static_cast<std::size_t>(a.n_demos)) {
    err << "warning: only " << base.demos.size() << " demonstrations available\n";
  }

  auto queries = by_id(load_jsonl(a.input));
  if (a.limit && queries.size() > *a.limit) queries.resize(*a.limit);
  if (fs::exists(dir / "prompts")) fs::remove_all(dir / "prompts");
  std::vector<std::string> prompts;
  for (const auto& q : queries) {
    PromptSpec spec = base;
    spec.query = q.text;
    prompts.push_back(build_icl_prompt(spec));
    write_output((dir / "prompts" / (file_stem_for(q.id) + ".txt")).string(), prompts.back(), true);
  }
  err << "wrote " << prompts.size() << " prompts\n";
  if (!a.send) return kExitOk;

  EndpointConfig endpoint;
  if (!a.config.empty()) {
    auto cfg = load_run_config(a.config);
    if (cfg.endpoint) endpoint = *cfg.endpoint;
  }
  if (!a.endpoint.empty()) {
    try {
      endpoint = endpoint_from_json(nlohmann::json::parse(read_file(a.endpoint)), endpoint);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(a.endpoint + ": " + e.what());
    }
  }
  const ChatClient client(endpoint, transport ? transport : make_http_transport());
  std::vector<std::string> errors;
  const auto responses = client.complete_all(prompts, &errors);

  std::vector<Example> parsed;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (!responses[i]) {
      ++failed;
      err << "error: " << queries[i].id << ": " << errors[i] << '\n';
      continue;
    }
    write_output((dir / "responses" / (file_stem_for(queries[i].id) + ".txt")).string(), *responses[i], true);
    auto result = parse_llm_response(*responses[i], schema, queries[i].text);
    for (const auto& d : result.diagnostics) err << queries[i].id << ": " << d << '\n';
    Example ex{queries[i].id, queries[i].text, {}};
    ex.gold.relations = std::move(result.relations);
    canonicalize(ex.gold);
    parsed.push_back(std::move(ex));
  }
  write_output((dir / "parsed.jsonl").string(), to_jsonl(parsed), true);
  if (failed) {
    err << failed << " of " << queries.size() << " requests failed\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::shared_ptr<HttpTransport> transport) {
  CLI::App app{"Evolving-schema knowledge graph construction toolkit", "evokg"};
  app.require_subcommand(1);
  BuildArgs build;
  ExtractArgs extract;
  EvalArgs eval;
  ReportArgs report;
  PromptArgs prompt;
  add_build(app, build);
  add_extract(app, extract);
  add_eval(app, eval);
  add_report(app, report);
  add_prompt(app, prompt);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("build")) return do_build(build, err);
    if (app.got_subcommand("extract")) return do_extract(extract, err);
    if (app.got_subcommand("eval")) return do_eval(eval, err);
    if (app.got_subcommand("report")) return do_report(report, err);
    if (app.got_subcommand("prompt")) return do_prompt(prompt, err, std::move(transport));
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace evokg

// qppwb: command-line front end of the query performance prediction workbench.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "qpp/anova_models.hpp"
#include "qpp/catalog.hpp"
#include "qpp/corpus.hpp"
#include "qpp/corpus_io.hpp"
#include "qpp/error.hpp"
#include "qpp/evaluation.hpp"
#include "qpp/experiment.hpp"
#include "qpp/experiment_config.hpp"
#include "qpp/predictors.hpp"
#include "qpp/quality.hpp"
#include "qpp/roster.hpp"
#include "qpp/topic_selection.hpp"
#include "qpp/trec_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitGrid = 2;

struct Globals {
  std::string config_path;
  unsigned threads = 0; // 0: take from config, else 1
  std::string log_level = "info";
  std::optional<qpp::ExperimentConfig> config;

  unsigned thread_count() const {
    if (threads > 0) return threads;
    return config ? config->threads : 1;
  }
};

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw qpp::InputError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

// Writes to `path`, or stdout for "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw qpp::InputError(fmt::format("cannot write '{}'", path));
  out << content;
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

// NAME=PATH pairs, or PATH alone (name = file stem).
std::vector<qpp::Run> load_runs(const std::vector<std::string>& specs) {
  std::vector<qpp::Run> runs;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      const fs::path p(spec);
      runs.push_back(qpp::parse_run(p, p.stem().string()));
    } else {
      runs.push_back(qpp::parse_run(fs::path(spec.substr(eq + 1)), spec.substr(0, eq)));
    }
  }
  return runs;
}

std::vector<qpp::Run> runs_from_catalog(const qpp::SystemCatalog& catalog, const std::string& collection) {
  std::vector<qpp::Run> runs;
  for (const auto* info : collection.empty() ? catalog.systems() : catalog.in_collection(collection)) {
    runs.push_back(qpp::parse_run(info->run_path, info->id));
  }
  return runs;
}

qpp::Gain parse_gain(const std::string& g) {
  if (g == "linear") return qpp::Gain::linear;
  if (g == "exponential") return qpp::Gain::exponential;
  throw qpp::InputError(fmt::format("unknown gain '{}'", g));
}

qpp::OmegaVariant parse_omega(const std::string& v) {
  if (v == "standard") return qpp::OmegaVariant::standard;
  if (v == "direct") return qpp::OmegaVariant::direct;
  throw qpp::InputError(fmt::format("unknown omega variant '{}'", v));
}

void setup_logging(const std::string& level) {
  auto logger = spdlog::stderr_color_mt("qppwb");
  spdlog::set_default_logger(logger);
  const auto lvl = spdlog::level::from_str(level);
  if (lvl == spdlog::level::off && level != "off") throw qpp::InputError(fmt::format("unknown log level '{}'", level));
  spdlog::set_level(lvl);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qppwb: query performance prediction workbench"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "experiment config (key = value or JSON)");
  app.add_option("--threads", g.threads, "worker threads");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off");

  // index
  auto* index = app.add_subcommand("index", "tokenize a corpus and store its statistics");
  std::string corpus_path, corpus_format = "jsonl", stats_out, stopword_file;
  bool stem = false, keep_stopwords = false;
  std::vector<std::string> vector_runs;
  index->add_option("--corpus", corpus_path, "corpus file")->required();
  index->add_option("--format", corpus_format, "jsonl or trec");
  index->add_option("--out", stats_out, "output statistics file")->required();
  index->add_flag("--stem", stem, "apply the Porter stemmer");
  index->add_flag("--keep-stopwords", keep_stopwords, "do not remove stopwords");
  index->add_option("--stopwords", stopword_file, "stopword list replacing the bundled one");
  index->add_option("--vectors-for", vector_runs, "keep term vectors only for documents retrieved in these runs");

  // predict
  auto* predict = app.add_subcommand("predict", "compute predictor scores for every (system, query)");
  std::string stats_path, topics_path, systems_path, roster_path, collection, pred_out;
  std::vector<std::string> run_specs;
  predict->add_option("--stats", stats_path, "corpus statistics file")->required();
  predict->add_option("--topics", topics_path, "topics TSV")->required();
  predict->add_option("--systems", systems_path, "system catalog TSV");
  predict->add_option("--collection", collection, "restrict the catalog to one collection");
  predict->add_option("--run", run_specs, "NAME=PATH run file (repeatable)");
  predict->add_option("--roster", roster_path, "predictor roster file (default roster otherwise)");
  predict->add_option("--out", pred_out, "predictions CSV (default stdout)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "nDCG@k for every (system, query)");
  std::string qrels_path, eval_out, gain = "linear";
  std::size_t cutoff = 10;
  evaluate->add_option("--qrels", qrels_path, "qrels file")->required();
  evaluate->add_option("--topics", topics_path, "topics TSV defining the query set")->required();
  evaluate->add_option("--systems", systems_path, "system catalog TSV");
  evaluate->add_option("--collection", collection, "restrict the catalog to one collection");
  evaluate->add_option("--run", run_specs, "NAME=PATH run file (repeatable)");
  evaluate->add_option("--cutoff", cutoff, "rank cutoff k");
  evaluate->add_option("--gain", gain, "linear or exponential");
  evaluate->add_option("--out", eval_out, "evaluation CSV (default stdout)");

  // correlate / sare
  std::string eval_path, pred_path, out_path;
  auto* correlate = app.add_subcommand("correlate", "Pearson, Spearman and Kendall per (predictor, system)");
  correlate->add_option("--eval", eval_path, "evaluation CSV")->required();
  correlate->add_option("--predictions", pred_path, "predictions CSV")->required();
  correlate->add_option("--out", out_path, "output CSV (default stdout)");
  auto* sare = app.add_subcommand("sare", "scaled absolute rank error per (predictor, system, query)");
  sare->add_option("--eval", eval_path, "evaluation CSV")->required();
  sare->add_option("--predictions", pred_path, "predictions CSV")->required();
  sare->add_option("--out", out_path, "output CSV (default stdout)");

  // anova
  auto* anova = app.add_subcommand("anova", "fit MD1 or MD2 to a sARE table");
  std::string sare_path, model = "md2", omega = "standard", text_out, ci_out, ci_factor;
  double ci_level = 0.95;
  anova->add_option("--sare", sare_path, "sARE CSV")->required();
  anova->add_option("--systems", systems_path, "system catalog TSV");
  anova->add_option("--model", model, "md1 or md2");
  anova->add_option("--omega", omega, "standard or direct");
  anova->add_option("--out", out_path, "ANOVA CSV (default stdout)");
  anova->add_option("--text", text_out, "aligned text table");
  anova->add_option("--ci-factor", ci_factor, "factor(s) for marginal-mean intervals, e.g. run_type or run_type:collection");
  anova->add_option("--ci-out", ci_out, "marginal-mean interval CSV");
  anova->add_option("--ci-level", ci_level, "confidence level");

  // select-topics
  auto* select = app.add_subcommand("select-topics", "topics with the largest TIR/NIR gap");
  double fraction = 0.25;
  std::string summary_out;
  select->add_option("--eval", eval_path, "evaluation CSV")->required();
  select->add_option("--systems", systems_path, "system catalog TSV");
  select->add_option("--fraction", fraction, "fraction of topics to keep");
  select->add_option("--out", out_path, "per-topic CSV (default stdout)");
  select->add_option("--summary", summary_out, "summary CSV");

  // report
  auto* report = app.add_subcommand("report", "run the full pipeline from --config and write the bundle");
  std::string report_dir;
  report->add_option("--output", report_dir, "bundle directory (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInput;
  }

  try {
    setup_logging(g.log_level);
    if (!g.config_path.empty()) g.config = qpp::ExperimentConfig::load(g.config_path);
    if (g.config) {
      if (systems_path.empty()) systems_path = g.config->systems.string();
      if (!evaluate->count("--cutoff")) cutoff = g.config->cutoff;
      if (!evaluate->count("--gain")) gain = g.config->gain == qpp::Gain::linear ? "linear" : "exponential";
      if (!anova->count("--omega")) omega = g.config->omega == qpp::OmegaVariant::standard ? "standard" : "direct";
      if (!anova->count("--ci-level")) ci_level = g.config->ci_level;
      if (!select->count("--fraction")) fraction = g.config->topic_fraction;
    }
    const auto catalog = [&]() {
      if (systems_path.empty()) throw qpp::InputError("--systems is required");
      return qpp::SystemCatalog::load(systems_path);
    };
    const auto runs = [&]() {
      if (!run_specs.empty()) return load_runs(run_specs);
      return runs_from_catalog(catalog(), collection);
    };

    if (*index) {
      qpp::BuildOptions options;
      options.tokenization.remove_stopwords = !keep_stopwords;
      options.tokenization.stem = stem;
      if (!stopword_file.empty()) options.tokenization.stopwords = qpp::load_stopwords(stopword_file);
      options.threads = g.thread_count();
      if (!vector_runs.empty()) {
        auto allow = std::make_shared<qpp::CorpusStatsBuilder::Allowlist>();
        for (const auto& run : load_runs(vector_runs)) {
          for (const auto& [qid, list] : run.lists) {
            for (const auto& e : list.entries) allow->insert(e.doc_id);
          }
        }
        options.vector_allowlist = std::move(allow);
      }
      auto in = open_in(corpus_path);
      const auto stats = qpp::index_corpus(in, qpp::parse_corpus_format(corpus_format), options);
      stats.save(stats_out);
      spdlog::info("indexed {} documents, {} terms", stats.num_docs(), stats.vocabulary_size());
    } else if (*predict) {
      const auto stats = qpp::CorpusStats::load(stats_path);
      const auto topics = qpp::parse_topics(topics_path, stats.tokenization());
      const auto roster = roster_path.empty() ? qpp::default_roster() : qpp::load_roster(roster_path);
      const auto rs = runs();
      qpp::PredictionTable table;
      std::vector<std::string> missing;
      for (const auto& spec : roster) {
        auto r = qpp::run_predictor(spec, topics, rs, stats, g.thread_count());
        table.merge(r.table);
        missing.insert(missing.end(), r.missing.begin(), r.missing.end());
      }
      if (!missing.empty()) throw qpp::IncompleteGridError(std::move(missing));
      emit(pred_out, render([&](std::ostream& o) { table.write_csv(o); }));
    } else if (*evaluate) {
      const auto qrels = qpp::parse_qrels(fs::path(qrels_path));
      auto in = open_in(topics_path);
      const auto texts = qpp::parse_topic_texts(in, topics_path);
      std::vector<std::string> qids;
      for (const auto& [id, text] : texts) qids.push_back(id);
      const auto rs = runs();
      const auto table = qpp::evaluate_runs(rs, qrels, qids, cutoff, parse_gain(gain));
      emit(eval_out, render([&](std::ostream& o) { table.write_csv(o); }));
    } else if (*correlate || *sare) {
      auto ein = open_in(eval_path);
      const auto eval = qpp::EvalTable::read_csv(ein, eval_path);
      auto pin = open_in(pred_path);
      const auto pred = qpp::PredictionTable::read_csv(pin, pred_path);
      if (*correlate) {
        const auto cells = qpp::correlation_matrix(eval, pred);
        emit(out_path, render([&](std::ostream& o) { qpp::write_correlations_csv(o, cells); }));
      } else {
        const auto table = qpp::sare_table(eval, pred);
        emit(out_path, render([&](std::ostream& o) { table.write_csv(o); }));
      }
    } else if (*anova) {
      auto in = open_in(sare_path);
      const auto table = qpp::SareTable::read_csv(in, sare_path);
      const auto cat = catalog();
      qpp::ModelFit fit = model == "md1"   ? qpp::fit_md1(table, cat, parse_omega(omega))
                          : model == "md2" ? qpp::fit_md2(table, cat, parse_omega(omega))
                                           : throw qpp::InputError(fmt::format("unknown model '{}'", model));
      const std::string csv = render([&](std::ostream& o) { fit.table.write_csv(o); });
      std::string ci;
      if (!ci_factor.empty()) {
        std::vector<std::string> factors;
        std::stringstream ss(ci_factor);
        for (std::string f; std::getline(ss, f, ':');) factors.push_back(f);
        ci = qpp::ci_bars_csv(qpp::marginal_means_ci(fit.data, fit.table, factors, ci_level));
      }
      emit(out_path, csv);
      if (!text_out.empty()) emit(text_out, fit.table.to_text());
      if (!ci.empty()) emit(ci_out.empty() ? "-" : ci_out, ci);
    } else if (*select) {
      auto in = open_in(eval_path);
      const auto eval = qpp::EvalTable::read_csv(in, eval_path);
      const auto sel = qpp::select_semantic_topics(eval, catalog(), fraction);
      emit(out_path, render([&](std::ostream& o) { sel.write_csv(o); }));
      if (!summary_out.empty()) emit(summary_out, render([&](std::ostream& o) { sel.write_summary_csv(o); }));
      spdlog::info("selected {} topics: {} favour TIR, {} favour NIR, {} tied", sel.selected.size(), sel.tir_better,
                   sel.nir_better, sel.ties);
    } else if (*report) {
      if (!g.config) throw qpp::InputError("report needs --config");
      auto cfg = *g.config;
      if (g.threads > 0) cfg.threads = g.threads;
      if (!report_dir.empty()) cfg.output = report_dir;
      if (cfg.output.empty()) throw qpp::InputError("no output directory (config 'output' or --output)");
      const auto result = qpp::run_experiment(cfg);
      qpp::write_bundle(result.files, cfg.output);
      spdlog::info("wrote {} files to {}", result.files.size(), cfg.output.string());
    }
  } catch (const qpp::IncompleteGridError& e) {
    spdlog::error("{}", e.what());
    return kExitGrid;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  }
  return 0;
}

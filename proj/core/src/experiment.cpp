#include "qpp/experiment.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qpp/catalog.hpp"
#include "qpp/checksum.hpp"
#include "qpp/corpus.hpp"
#include "qpp/csv.hpp"
#include "qpp/error.hpp"
#include "qpp/predictors.hpp"
#include "qpp/roster.hpp"
#include "qpp/trec_io.hpp"

namespace qpp {

namespace {

template <class Fn>
std::string to_csv(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

struct Manifest {
  std::vector<std::pair<std::string, std::string>> inputs;

  void add(std::string role, const std::filesystem::path& path) { inputs.emplace_back(std::move(role), sha256_file(path)); }
};

std::vector<std::string> missing_cells(const PredictionRun& run_missing, const EvalTable& eval,
                                       const PredictionTable& pred) {
  std::vector<std::string> out = run_missing.missing;
  std::set<std::string> known;
  for (const auto& m : out) known.insert(m.substr(0, m.find(": ")));
  for (auto& m : grid_mismatches(eval, pred)) {
    if (!known.contains(m.substr(0, m.find(": ")))) out.push_back(std::move(m));
  }
  return out;
}

std::vector<MarginalMean> means_for(const ModelFit& fit, std::vector<std::string> factors, double level) {
  return marginal_means_ci(fit.data, fit.table, factors, level);
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  Manifest manifest;
  const SystemCatalog catalog = SystemCatalog::load(config.systems);
  manifest.add("systems", config.systems);

  std::vector<PredictorSpec> roster;
  if (config.predictors) {
    roster = load_roster(*config.predictors);
    manifest.add("predictors", *config.predictors);
  } else {
    roster = default_roster();
  }
  PredictionTable extra;
  for (std::size_t i = 0; i < config.extra_predictions.size(); ++i) {
    const auto& path = config.extra_predictions[i];
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open prediction file '{}'", path.string()));
    extra.merge(PredictionTable::read_csv(in, path.string()));
    manifest.add(fmt::format("extra_predictions.{}", i), path);
  }
  for (const auto& system : extra.systems()) {
    if (!catalog.find(system)) throw InputError(fmt::format("extra predictions name unknown system '{}'", system));
  }

  ExperimentResult result;
  result.ci_level = config.ci_level;
  std::vector<std::string> missing;
  PredictionTable all_predictions;
  EvalTable all_eval("ndcg", config.cutoff);

  for (const auto& coll : config.collections) {
    spdlog::info("collection {}: loading inputs", coll.name);
    const CorpusStats stats = CorpusStats::load(coll.stats);
    manifest.add(fmt::format("stats.{}", coll.name), coll.stats);
    const TopicSet topics = parse_topics(coll.topics, stats.tokenization());
    manifest.add(fmt::format("topics.{}", coll.name), coll.topics);
    const Qrels qrels = parse_qrels(coll.qrels);
    manifest.add(fmt::format("qrels.{}", coll.name), coll.qrels);

    std::vector<Run> runs;
    for (const SystemInfo* info : catalog.in_collection(coll.name)) {
      runs.push_back(parse_run(info->run_path, info->id));
      manifest.add(fmt::format("run.{}", info->id), info->run_path);
    }
    if (runs.empty()) throw InputError(fmt::format("no systems in the catalog for collection '{}'", coll.name));

    CollectionResult cr;
    cr.name = coll.name;
    PredictionRun combined;
    for (const auto& spec : roster) {
      spdlog::info("collection {}: predictor {}", coll.name, spec.name);
      auto pr = run_predictor(spec, topics, runs, stats, config.threads);
      combined.table.merge(pr.table);
      combined.missing.insert(combined.missing.end(), pr.missing.begin(), pr.missing.end());
    }
    for (const auto& [key, score] : extra.records()) {
      if (catalog.at(key.system).collection == coll.name && topics.contains(key.query_id)) {
        combined.table.insert(key.predictor, key.system, key.query_id, score);
      }
    }
    cr.predictions = std::move(combined.table);

    const auto qids = topics.ids();
    cr.eval = evaluate_runs(runs, qrels, qids, config.cutoff, config.gain);

    auto holes = missing_cells(combined, cr.eval, cr.predictions);
    for (auto& h : holes) missing.push_back(fmt::format("{}: {}", coll.name, std::move(h)));
    result.collections.push_back(std::move(cr));
  }
  if (!missing.empty()) throw IncompleteGridError(std::move(missing));

  SareTable all_sare;
  for (auto& cr : result.collections) {
    spdlog::info("collection {}: correlations and sARE", cr.name);
    cr.correlations = correlation_matrix(cr.eval, cr.predictions);
    cr.sare = sare_table(cr.eval, cr.predictions);
    for (const auto& [key, v] : cr.sare.records()) all_sare.insert(key.predictor, key.system, key.query_id, v);
    for (const auto& [key, v] : cr.predictions.records()) all_predictions.insert(key.predictor, key.system, key.query_id, v);
    for (const auto& [cell, v] : cr.eval.cells()) all_eval.set(cell.first, cell.second, v);
    for (const auto& q : cr.eval.flagged_queries()) all_eval.flag_no_relevant(q);

    SystemCatalog local;
    for (const SystemInfo* info : catalog.in_collection(cr.name)) local.add(*info);
    if (config.md2) {
      spdlog::info("collection {}: MD2", cr.name);
      cr.md2 = fit_md2(cr.sare, local, config.omega);
    }
    cr.topics = select_semantic_topics(cr.eval, local, config.topic_fraction);
  }
  if (config.md1) {
    spdlog::info("fitting MD1");
    result.md1 = fit_md1(all_sare, catalog, config.omega);
  }

  Bundle& files = result.files;
  files["predictions.csv"] = to_csv([&](std::ostream& o) { all_predictions.write_csv(o); });
  files["eval.csv"] = to_csv([&](std::ostream& o) { all_eval.write_csv(o); });
  files["sare.csv"] = to_csv([&](std::ostream& o) { all_sare.write_csv(o); });
  {
    std::vector<CorrelationCell> cells;
    for (const auto& cr : result.collections) cells.insert(cells.end(), cr.correlations.begin(), cr.correlations.end());
    files["correlations.csv"] = to_csv([&](std::ostream& o) { write_correlations_csv(o, cells); });
  }
  {
    std::string flagged = "collection,query_id\n";
    for (const auto& cr : result.collections) {
      for (const auto& q : cr.eval.flagged_queries()) flagged += csv::join({cr.name, q}) + '\n';
    }
    files["flagged_queries.csv"] = flagged;
  }
  for (const auto& cr : result.collections) {
    if (cr.md2) {
      files[fmt::format("anova_md2_{}.csv", cr.name)] = to_csv([&](std::ostream& o) { cr.md2->table.write_csv(o); });
      files[fmt::format("anova_md2_{}.txt", cr.name)] = cr.md2->table.to_text();
    }
    if (cr.topics) {
      files[fmt::format("topic_selection_{}.csv", cr.name)] = to_csv([&](std::ostream& o) { cr.topics->write_csv(o); });
      files[fmt::format("topic_selection_{}_summary.csv", cr.name)] =
          to_csv([&](std::ostream& o) { cr.topics->write_summary_csv(o); });
    }
  }
  if (result.md1) {
    files["anova_md1.csv"] = to_csv([&](std::ostream& o) { result.md1->table.write_csv(o); });
    files["anova_md1.txt"] = result.md1->table.to_text();
  }
  for (auto kind : {PlotKind::heatmap, PlotKind::ci_bars}) {
    for (auto& [name, content] : emit_plot_data(result, kind)) files[name] = std::move(content);
  }

  std::string text = "# qppwb experiment manifest\n[config]\n" + config.canonical() + "[inputs]\n";
  for (const auto& [role, sum] : manifest.inputs) text += fmt::format("{} = {}\n", role, sum);
  text += "[outputs]\n";
  for (const auto& [name, content] : files) text += fmt::format("{} = {}\n", name, sha256_hex(content));
  files["manifest.txt"] = std::move(text);
  return result;
}

Bundle emit_plot_data(const ExperimentResult& result, PlotKind kind) {
  Bundle out;
  if (kind == PlotKind::heatmap) {
    for (const auto& cr : result.collections) out[fmt::format("plot_heatmap_{}.csv", cr.name)] = heatmap_csv(cr.correlations);
    return out;
  }
  for (const auto& cr : result.collections) {
    if (!cr.md2) continue;
    for (const char* factor : {"predictor", "run_type"}) {
      out[fmt::format("plot_ci_md2_{}_{}.csv", cr.name, factor)] =
          ci_bars_csv(means_for(*cr.md2, {factor}, result.ci_level));
    }
  }
  if (result.md1) {
    out["plot_ci_md1_run_type_collection.csv"] = ci_bars_csv(means_for(*result.md1, {"run_type", "collection"}, result.ci_level));
    out["plot_ci_md1_predictor.csv"] = ci_bars_csv(means_for(*result.md1, {"predictor"}, result.ci_level));
  }
  return out;
}

void write_bundle(const Bundle& bundle, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  for (const auto& [name, content] : bundle) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out) throw InputError(fmt::format("write failed for '{}'", path.string()));
  }
}

} // namespace qpp

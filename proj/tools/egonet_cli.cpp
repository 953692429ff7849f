// egonet: command-line front end for the ego-network pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "egonet/pipeline.hpp"

namespace pl = egonet::pipeline;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kDependency = 3 };

struct Flags {
  std::string config, manifest, out, step, expr, truth, labels, groups, spec, keywords;
  std::vector<std::string> providers;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<int> rings, max_ring;
  std::optional<std::size_t> egos;
};

pl::Config effective_config(const Flags& f) {
  pl::Config cfg;
  if (!f.config.empty()) cfg = pl::load_config(f.config);
  if (!f.manifest.empty()) cfg.manifest = f.manifest;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (!f.step.empty()) cfg.step = f.step;
  if (f.rings) cfg.dynamics.n_rings = *f.rings;
  if (!f.expr.empty()) cfg.expr = f.expr;
  if (!f.providers.empty()) cfg.providers.assign(f.providers.begin(), f.providers.end());
  if (!f.truth.empty()) cfg.truth = f.truth;
  if (!f.keywords.empty()) cfg.keywords = f.keywords;
  if (!f.labels.empty()) cfg.labels = f.labels;
  if (f.max_ring) cfg.assortativity.max_ring = *f.max_ring;
  if (!f.groups.empty()) cfg.groups = f.groups;
  if (!f.spec.empty()) cfg.synth_spec = f.spec;
  if (f.egos) cfg.synth_egos = *f.egos;
  pl::parse_step(cfg.step);
  if (cfg.dynamics.n_rings < 1) throw pl::UsageError("--rings must be >= 1");
  if (cfg.jobs < 1) throw pl::UsageError("--jobs must be >= 1");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ego-network reconstruction and analysis pipeline"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--manifest", f.manifest, "dataset manifest (JSON)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--jobs", f.jobs, "worker threads");
  app.add_option("--step", f.step, "dynamics window step: 1m or 12m");
  app.add_option("--rings", f.rings, "number of rings for dynamics");
  app.add_option("--expr", f.expr, "label combinator, e.g. \"g|k\"");
  app.add_option("--providers", f.providers, "attribute provider CSVs")->delimiter(',');
  app.add_option("--truth", f.truth, "ground-truth labels CSV (user_id,is_journalist)");
  app.add_option("--keywords", f.keywords, "keyword list, one term per line");
  app.add_option("--labels", f.labels, "alter labels CSV for assortativity");
  app.add_option("--max-ring", f.max_ring, "outermost ring for assortativity");
  app.add_option("--groups", f.groups, "user groups CSV (user_id,group)");
  app.add_option("--spec", f.spec, "synthetic ego spec (JSON)");
  app.add_option("--egos", f.egos, "number of synthetic egos");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"ingest", "parse and validate timelines"},
      {"filter", "activity filters and stationarity"},
      {"label", "journalist labelling"},
      {"extract", "static circles per ego"},
      {"dynamics", "ring turnover over sliding windows"},
      {"hashtags", "hashtag-activated relationships"},
      {"assortativity", "popularity correlation per ring"},
      {"profiles", "tweet-type profile clustering"},
      {"synth", "generate a synthetic dataset"},
      {"report", "render SVG plots from existing tables"},
      {"all", "run every enabled stage in order"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const auto cfg = effective_config(f);
    nlohmann::json result;
    if (cmd == "ingest") result = pl::run_ingest(cfg);
    else if (cmd == "filter") result = pl::run_filter(cfg);
    else if (cmd == "label") result = pl::run_label(cfg);
    else if (cmd == "extract") result = pl::run_extract(cfg);
    else if (cmd == "dynamics") result = pl::run_dynamics(cfg);
    else if (cmd == "hashtags") result = pl::run_hashtags(cfg);
    else if (cmd == "assortativity") result = pl::run_assortativity(cfg);
    else if (cmd == "profiles") result = pl::run_profiles(cfg);
    else if (cmd == "synth") result = pl::run_synth(cfg);
    else if (cmd == "report") result = pl::run_report(cfg);
    else result = pl::run_all(cfg);
    std::cout << result.dump(2) << '\n';
  } catch (const pl::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const pl::DependencyError& e) {
    std::cerr << "dependency error: " << e.what() << '\n';
    return kDependency;
  } catch (const egonet::CombinatorError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}

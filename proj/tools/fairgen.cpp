// fairgen command-line front end.
//
// Exit codes: 0 success, 2 configuration or invalid input, 3 quota
// unreachable, 4 I/O or protocol failure, 1 anything unexpected.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>

#include <fairgen/classifier.hpp>
#include <fairgen/config.hpp>
#include <fairgen/errors.hpp>
#include <fairgen/labeling.hpp>
#include <fairgen/manifest.hpp>
#include <fairgen/pipeline.hpp>
#include <fairgen/record.hpp>
#include <fairgen/report.hpp>
#include <fairgen/review_service.hpp>
#include <fairgen/serialization.hpp>

namespace fs = std::filesystem;
using namespace fairgen;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUnexpected = 1, kConfig = 2, kQuota = 3, kIo = 4 };

// Independent random streams per command, all derived from the config seed.
enum Stream : std::uint64_t { kTrainingStream = 1, kSurveyStream = 2, kGenerateStream = 3, kHeadStream = 4 };

constexpr const char* kProbesFile = "probes.json";

RunConfig load_config(const fs::path& path) {
  try {
    return load_run_config(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

// Artifacts the CLI wrote earlier; a file that does not decode is an I/O problem.
json load_artifact(const fs::path& path) {
  try {
    return read_json_file(path);
  } catch (const ConfigError& e) {
    throw IoError(e.what());
  }
}

template <class Decode>
auto decode_artifact(const fs::path& path, Decode decode) {
  const auto j = load_artifact(path);
  try {
    return decode(j);
  } catch (const ConfigError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::vector<LinearModel> load_group_models(const fs::path& path, const GroupSet& groups, Space space) {
  auto [stored, models] = decode_artifact(path, group_classifier_from_json);
  if (stored != groups)
    throw ConfigError(path.string() + " was trained for groups that differ from the configured ones");
  for (const auto& m : models)
    if (m.space != space)
      throw ConfigError(path.string() + " holds " + std::string(to_string(m.space)) + "-space models, need " +
                        std::string(to_string(space)));
  return models;
}

const OracleGenerator& require_oracle(const Generator& generator, const char* command) {
  const auto* oracle = dynamic_cast<const OracleGenerator*>(&generator);
  if (!oracle)
    throw ConfigError(std::string(command) + " needs labelled samples, which only the oracle generator provides");
  return *oracle;
}

ManifestHeader header_for(const RunConfig& config, const Generator& generator, std::size_t feature_dim) {
  ManifestHeader h;
  h.latent_dim = generator.latent_dim();
  h.feature_dim = feature_dim;
  h.groups = config.groups();
  h.root_seed = config.seed;
  h.created_at = utc_timestamp_now();
  h.rng_algorithm = std::string(RngHandle::kAlgorithm);
  h.workers = config.plan.workers;
  h.generator = generator.descriptor();
  h.config = to_json(config);
  return h;
}

std::size_t feature_dim_of(const Generator& generator, const std::vector<DatasetRecord>& records) {
  if (generator.feature_dim() != 0) return generator.feature_dim();
  return records.empty() ? 0 : records.front().feature.size();
}

// "Q=100,groups=Asian+Black,max_attempts=2000,mode=unit_scaled,alpha=2,verify=false"
BalancePlan apply_plan(BalancePlan plan, const std::string& text, const GroupSet& groups) {
  std::stringstream items(text);
  for (std::string item; std::getline(items, item, ',');) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--plan entries are key=value, got \"" + item + "\"");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    auto number = [&]() -> std::size_t {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || value.empty() || value[0] == '-')
        throw ConfigError("--plan " + key + " needs a non-negative integer");
      return static_cast<std::size_t>(v);
    };
    if (key == "Q" || key == "quota") {
      plan.quota_per_group = number();
    } else if (key == "max_attempts") {
      plan.max_attempts_per_group = number();
    } else if (key == "groups") {
      plan.groups.clear();
      std::stringstream names(value);
      for (std::string name; std::getline(names, name, '+');) {
        try {
          plan.groups.push_back(groups.index_of(name));
        } catch (const NotFoundError&) {
          throw ConfigError("--plan groups: unknown group \"" + name + "\"");
        }
      }
    } else if (key == "mode") {
      plan.steer_policy.mode = steer_mode_from_string(value);
    } else if (key == "alpha") {
      try {
        plan.steer_policy.alpha = std::stod(value);
      } catch (const std::exception&) {
        throw ConfigError("--plan alpha needs a number");
      }
    } else if (key == "verify") {
      if (value != "true" && value != "false") throw ConfigError("--plan verify is true or false");
      plan.verify = value == "true";
    } else {
      throw ConfigError("--plan: unknown key \"" + key + "\"");
    }
  }
  plan.validate();
  return plan;
}

void print_report(const DistributionReport& report) {
  std::cout << render_report(report, ReportFormat::text);
}

// ---- subcommands ---------------------------------------------------------

int train_classifier(const fs::path& config_path, const fs::path& out) {
  const auto config = load_config(config_path);
  const auto generator = make_generator(config);
  const auto& oracle = require_oracle(*generator, "train-classifier").oracle();
  RngHandle rng = RngHandle(config.seed).split(kTrainingStream);
  LabeledData data;
  for (std::size_t i = 0; i < config.training_samples; ++i) {
    const auto z = sample_latent(rng, oracle.config().latent_dim);
    data.add(oracle.generate(z).values(), oracle.observed_group(z));
  }
  const auto models = train_ovr(data, config.groups(), Space::feature, config.feature_training);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_json_file(out, group_classifier_to_json(config.groups(), models));
  std::cerr << "trained " << models.size() << " feature-space models on " << data.size() << " samples -> " << out
            << "\n";
  return kOk;
}

int probe_latent(const fs::path& config_path, const fs::path& manifest_path, const fs::path& out_dir) {
  const auto config = load_config(config_path);
  const auto manifest = read_manifest(manifest_path);
  if (manifest.header.groups != config.groups())
    throw ConfigError("manifest groups differ from the configured groups");
  LabeledData data;
  for (const auto& r : manifest.records)
    if (!r.rejected) data.add(r.latent.values(), r.group.index);
  if (data.empty()) throw ConfigError("manifest " + manifest_path.string() + " has no records to train probes on");
  const auto probes = train_ovr(data, config.groups(), Space::latent, config.probe_training);
  fs::create_directories(out_dir);
  write_json_file(out_dir / kProbesFile, group_classifier_to_json(config.groups(), probes));
  std::cerr << "trained " << probes.size() << " latent probes on " << data.size() << " triples -> "
            << out_dir / kProbesFile << "\n";
  return kOk;
}

int survey(const fs::path& config_path, std::optional<std::size_t> n, const fs::path& report_path,
           const fs::path& classifier_path, const std::optional<fs::path>& manifest_path) {
  const auto config = load_config(config_path);
  const auto generator = make_generator(config);
  const auto groups = config.groups();
  const auto models = load_group_models(classifier_path, groups, Space::feature);
  SurveyOptions options = config.survey;
  if (n) options.samples = *n;
  if (options.samples == 0) throw ConfigError("-n must be positive");
  options.keep_records = manifest_path.has_value();
  RngHandle rng = RngHandle(config.seed).split(kSurveyStream);
  RecordIdGenerator ids(config.seed ^ kSurveyStream);
  auto result = survey_unguided(options, *generator, models, groups, rng, &ids);
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
  write_json_file(report_path, to_json(result.report));
  if (manifest_path) {
    Manifest m;
    m.header = header_for(config, *generator, feature_dim_of(*generator, result.records));
    m.records = std::move(result.records);
    write_manifest(*manifest_path, m);
  }
  print_report(result.report);
  return kOk;
}

int generate(const fs::path& config_path, const std::string& plan_text, const fs::path& manifest_path,
             const fs::path& classifier_path, const fs::path& probes_dir, std::optional<std::size_t> workers,
             bool keep_rejects) {
  auto config = load_config(config_path);
  const auto groups = config.groups();
  config.plan = apply_plan(config.plan, plan_text, groups);
  if (workers) config.plan.workers = *workers;
  if (keep_rejects) config.plan.keep_rejects = true;
  config.validate();
  const auto generator = make_generator(config);
  const auto feature_models = load_group_models(classifier_path, groups, Space::feature);
  const auto probes = load_group_models(probes_dir / kProbesFile, groups, Space::latent);
  RngHandle rng = RngHandle(config.seed).split(kGenerateStream);
  RecordIdGenerator ids(config.seed ^ kGenerateStream);
  auto result = generate_balanced(config.plan, *generator, probes, feature_models, groups, rng, &ids);
  Manifest m;
  m.header = header_for(config, *generator, feature_dim_of(*generator, result.records));
  m.records = std::move(result.records);
  m.summary = result.report;
  write_manifest(manifest_path, m);
  print_report(result.report);
  return kOk;
}

int train_heads(const fs::path& config_path, const fs::path& out_dir) {
  const auto config = load_config(config_path);
  const auto generator = make_generator(config);
  const auto& oracle = require_oracle(*generator, "train-heads").oracle();
  const auto& schemas = config.labeling.attributes;
  if (schemas.size() > oracle.attribute_count())
    throw ConfigError(std::to_string(schemas.size()) + " attributes configured but the oracle exposes " +
                      std::to_string(oracle.attribute_count()) + " (feature_dim - group_count)");
  RngHandle rng = RngHandle(config.seed).split(kHeadStream);
  std::vector<LatentVector> latents;
  std::vector<FeatureVector> features;
  for (std::size_t i = 0; i < config.training_samples; ++i) {
    latents.push_back(sample_latent(rng, oracle.config().latent_dim));
    features.push_back(oracle.generate(latents.back()));
  }
  fs::create_directories(out_dir);
  for (std::size_t a = 0; a < schemas.size(); ++a) {
    LabeledData data;
    for (std::size_t i = 0; i < latents.size(); ++i) data.add(features[i].values(), oracle.attribute_truth(a, latents[i]));
    auto cfg = config.head_training;
    cfg.seed += a;
    const auto head = train_attribute_head(schemas[a].name, schemas[a].values, data, cfg);
    write_json_file(out_dir / (schemas[a].name + ".json"), to_json(head));
    std::cerr << "trained head '" << schemas[a].name << "' -> " << out_dir / (schemas[a].name + ".json") << "\n";
  }
  return kOk;
}

std::vector<AttributeHead> load_heads(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("heads directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<AttributeHead> heads;
  for (const auto& f : files) heads.push_back(decode_artifact(f, attribute_head_from_json));
  if (heads.empty()) throw IoError("no attribute heads (*.json) in " + dir.string());
  return heads;
}

int label(const fs::path& config_path, const fs::path& manifest_path, const fs::path& heads_dir) {
  const auto config = load_config(config_path);
  const auto heads = load_heads(heads_dir);
  auto manifest = read_manifest(manifest_path);
  label_records(manifest.records, heads);
  for (const auto& h : heads) manifest.header.attributes[h.attribute_name] = h.value_names;
  write_manifest(manifest_path, manifest);
  const auto pending = build_review_queue(manifest.records, config.labeling.threshold).size();
  std::cerr << "labelled " << manifest.records.size() << " records with " << heads.size() << " heads; " << pending
            << " labels below " << config.labeling.threshold << " await review\n";
  return kOk;
}

int review_serve(const fs::path& manifest_path, const std::string& host, int port, double threshold,
                 const std::optional<fs::path>& ui_dir) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("--threshold must lie in [0, 1]");
  // Handle SIGINT/SIGTERM on a dedicated thread so the server can be stopped cleanly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ReviewService service({.manifest = manifest_path, .threshold = threshold, .static_dir = ui_dir, .audit_log = {}});
  const int bound = service.bind(host, port);
  std::cerr << "review service on http://" << host << ":" << bound << " (" << service.get_stats().body["pending"]
            << " pending)\n";
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);  // no-op if a signal already arrived
  waiter.join();
  return kOk;
}

int report(const fs::path& manifest_path, const std::string& format) {
  const auto fmt = report_format_from_string(format);
  std::cout << render_report(manifest_report(read_manifest(manifest_path)), fmt);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairgen: balanced synthetic datasets by steering a generator's latent space"};
  app.require_subcommand(1);

  fs::path config, out, manifest, report_path, probes_dir, heads_dir, classifier;
  std::optional<std::size_t> samples, workers;
  std::optional<fs::path> survey_manifest, ui_dir;
  std::string plan = "Q=100", format = "text", host = "127.0.0.1";
  int port = 8080;
  double threshold = kDefaultReviewThreshold;
  bool keep_rejects = false;

  auto* train = app.add_subcommand("train-classifier", "Train the feature-space group classifier on oracle samples");
  train->add_option("--config", config, "Run configuration (JSON)")->required();
  train->add_option("--out", out, "Output model file")->required();

  auto* probe = app.add_subcommand("probe-latent", "Train one-vs-rest latent probes from a manifest's triples");
  probe->add_option("--config", config)->required();
  probe->add_option("--manifest", manifest, "Manifest with (latent, group) records, e.g. from survey")->required();
  probe->add_option("--out", probes_dir, "Output directory")->required();

  auto* surv = app.add_subcommand("survey", "Unguided sampling: generate, classify, tally");
  surv->add_option("--config", config)->required();
  surv->add_option("-n", samples, "Number of samples (default from config)");
  surv->add_option("--report", report_path, "Report output (JSON)")->required();
  surv->add_option("--classifier", classifier, "Group classifier (default from config)");
  surv->add_option("--manifest", survey_manifest, "Also store every sampled triple here");

  auto* gen = app.add_subcommand("generate", "Guided generation with verification and exact quotas");
  gen->add_option("--config", config)->required();
  gen->add_option("--plan", plan, "Q=<quota>[,groups=A+B][,max_attempts=N][,mode=raw_theta|unit_scaled][,alpha=x]");
  gen->add_option("--manifest", manifest, "Output manifest")->required();
  gen->add_option("--classifier", classifier, "Group classifier (default from config)");
  gen->add_option("--probes", probes_dir, "Latent probe directory (default from config)");
  gen->add_option("--workers", workers, "Worker threads (deterministic only with 1)");
  gen->add_flag("--keep-rejects", keep_rejects, "Store rejected samples, flagged");

  auto* heads = app.add_subcommand("train-heads", "Train downstream attribute heads on oracle attributes");
  heads->add_option("--config", config)->required();
  heads->add_option("--out", heads_dir, "Output directory")->required();

  auto* lab = app.add_subcommand("label", "Label a manifest with downstream attribute heads");
  lab->add_option("--config", config)->required();
  lab->add_option("--manifest", manifest)->required();
  lab->add_option("--heads", heads_dir, "Directory of attribute heads")->required();

  auto* serve = app.add_subcommand("review-serve", "Serve the low-confidence review queue over HTTP");
  serve->add_option("--manifest", manifest)->required();
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--threshold", threshold, "Review labels with confidence below this");
  serve->add_option("--ui", ui_dir, "Static files to serve at /");

  auto* rep = app.add_subcommand("report", "Render a manifest's distribution report");
  rep->add_option("--manifest", manifest)->required();
  rep->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  // Artifact paths default to the config's when not given.
  auto artifact = [&](fs::path& p, const fs::path& fallback) {
    if (p.empty()) p = fallback;
  };

  try {
    if (*train) return train_classifier(config, out);
    if (*probe) return probe_latent(config, manifest, probes_dir);
    if (*surv) {
      if (classifier.empty()) artifact(classifier, load_config(config).artifacts.classifier);
      return survey(config, samples, report_path, classifier, survey_manifest);
    }
    if (*gen) {
      const auto cfg = load_config(config);
      artifact(classifier, cfg.artifacts.classifier);
      artifact(probes_dir, cfg.artifacts.probes);
      return generate(config, plan, manifest, classifier, probes_dir, workers, keep_rejects);
    }
    if (*heads) return train_heads(config, heads_dir);
    if (*lab) return label(config, manifest, heads_dir);
    if (*serve) return review_serve(manifest, host, port, threshold, ui_dir);
    if (*rep) return report(manifest, format);
  } catch (const QuotaUnreachableError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kQuota;
  } catch (const ConfigError& e) {
    std::cerr << "fairgen: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InvalidValueError& e) {
    std::cerr << "fairgen: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const MissingGroupError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kConfig;
  } catch (const DegenerateTrainingError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kConfig;
  } catch (const WrongSpaceError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kConfig;
  } catch (const DimensionMismatchError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "fairgen: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kIo;
  } catch (const SchemaError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kIo;
  } catch (const TransportError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kIo;
  } catch (const ProtocolError& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "fairgen: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "fairgen: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUnexpected;
}

#include "sparcs/pipeline/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparcs/common/errors.hpp"
#include "sparcs/common/io.hpp"
#include "sparcs/data/column_store.hpp"
#include "sparcs/data/ingest.hpp"
#include "sparcs/data/split.hpp"
#include "sparcs/data/synthetic.hpp"
#include "sparcs/eval/cross_validation.hpp"
#include "sparcs/eval/holdout.hpp"
#include "sparcs/model/fitted_model.hpp"
#include "sparcs/pipeline/manifest.hpp"
#include "sparcs/rank/ranking.hpp"
#include "sparcs/service/predict_service.hpp"

namespace sparcs::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out = "run";
  std::string config;
};

struct SynthArgs {
  std::string kind = "sparcs";
  std::size_t rows = 2000;
};

struct IngestArgs {
  std::string input;
  std::string mapping;
  double test_fraction = 0.5;
};

struct RankArgs {
  std::size_t top_k = 5;
  std::size_t target_bins = 10;
  std::size_t numeric_bins = 10;
  int gbt_trees = 50;
};

struct TrainArgs {
  std::string model;
  std::string name;
  bool cv = false;
  std::size_t folds = 5;
  unsigned threads = 1;
  std::string grid;
  int max_depth = -1;     // family default when negative
  std::size_t min_leaf = 0;  // family default when zero
  double lambda = 1.0;
  double l1_ratio = 0.5;
  std::string criterion;
  int n_trees = 50;
  double learning_rate = 0.1;
  std::string features;
  bool use_ranking = false;
};

struct EvaluateArgs {
  std::string name;
};

struct PredictArgs {
  std::string name;
  std::string model_file;
  std::string request;
  std::string row;
};

std::string trimmed(std::string_view s) { return std::string(data::trim(s)); }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trimmed(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

void check_name(const std::string& name) {
  const bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
  if (!ok || name.front() == '.') throw ConfigError("invalid model name '" + name + "'");
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw DataError(path.string() + " is not valid JSON");
  return j;
}

// Effective option values of a subcommand, for the manifest and its hash.
json effective_options(const CLI::App& sub) {
  json j = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "out") continue;
    j[name] = opt->count() ? opt->as<std::string>() : opt->get_default_str();
  }
  return j;
}

// Splices `key = value` lines from the --config file in after the
// subcommand name, so explicit flags (parsed later, last one wins) override
// them. Keys may use '-' or '_'. Keys that belong to another subcommand are
// ignored; keys unknown to every subcommand are an error.
std::vector<std::string> merge_config(const CLI::App& app, const std::set<std::string>& flags,
                                      std::vector<std::string> args) {
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty()) return args;
  if (!fs::is_regular_file(config)) throw ConfigError("config file not found: " + config);

  std::size_t at = 0;
  const CLI::App* sub = nullptr;
  for (; at < args.size(); ++at) {
    for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) {
      if (s->get_name() == args[at]) sub = s;
    }
    if (sub) break;
  }
  if (!sub) return args;

  std::vector<std::string> injected;
  std::istringstream in(read_file(config));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(config + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw ConfigError(config + ": config files cannot include other configs");
    const std::string flag = "--" + key;
    if (sub->get_option_no_throw(flag) == nullptr) {
      bool elsewhere = false;
      for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) {
        if (s->get_option_no_throw(flag) != nullptr) elsewhere = true;
      }
      if (!elsewhere) throw ConfigError(config + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
      continue;
    }
    if (flags.count(key)) {
      if (value == "true" || value == "1") {
        injected.push_back(flag);
      } else if (value != "false" && value != "0") {
        throw ConfigError(config + ": key '" + key + "' expects true or false");
      }
      continue;
    }
    injected.push_back(flag);
    injected.push_back(value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at + 1), injected.begin(), injected.end());
  return args;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& raw_args) {
    CLI::App app{"SPARCS inpatient cost modeling pipeline", "sparcs_cost"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto* synth = add_common(app.add_subcommand("synth", "Write a synthetic SPARCS-style CSV and its column mapping"));
    synth->add_option("--kind", synth_.kind, "Generator: sparcs, planted, ranking")
        ->check(CLI::IsMember({"sparcs", "planted", "ranking"}));
    synth->add_option("--rows", synth_.rows, "Number of rows")->check(CLI::PositiveNumber);

    auto* ingest = add_common(app.add_subcommand("ingest", "Read a CSV into the column store and split train/test"));
    ingest->add_option("--input", ingest_.input, "Input CSV")->required();
    ingest->add_option("--mapping", ingest_.mapping, "Column mapping file (default: SPARCS public headers)");
    ingest->add_option("--test-fraction", ingest_.test_fraction, "Holdout fraction")->check(CLI::Range(0.0, 1.0));

    auto* rank = add_common(app.add_subcommand("rank", "Rank features on the training split"));
    rank->add_option("--top-k", rank_.top_k, "Features kept per measure")->check(CLI::PositiveNumber);
    rank->add_option("--target-bins", rank_.target_bins, "Quantile bins for the cost target")->check(CLI::Range(2, 1000));
    rank->add_option("--numeric-bins", rank_.numeric_bins, "Quantile bins for numeric features")->check(CLI::Range(2, 1000));
    rank->add_option("--gbt-trees", rank_.gbt_trees, "Boosting rounds for gain importance")->check(CLI::PositiveNumber);

    auto* train = add_common(app.add_subcommand("train", "Fit a model on the training split"));
    train->add_option("--model", train_.model, "ols, ridge, lasso, elasticnet, lars, lars_aic, lars_bic, tree, gbt")
        ->required();
    train->add_option("--name", train_.name, "Artifact name (default: the model family)");
    train->add_flag("--cv", train_.cv, "Choose the tuning parameter by k-fold cross-validation");
    flags_.insert("cv");
    train->add_option("--folds", train_.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
    train->add_option("--threads", train_.threads, "Folds evaluated concurrently")->check(CLI::Range(1, 256));
    train->add_option("--grid", train_.grid, "Comma-separated depths (tree) or penalties (linear) for --cv");
    train->add_option("--max-depth", train_.max_depth, "Tree depth (tree default 10, gbt default 3)");
    train->add_option("--min-leaf", train_.min_leaf, "Minimum rows per leaf (default 20)");
    train->add_option("--lambda", train_.lambda, "Penalty strength for ridge, lasso, elasticnet");
    train->add_option("--l1-ratio", train_.l1_ratio, "Elastic net mixing weight")->check(CLI::Range(0.0, 1.0));
    train->add_option("--criterion", train_.criterion, "aic or bic (lars models)")->check(CLI::IsMember({"aic", "bic"}));
    train->add_option("--n-trees", train_.n_trees, "Boosting rounds (gbt)")->check(CLI::PositiveNumber);
    train->add_option("--learning-rate", train_.learning_rate, "Shrinkage (gbt)");
    train->add_option("--features", train_.features, "Comma-separated feature subset");
    train->add_flag("--use-ranking", train_.use_ranking, "Restrict to the union selected by `rank`");
    flags_.insert("use-ranking");

    auto* evaluate = add_common(app.add_subcommand("evaluate", "Score a trained model on the holdout split"));
    evaluate->add_option("--name", evaluate_.name, "Model name given to train")->required();

    auto* predict = add_common(app.add_subcommand("predict", "Predict the cost of one JSON-described stay"));
    predict->add_option("--name", predict_.name, "Model name in the run directory");
    predict->add_option("--model-file", predict_.model_file, "Explicit model JSON path");
    auto* req = predict->add_option("--request", predict_.request, "File with one JSON request object");
    auto* row = predict->add_option("--row", predict_.row, "Inline JSON request object");
    req->excludes(row);

    try {
      auto args = merge_config(app, flags_, raw_args);
      std::reverse(args.begin(), args.end());
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitConfig;
    }

    const CLI::App* sub = app.get_subcommands().front();
    options_ = effective_options(*sub);
    out_dir_ = common_.out;
    if (sub == synth) return cmd_synth();
    if (sub == ingest) return cmd_ingest();
    if (sub == rank) return cmd_rank();
    if (sub == train) return cmd_train();
    if (sub == evaluate) return cmd_evaluate();
    return cmd_predict();
  }

 private:
  CLI::App* add_common(CLI::App* sub) {
    sub->add_option("--seed", common_.seed, "Random seed");
    sub->add_option("--out", common_.out, "Run directory");
    sub->add_option("--config", common_.config, "key = value file of option defaults");
    return sub;
  }

  void finish_stage(const std::string& stage, const std::vector<std::string>& artifacts,
                    const std::string& input = {}) {
    auto manifest = RunManifest::load_or_create(out_dir_);
    if (!input.empty()) manifest.set_input(input);
    manifest.set_seed(common_.seed);
    manifest.record(stage, StageRecord{utc_timestamp(), config_hash(options_), options_, artifacts});
    manifest.save();
  }

  int cmd_synth() {
    data::SyntheticSpec spec = synth_.kind == "planted"   ? data::planted_depth2_spec()
                               : synth_.kind == "ranking" ? data::ranking_recovery_spec()
                                                          : data::sparcs_like_spec();
    const auto ds = data::generate_synthetic(spec, synth_.rows, common_.seed);
    data::ColumnMapping mapping;
    if (synth_.kind == "sparcs") {
      mapping = data::ColumnMapping::sparcs_default();
    } else {
      for (const auto& f : spec.features) mapping.features.push_back({f.name, f.name, f.kind});
      mapping.target_column = spec.target_name;
      mapping.target_name = spec.target_name;
    }
    fs::create_directories(out_dir_);
    std::ostringstream csv;
    data::write_csv(ds, mapping, csv);
    write_file_atomic(out_dir_ / "synthetic.csv", csv.str());
    write_file_atomic(out_dir_ / "columns.conf", mapping.to_text());
    finish_stage("synth", {"synthetic.csv", "columns.conf"});
    out_ << "wrote " << ds.row_count() << " rows to " << (out_dir_ / "synthetic.csv").string() << "\n";
    return kExitOk;
  }

  int cmd_ingest() {
    data::ColumnMapping mapping;
    if (ingest_.mapping.empty()) {
      mapping = data::ColumnMapping::sparcs_default();
    } else {
      if (!fs::is_regular_file(ingest_.mapping)) throw ConfigError("mapping file not found: " + ingest_.mapping);
      mapping = data::ColumnMapping::load(ingest_.mapping);
    }
    auto [dataset, report] = data::ingest_csv(ingest_.input, mapping);
    const auto parts = data::split(dataset, data::SplitConfig{ingest_.test_fraction, common_.seed});
    data::save_dataset(dataset, out_dir_ / "dataset");
    data::save_dataset(parts.train, out_dir_ / "train");
    data::save_dataset(parts.test, out_dir_ / "test");
    json j = report.to_json();
    j["train_rows"] = parts.train.row_count();
    j["test_rows"] = parts.test.row_count();
    j["schema_fingerprint"] = dataset.schema().fingerprint();
    write_json(out_dir_ / "ingest_report.json", j);
    finish_stage("ingest", {"dataset/schema.json", "train/schema.json", "test/schema.json", "ingest_report.json"},
                 ingest_.input);
    out_ << "rows read " << report.rows_read << ", kept " << report.rows_kept << " (train "
         << parts.train.row_count() << ", test " << parts.test.row_count() << ")\n";
    return kExitOk;
  }

  int cmd_rank() {
    const auto train = data::load_dataset(out_dir_ / "train");
    rank::RankConfig cfg;
    cfg.top_k = rank_.top_k;
    cfg.target_bins = rank_.target_bins;
    cfg.numeric_bins = rank_.numeric_bins;
    cfg.gbt.n_trees = rank_.gbt_trees;
    const auto report = rank::rank_features(train, cfg);
    write_json(out_dir_ / "ranking.json", report.to_json());
    finish_stage("rank", {"ranking.json"});
    for (std::size_t m = 0; m < report.top.size(); ++m) {
      out_ << rank::RankingReport::kMeasures[m] << ":";
      for (std::size_t i : report.top[m]) out_ << " " << report.features[i];
      out_ << "\n";
    }
    out_ << "selected:";
    for (const auto& n : report.selected_names()) out_ << " " << n;
    out_ << "\n";
    return kExitOk;
  }

  int cmd_train() {
    model::ModelFamily family = model::model_family_from_string(train_.model);
    if (!train_.criterion.empty()) {
      if (family != model::ModelFamily::kLarsAic && family != model::ModelFamily::kLarsBic) {
        throw ConfigError("--criterion applies only to lars models");
      }
      family = train_.criterion == "aic" ? model::ModelFamily::kLarsAic : model::ModelFamily::kLarsBic;
    }
    const std::string name = train_.name.empty() ? std::string(model::to_string(family)) : train_.name;
    check_name(name);

    auto train = data::load_dataset(out_dir_ / "train");
    std::vector<std::string> features;
    if (train_.use_ranking) {
      features = rank::RankingReport::from_json(read_json(out_dir_ / "ranking.json")).selected_names();
    } else if (!train_.features.empty()) {
      features = split_list(train_.features);
    }
    if (!features.empty()) {
      for (const auto& f : features) {
        if (!train.schema().index_of(f)) throw ConfigError("unknown feature '" + f + "'");
      }
      train = train.select_features(features);
    }

    model::HyperParams params;
    params.max_depth = train_.max_depth >= 0 ? train_.max_depth : 10;
    params.min_leaf = train_.min_leaf > 0 ? train_.min_leaf : 20;
    params.lambda = train_.lambda;
    params.l1_ratio = train_.l1_ratio;
    params.gbt.n_trees = train_.n_trees;
    params.gbt.learning_rate = train_.learning_rate;
    params.gbt.max_depth = train_.max_depth >= 0 ? train_.max_depth : 3;
    params.gbt.min_leaf = train_.min_leaf > 0 ? train_.min_leaf : 20;

    std::vector<std::string> artifacts;
    fs::create_directories(out_dir_ / "models");
    if (train_.cv) {
      const auto grid = train_.grid.empty() ? eval::default_grid(train, family, params) : parse_grid(family, params);
      const auto cv = eval::cross_validate(train, family, grid,
                                           eval::CvConfig{train_.folds, common_.seed, train_.threads});
      write_json(out_dir_ / ("cv_" + name + ".json"), cv.to_json());
      artifacts.push_back("cv_" + name + ".json");
      params = cv.best();
      out_ << "cv chosen " << cv.best().to_json(family).dump() << " mean r2 " << cv.mean_r2[cv.chosen] << "\n";
    } else if (!train_.grid.empty()) {
      throw ConfigError("--grid requires --cv");
    }

    model::FitDiagnostics diag;
    const auto fitted = model::fit_model(train, family, params, &diag);
    fitted.save(out_dir_ / "models" / (name + ".json"));
    artifacts.push_back("models/" + name + ".json");
    if (diag.lars_path) {
      write_json(out_dir_ / ("lars_path_" + name + ".json"), diag.lars_path->to_json(diag.coefficient_labels));
      artifacts.push_back("lars_path_" + name + ".json");
    }
    finish_stage("train:" + name, artifacts);
    out_ << "trained " << model::to_string(family) << " as " << name << " on " << train.row_count() << " rows\n";
    return kExitOk;
  }

  std::vector<model::HyperParams> parse_grid(model::ModelFamily family, const model::HyperParams& base) {
    std::vector<double> values;
    for (const auto& item : split_list(train_.grid)) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("bad --grid value '" + item + "'");
      }
    }
    if (values.empty()) throw ConfigError("--grid is empty");
    std::vector<model::HyperParams> grid;
    if (family == model::ModelFamily::kTree) {
      std::sort(values.begin(), values.end());
      for (double v : values) {
        if (v != static_cast<int>(v) || v < 1) throw ConfigError("tree grid depths must be integers >= 1");
        model::HyperParams p = base;
        p.max_depth = static_cast<int>(v);
        grid.push_back(p);
      }
    } else {
      // Larger penalties are simpler models and go first.
      std::sort(values.begin(), values.end(), std::greater<>());
      for (double v : values) {
        model::HyperParams p = base;
        p.lambda = v;
        grid.push_back(p);
      }
    }
    return grid;
  }

  int cmd_evaluate() {
    check_name(evaluate_.name);
    const auto fitted = model::FittedModel::load(out_dir_ / "models" / (evaluate_.name + ".json"));
    auto test = data::load_dataset(out_dir_ / "test");
    if (test.schema().size() != fitted.schema().size()) {
      std::vector<std::string> names;
      for (const auto& f : fitted.schema().features()) names.push_back(f.name);
      test = test.select_features(names);
    }
    const auto result = eval::evaluate_holdout(fitted, test);
    json j = {
        {"model", evaluate_.name},
        {"family", model::to_string(fitted.family())},
        {"schema_fingerprint", fitted.schema_fingerprint()},
        {"metrics", result.metrics.to_json()},
    };
    const std::string metrics = "metrics_" + evaluate_.name + ".json";
    const std::string scatter = "scatter_" + evaluate_.name + ".csv";
    write_json(out_dir_ / metrics, j);
    eval::export_scatter(test.target(), result.predicted, out_dir_ / scatter);
    finish_stage("evaluate:" + evaluate_.name,
                 {metrics, scatter, eval::scatter_sidecar_path(scatter).string()});
    out_ << result.metrics.to_json().dump() << "\n";
    return kExitOk;
  }

  int cmd_predict() {
    fs::path path = predict_.model_file;
    if (path.empty()) {
      if (predict_.name.empty()) throw ConfigError("predict needs --name or --model-file");
      check_name(predict_.name);
      path = out_dir_ / "models" / (predict_.name + ".json");
    }
    std::string body = predict_.row;
    if (!predict_.request.empty()) {
      if (!fs::is_regular_file(predict_.request)) throw ConfigError("request file not found: " + predict_.request);
      body = read_file(predict_.request);
    }
    if (body.empty()) throw ConfigError("predict needs --request or --row");
    service::PredictionService svc;
    svc.load(model::FittedModel::load(path));
    const auto r = svc.predict(body);
    if (r.status != 200) {
      err_ << "error: " << r.body.dump() << "\n";
      return kExitData;
    }
    out_ << r.body.dump() << "\n";
    return kExitOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  std::set<std::string> flags_;
  Common common_;
  SynthArgs synth_;
  IngestArgs ingest_;
  RankArgs rank_;
  TrainArgs train_;
  EvaluateArgs evaluate_;
  PredictArgs predict_;
  json options_;
  fs::path out_dir_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    Runner runner(out, err);
    return runner.run(args);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sparcs::pipeline

// sparsecl command-line front end.
//
// Exit codes: 0 ok, 2 configuration error, 3 data error, 4 verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparsecl/curriculum.hpp"
#include "sparsecl/dataset.hpp"
#include "sparsecl/errors.hpp"
#include "sparsecl/metrics.hpp"
#include "sparsecl/serialization.hpp"
#include "sparsecl/synthetic.hpp"
#include "sparsecl/trainer.hpp"

namespace fs = std::filesystem;
using namespace sparsecl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitVerify = 4;

struct VerificationFailure : Error {
  using Error::Error;
};

// Collects every problem before giving up so a bad invocation is fixed in one pass.
struct ConfigProblems {
  std::vector<std::string> items;
  void add(std::string msg) { items.push_back(std::move(msg)); }
  void raise_if_any() const {
    if (items.empty()) return;
    std::string all = std::to_string(items.size()) + " configuration error(s):";
    for (const auto& m : items) all += "\n  - " + m;
    throw ConfigError(all);
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("expected a comma-separated list of non-negative integers, got '" + text + "'");
    out.push_back(std::stoul(item));
  }
  if (out.empty()) throw ConfigError("empty list '" + text + "'");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

// ---- catalog ---------------------------------------------------------------

struct CatalogArgs {
  std::string target = "256x512";
  std::string out;
  bool canonical = false;
  bool verify = false;
};

int cmd_catalog(const CatalogArgs& a) {
  const TargetSize target = parse_target_size(a.target);
  if (a.canonical && target != TargetSize{256, 512})
    throw ConfigError("--canonical is only defined for 256x512");
  const Catalog catalog = a.canonical ? canonical_catalog_256x512() : enumerate_syllabuses(target);

  if (a.verify) {
    const Catalog enumerated = enumerate_syllabuses({256, 512});
    const Catalog& ref = canonical_catalog_256x512();
    std::vector<std::string> diffs;
    if (enumerated.size() != ref.size())
      diffs.push_back("enumerated " + std::to_string(enumerated.size()) + " entries, reference has " +
                      std::to_string(ref.size()));
    for (std::size_t i = 0; i < std::min(enumerated.size(), ref.size()); ++i)
      if (enumerated[i].syllabus.pooled != ref[i].syllabus.pooled)
        diffs.push_back("entry " + std::to_string(i) + ": " + to_string(enumerated[i].syllabus.pooled) + " vs " +
                        to_string(ref[i].syllabus.pooled));
    for (std::size_t i : inconsistent_entries(ref))
      diffs.push_back("reference entry " + std::to_string(i) + " does not match its (iterations, kernel)");
    if (!diffs.empty()) {
      std::string msg = "catalog verification failed:";
      for (const auto& d : diffs) msg += "\n  " + d;
      throw VerificationFailure(msg);
    }
    std::cerr << "verified: 256x512 enumeration matches the reference catalog (" << ref.size() << " entries)\n";
  }

  const std::string text = catalog_to_json(catalog).dump(2) + "\n";
  if (a.out.empty()) std::cout << text;
  else write_text(a.out, text);
  std::cerr << catalog.size() << " entries for " << to_string(catalog.target) << "\n";
  return 0;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t count = 16;
  std::size_t height = 64;
  std::size_t width = 128;
  double density = 0.25;
  std::uint64_t seed = 0;
  std::string model = "planar_ground";
};

int cmd_synth(const SynthArgs& a) {
  SyntheticSpec spec{a.height, a.width, a.density, a.seed, parse_depth_model(a.model)};
  if (a.count == 0) throw ConfigError("--count must be >= 1");
  const Dataset ds = generate_synthetic_dataset(spec, a.count);
  write_dataset(a.out, ds);
  std::cerr << "wrote " << ds.size() << " samples to " << a.out << "\n";
  return 0;
}

// ---- density ---------------------------------------------------------------

struct DensityArgs {
  std::string dataset;
  std::string catalog;
  std::string target = "256x512";
  std::string out;
  std::string svg;
};

std::string density_svg(const Catalog& catalog, const std::vector<double>& mean) {
  const double bar = 20.0, gap = 4.0, height = 240.0, top = 20.0, left = 40.0;
  const double width = left + catalog.size() * (bar + gap) + 20.0;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << (height + top + 60)
    << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + height << "\" x2=\"" << width - 10 << "\" y2=\""
    << top + height << "\" stroke=\"black\"/>\n";
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0})
    s << "<text x=\"4\" y=\"" << top + height * (1 - tick) + 3 << "\">" << tick << "</text>\n";
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const double x = left + i * (bar + gap), h = height * mean[i];
    s << "<rect x=\"" << x << "\" y=\"" << top + height - h << "\" width=\"" << bar << "\" height=\"" << h
      << "\" fill=\"#4a7ab5\"><title>" << syllabus_label(catalog[i].syllabus) << " " << fmt(mean[i])
      << "</title></rect>\n";
    s << "<text x=\"" << x + bar / 2 << "\" y=\"" << top + height + 14 << "\" text-anchor=\"middle\">" << i
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

int cmd_density(const DensityArgs& a) {
  const Catalog catalog =
      a.catalog.empty() ? enumerate_syllabuses(parse_target_size(a.target)) : catalog_from_json(read_json_file(a.catalog));
  const Dataset ds = load_dataset(a.dataset, {.images = false, .dense = false});

  std::vector<double> sum(catalog.size(), 0.0), sum_sq(catalog.size(), 0.0);
  for (const auto& s : ds.samples) {
    const DepthMap gt = resize_nearest(s.ground_truth, catalog.target);
    const auto profile = density_profile(gt, catalog, catalog.target);
    for (std::size_t i = 0; i < profile.size(); ++i) {
      sum[i] += profile[i].density;
      sum_sq[i] += profile[i].density * profile[i].density;
    }
  }
  const double n = static_cast<double>(ds.size());
  std::ostringstream csv;
  csv << "index,label,mean_density,std_density\n";
  std::vector<double> mean(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    mean[i] = sum[i] / n;
    const double var = std::max(0.0, sum_sq[i] / n - mean[i] * mean[i]);
    csv << i << ",\"" << syllabus_label(catalog[i].syllabus) << "\"," << fmt(mean[i]) << ',' << fmt(std::sqrt(var))
        << '\n';
  }
  if (a.out.empty()) std::cout << csv.str();
  else write_text(a.out, csv.str());
  if (!a.svg.empty()) write_text(a.svg, density_svg(catalog, mean));
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string out;
  std::string target = "256x512";
  std::string curriculum = "A";
  std::string plan;
  std::string catalog;
  std::optional<double> lambda;
  std::optional<std::string> patience;
  std::string mode = "consecutive";
  bool advance_on_epoch_end = false;
  bool train_to_budget = false;
  std::uint64_t seed = 0;
  std::size_t steps = 1000;
  std::size_t batch = kDefaultBatchSize;
  double lr = 1e-4;
  std::optional<std::size_t> decay_interval;
  std::string loss = "L1";
  std::string imputation = "max";
  std::size_t c1 = 8, c2 = 16;
  bool strict = false;
  bool augment = false;
};

ImputationMethod parse_imputation(const std::string& s) {
  if (s == "max") return ImputationMethod::max;
  if (s == "mean") return ImputationMethod::mean;
  if (s == "gaussian") return ImputationMethod::gaussian;
  throw ConfigError("unknown imputation '" + s + "' (max|mean|gaussian)");
}

PatienceMode parse_mode(const std::string& s) {
  if (s == "consecutive") return PatienceMode::consecutive;
  if (s == "cumulative") return PatienceMode::cumulative;
  throw ConfigError("unknown patience mode '" + s + "' (consecutive|cumulative)");
}

// Runs `f`, recording a ConfigError message instead of throwing.
template <typename F>
void check(ConfigProblems& problems, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    problems.add(e.what());
  }
}

int cmd_train(const TrainArgs& a) {
  ConfigProblems problems;
  TrainConfig cfg;
  CurriculumPlan plan;
  Catalog catalog;
  LossKind loss = LossKind::L1;
  PatienceMode mode = PatienceMode::consecutive;

  check(problems, [&] { cfg.target = parse_target_size(a.target); });
  check(problems, [&] { loss = parse_loss_kind(a.loss); });
  check(problems, [&] { cfg.imputation = parse_imputation(a.imputation); });
  check(problems, [&] { mode = parse_mode(a.mode); });
  if (a.steps == 0) problems.add("--steps must be >= 1");
  if (a.batch == 0) problems.add("--batch must be >= 1");
  if (!(a.lr > 0.0)) problems.add("--lr must be positive");
  if (a.c1 == 0 || a.c2 == 0) problems.add("--c1 and --c2 must be >= 1");
  if (a.strict && a.plan.empty()) {
    if (!a.lambda) problems.add("strict mode: --lambda is required");
    if (!a.patience) problems.add("strict mode: --patience is required");
  }
  if (a.lambda && !(*a.lambda >= 0.0 && *a.lambda <= 1.0)) problems.add("--lambda must be in [0, 1]");

  std::vector<std::size_t> patience_list;
  if (a.patience) check(problems, [&] { patience_list = parse_index_list(*a.patience); });
  for (std::size_t p : patience_list)
    if (p == 0) {
      problems.add("--patience values must be >= 1");
      break;
    }

  bool have_catalog = false;
  check(problems, [&] {
    if (!a.catalog.empty()) catalog = catalog_from_json(read_json_file(a.catalog));
    else catalog = enumerate_syllabuses(cfg.target);
    if (catalog.target != cfg.target)
      throw ConfigError("catalog target " + to_string(catalog.target) + " differs from --target " +
                        to_string(cfg.target));
    have_catalog = true;
  });

  if (have_catalog) {
    if (!a.plan.empty()) {
      check(problems, [&] { plan = plan_from_json(read_json_file(a.plan), catalog); });
    } else {
      check(problems, [&] {
        CurriculumSelection sel;
        if (!a.curriculum.empty() && std::isdigit(static_cast<unsigned char>(a.curriculum[0])))
          sel = select_curriculum(catalog, parse_index_list(a.curriculum));
        else
          sel = select_curriculum(catalog, parse_curriculum_name(a.curriculum));
        plan.syllabuses = sel.syllabuses;
        plan.catalog_indices = sel.indices;
        plan.lambda = a.lambda.value_or(kDefaultLambda);
        plan.mode = mode;
        plan.advance_on_epoch_end = a.advance_on_epoch_end;
        if (patience_list.size() > 1 && patience_list.size() != sel.syllabuses.size())
          throw ConfigError("--patience lists " + std::to_string(patience_list.size()) + " values for " +
                            std::to_string(sel.syllabuses.size()) + " syllabuses");
        if (patience_list.size() > 1) plan.patience = patience_list;
        else plan.patience.assign(sel.syllabuses.size(), patience_list.empty() ? kDefaultPatience : patience_list[0]);
      });
    }
  }
  problems.raise_if_any();
  if (a.train_to_budget) plan.patience.back() = std::max(plan.patience.back(), a.steps);
  plan.validate();

  Dataset ds = load_dataset(a.dataset, {.images = true, .dense = false});
  cfg.batch_size = a.batch;
  cfg.max_steps = a.steps;
  cfg.loss = loss;
  cfg.seed = a.seed;
  if (a.augment) cfg.augment = AugmentConfig{0.5, 0.0, std::nullopt, a.seed};

  ToyModel model({a.c1, a.c2, a.seed, false});
  AdamConfig ac;
  ac.schedule.initial = a.lr;
  ac.schedule.interval = a.decay_interval.value_or(scaled_decay_interval(a.steps));
  Adam optim(model.parameter_count(), ac);

  const TrainResult result = train(plan, ds, model, optim, cfg);

  const fs::path out(a.out);
  fs::create_directories(out);
  write_json_file(out / "model.json", checkpoint_to_json(model, cfg.target));
  write_json_file(out / "plan.json", plan_to_json(plan));
  std::ostringstream events;
  write_event_log_csv(events, result.events);
  write_text(out / "events.csv", events.str());

  Json summary = {{"steps", result.steps},
                  {"epochs_completed", result.epochs_completed},
                  {"advances", result.advances},
                  {"final_syllabus_index", result.final_state.syllabus_index},
                  {"finished", result.final_state.finished},
                  {"final_loss", result.events.empty() ? Json(nullptr) : Json(result.events.back().loss)},
                  {"parameter_count", model.parameter_count()},
                  {"config",
                   {{"target", {cfg.target.height, cfg.target.width}},
                    {"batch", cfg.batch_size},
                    {"max_steps", cfg.max_steps},
                    {"seed", cfg.seed},
                    {"lr", a.lr},
                    {"decay_interval", ac.schedule.interval},
                    {"loss", to_string(cfg.loss)},
                    {"imputation", a.imputation}}},
                  {"warnings", result.warnings}};
  write_json_file(out / "summary.json", summary);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "trained " << result.steps << " steps, " << result.advances << " syllabus advance(s); wrote "
            << out.string() << "\n";
  return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string dataset;
  std::string reference = "sparse";
  std::string out_json;
  std::string out_csv;
  std::optional<std::string> crop;
};

int cmd_eval(const EvalArgs& a) {
  if (a.reference != "sparse" && a.reference != "dense")
    throw ConfigError("--reference must be sparse or dense");
  std::optional<CropRect> crop;
  if (a.crop) {
    const auto v = parse_index_list(*a.crop);
    if (v.size() != 4) throw ConfigError("--crop expects top,left,height,width");
    crop = CropRect{v[0], v[1], v[2], v[3]};
  }
  const ModelCheckpoint ck = checkpoint_from_json(read_json_file(a.checkpoint));
  const ToyModel model(ck.config, ck.params);
  const Dataset ds = load_dataset(a.dataset, {.images = true, .dense = a.reference == "dense"});

  MetricAccumulator acc;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& s = ds.samples[i];
    if (!s.image) throw DataError("sample '" + s.id + "' has no RGB image");
    const DepthMap& gt = a.reference == "dense" ? ds.dense[i] : s.ground_truth;
    const auto pred = predict(model, *s.image, ck.target, gt.size());
    acc.add(gt, pred, crop);
  }
  const MetricReport r = acc.report();

  const std::string json = metrics_to_json(r).dump(2) + "\n";
  std::ostringstream csv;
  write_metrics_csv_header(csv);
  write_metrics_csv_row(csv, r);
  if (!a.out_json.empty()) write_text(a.out_json, json);
  if (!a.out_csv.empty()) write_text(a.out_csv, csv.str());
  if (a.out_json.empty() && a.out_csv.empty()) std::cout << json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curriculum training on sparse depth labels"};
  app.require_subcommand(1);

  CatalogArgs cat;
  auto* c = app.add_subcommand("catalog", "Enumerate the syllabus catalog for a target size");
  c->add_option("--target", cat.target, "Target size HxW")->capture_default_str();
  c->add_option("--out", cat.out, "Output JSON file (stdout when omitted)");
  c->add_flag("--canonical", cat.canonical, "Write the built-in 256x512 reference catalog");
  c->add_flag("--verify", cat.verify, "Check the 256x512 enumeration against the reference (exit 4 on mismatch)");

  SynthArgs syn;
  auto* s = app.add_subcommand("synth", "Generate a synthetic sparse-depth dataset");
  s->add_option("--out", syn.out, "Output dataset directory")->required();
  s->add_option("--count", syn.count, "Number of samples")->capture_default_str();
  s->add_option("--height", syn.height, "Raster height")->capture_default_str();
  s->add_option("--width", syn.width, "Raster width")->capture_default_str();
  s->add_option("--density", syn.density, "Fraction of valid pixels")->capture_default_str();
  s->add_option("--seed", syn.seed, "Seed of the first scene")->capture_default_str();
  s->add_option("--model", syn.model, "planar_ground|spheres|ridges")->capture_default_str();

  DensityArgs den;
  auto* d = app.add_subcommand("density", "Mean label density per catalog syllabus");
  d->add_option("--dataset", den.dataset, "Dataset directory")->required();
  d->add_option("--catalog", den.catalog, "Catalog JSON (enumerated from --target when omitted)");
  d->add_option("--target", den.target, "Target size HxW")->capture_default_str();
  d->add_option("--out", den.out, "Output CSV (stdout when omitted)");
  d->add_option("--svg", den.svg, "Optional SVG bar chart");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train the reference model with a curriculum");
  t->add_option("--dataset", tr.dataset, "Dataset directory")->required();
  t->add_option("--out", tr.out, "Output directory")->required();
  t->add_option("--target", tr.target, "Training resolution HxW")->capture_default_str();
  t->add_option("--curriculum", tr.curriculum, "A|B|C|full|none or comma-separated catalog indices")
      ->capture_default_str();
  t->add_option("--plan", tr.plan, "Plan JSON (overrides --curriculum/--lambda/--patience/--mode)");
  t->add_option("--catalog", tr.catalog, "Catalog JSON (enumerated from --target when omitted)");
  t->add_option("--lambda", tr.lambda, "Minimum-decrease parameter in [0, 1] (default 0.999)");
  t->add_option("--patience", tr.patience, "Patience, one value or one per syllabus (default 50)");
  t->add_option("--mode", tr.mode, "consecutive|cumulative")->capture_default_str();
  t->add_flag("--advance-on-epoch-end", tr.advance_on_epoch_end, "Also advance the syllabus after each data pass");
  t->add_flag("--train-to-budget", tr.train_to_budget,
              "Raise the last syllabus's patience to --steps so the full budget is used");
  t->add_option("--seed", tr.seed, "Seed for initialisation and batch order")->capture_default_str();
  t->add_option("--steps", tr.steps, "Optimizer step budget")->capture_default_str();
  t->add_option("--batch", tr.batch, "Batch size")->capture_default_str();
  t->add_option("--lr", tr.lr, "Initial learning rate")->capture_default_str();
  t->add_option("--decay-interval", tr.decay_interval, "Steps between 0.9x decays (default steps*23/106)");
  t->add_option("--loss", tr.loss, "L1|L2")->capture_default_str();
  t->add_option("--imputation", tr.imputation, "max|mean|gaussian")->capture_default_str();
  t->add_option("--c1", tr.c1, "First encoder width")->capture_default_str();
  t->add_option("--c2", tr.c2, "Second encoder width")->capture_default_str();
  t->add_flag("--augment", tr.augment, "Random horizontal flips");
  t->add_flag("--strict", tr.strict, "Require --lambda and --patience (or --plan)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint at ground-truth resolution");
  e->add_option("--checkpoint", ev.checkpoint, "Model JSON")->required();
  e->add_option("--dataset", ev.dataset, "Dataset directory")->required();
  e->add_option("--reference", ev.reference, "sparse|dense ground truth")->capture_default_str();
  e->add_option("--out-json", ev.out_json, "Metrics JSON");
  e->add_option("--out-csv", ev.out_csv, "Metrics CSV row");
  e->add_option("--crop", ev.crop, "Evaluation crop top,left,height,width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*c) return cmd_catalog(cat);
    if (*s) return cmd_synth(syn);
    if (*d) return cmd_density(den);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
  } catch (const VerificationFailure& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitVerify;
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
  return 0;
}

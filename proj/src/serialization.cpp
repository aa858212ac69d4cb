#include "sparsecl/serialization.hpp"

#include <fstream>

#include "sparsecl/errors.hpp"

namespace sparsecl {
namespace {

constexpr const char* kCheckpointFormat = "sparsecl-toy-model";
constexpr int kCheckpointVersion = 1;

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

Json member_list(std::uint8_t m) {
  Json out = Json::array();
  if (m & kMemberA) out.push_back("A");
  if (m & kMemberB) out.push_back("B");
  if (m & kMemberC) out.push_back("C");
  if (m & kMemberAlways) out.push_back("*");
  return out;
}

std::uint8_t parse_members(const Json& j) {
  std::uint8_t m = 0;
  for (const auto& tag : j) {
    const auto s = tag.get<std::string>();
    if (s == "A") m |= kMemberA;
    else if (s == "B") m |= kMemberB;
    else if (s == "C") m |= kMemberC;
    else if (s == "*") m |= kMemberAlways;
    else throw FormatError("unknown curriculum membership '" + s + "'");
  }
  return m;
}

const char* layer_name(std::size_t i) {
  static const char* names[] = {"enc1", "enc2", "dec2", "dec1"};
  return names[i];
}

}  // namespace

Json catalog_to_json(const Catalog& catalog) {
  Json entries = Json::array();
  for (const auto& e : catalog.entries) {
    const auto& s = e.syllabus;
    entries.push_back({{"index", e.index},
                       {"iterations", s.iterations},
                       {"kernel", s.is_identity() ? Json(nullptr) : Json::array({s.kernel, s.kernel})},
                       {"pooled", {s.pooled.height, s.pooled.width}},
                       {"member", member_list(e.membership)}});
  }
  return {{"target", {catalog.target.height, catalog.target.width}}, {"entries", std::move(entries)}};
}

Catalog catalog_from_json(const Json& j) {
  return guarded("catalog", [&] {
    Catalog c;
    c.target = {j.at("target").at(0).get<std::size_t>(), j.at("target").at(1).get<std::size_t>()};
    for (const auto& e : j.at("entries")) {
      CatalogEntry entry;
      entry.index = e.at("index").get<std::size_t>();
      entry.syllabus.iterations = e.at("iterations").get<std::size_t>();
      const auto& k = e.at("kernel");
      if (!k.is_null()) {
        if (k.at(0) != k.at(1)) throw FormatError("catalog kernels must be square");
        entry.syllabus.kernel = k.at(0).get<std::size_t>();
      }
      entry.syllabus.pooled = {e.at("pooled").at(0).get<std::size_t>(), e.at("pooled").at(1).get<std::size_t>()};
      entry.membership = parse_members(e.at("member"));
      if (entry.index != c.entries.size()) throw FormatError("catalog indices must be 0..n-1 in order");
      c.entries.push_back(entry);
    }
    if (c.entries.empty() || !c.entries.back().syllabus.is_identity())
      throw FormatError("catalog must end with the identity syllabus");
    return c;
  });
}

Json plan_to_json(const CurriculumPlan& plan) {
  return {{"lambda", plan.lambda},
          {"mode", plan.mode == PatienceMode::consecutive ? "consecutive" : "cumulative"},
          {"syllabuses", plan.catalog_indices},
          {"patience", plan.patience},
          {"advance_on_epoch_end", plan.advance_on_epoch_end}};
}

CurriculumPlan plan_from_json(const Json& j, const Catalog& catalog) {
  CurriculumPlan plan = guarded("plan", [&] {
    CurriculumPlan p;
    p.lambda = j.at("lambda").get<double>();
    const auto mode = j.value("mode", std::string("consecutive"));
    if (mode == "consecutive") p.mode = PatienceMode::consecutive;
    else if (mode == "cumulative") p.mode = PatienceMode::cumulative;
    else throw ConfigError("unknown patience mode '" + mode + "'");
    p.catalog_indices = j.at("syllabuses").get<std::vector<std::size_t>>();
    p.patience = j.at("patience").get<std::vector<std::size_t>>();
    p.advance_on_epoch_end = j.value("advance_on_epoch_end", false);
    return p;
  });
  for (std::size_t idx : plan.catalog_indices) {
    if (idx >= catalog.size())
      throw ConfigError("plan references catalog index " + std::to_string(idx) + " of " +
                        std::to_string(catalog.size()));
    plan.syllabuses.push_back(catalog.entries[idx].syllabus);
  }
  plan.validate();
  return plan;
}

Json state_to_json(const SchedulerState& s) {
  return {{"syllabus_index", s.syllabus_index},
          {"patience_counter", s.patience_counter},
          {"window_start", s.window_start},
          {"finished", s.finished},
          {"train_history", s.train_history}};
}

SchedulerState state_from_json(const Json& j) {
  return guarded("scheduler state", [&] {
    SchedulerState s;
    s.syllabus_index = j.at("syllabus_index").get<std::size_t>();
    s.patience_counter = j.at("patience_counter").get<std::size_t>();
    s.window_start = j.at("window_start").get<std::size_t>();
    s.finished = j.at("finished").get<bool>();
    s.train_history = j.at("train_history").get<std::vector<double>>();
    if (s.window_start > s.train_history.size()) throw FormatError("window_start beyond train_history");
    return s;
  });
}

Json checkpoint_to_json(const ToyModel& model, TargetSize target) {
  const auto params = model.params();
  Json tensors = Json::array();
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    const auto& L = model.layers()[l];
    tensors.push_back({{"name", std::string(layer_name(l)) + ".weight"},
                       {"shape", {L.out_c, L.in_c, 3, 3}},
                       {"data", std::vector<double>(params.begin() + L.weight_offset,
                                                    params.begin() + L.weight_offset + L.weight_count())}});
    tensors.push_back({{"name", std::string(layer_name(l)) + ".bias"},
                       {"shape", {L.out_c}},
                       {"data", std::vector<double>(params.begin() + L.bias_offset,
                                                    params.begin() + L.bias_offset + L.out_c)}});
  }
  const auto& c = model.config();
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"target", {target.height, target.width}},
          {"config", {{"c1", c.c1}, {"c2", c.c2}}},
          {"parameter_count", model.parameter_count()},
          {"tensors", std::move(tensors)}};
}

ModelCheckpoint checkpoint_from_json(const Json& j) {
  return guarded("checkpoint", [&] {
    if (j.at("format") != kCheckpointFormat) throw FormatError("not a sparsecl model checkpoint");
    if (j.at("version") != kCheckpointVersion)
      throw FormatError("unsupported checkpoint version " + j.at("version").dump());
    ModelCheckpoint ck;
    ck.config.c1 = j.at("config").at("c1").get<std::size_t>();
    ck.config.c2 = j.at("config").at("c2").get<std::size_t>();
    ck.target = {j.at("target").at(0).get<std::size_t>(), j.at("target").at(1).get<std::size_t>()};
    for (const auto& t : j.at("tensors")) {
      const auto data = t.at("data").get<std::vector<double>>();
      std::size_t expected = 1;
      for (const auto& d : t.at("shape")) expected *= d.get<std::size_t>();
      if (expected != data.size())
        throw FormatError("tensor '" + t.at("name").get<std::string>() + "' data does not match its shape");
      ck.params.insert(ck.params.end(), data.begin(), data.end());
    }
    return ck;
  });
}

Json metrics_to_json(const MetricReport& r) {
  return {{"delta1", r.delta1}, {"delta2", r.delta2}, {"delta3", r.delta3}, {"abs_rel", r.abs_rel},
          {"sq_rel", r.sq_rel}, {"rms", r.rms},       {"rms_log", r.rms_log}, {"n_valid", r.n_valid}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace sparsecl

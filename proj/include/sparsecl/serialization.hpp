#pragma once
// JSON encodings of catalogs, plans, scheduler checkpoints, model
// checkpoints and metric reports. Parse errors raise FormatError.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sparsecl/curriculum.hpp"
#include "sparsecl/metrics.hpp"
#include "sparsecl/model.hpp"
#include "sparsecl/scheduler.hpp"

namespace sparsecl {

using Json = nlohmann::ordered_json;

/// {target:[h,w], entries:[{index, iterations, kernel:[k,k]|null, pooled:[h,w], member:[...]}]}
/// The identity entry's member list is ["*"].
Json catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const Json& j);

/// {lambda, mode, syllabuses:[catalog indices], patience:[...], advance_on_epoch_end}
Json plan_to_json(const CurriculumPlan& plan);
/// Resolves the catalog indices against `catalog`; validates the plan.
CurriculumPlan plan_from_json(const Json& j, const Catalog& catalog);

Json state_to_json(const SchedulerState& state);
SchedulerState state_from_json(const Json& j);

struct ModelCheckpoint {
  ModelConfig config;
  TargetSize target;
  std::vector<double> params;
};

/// {format:"sparsecl-toy-model", version:1, target:[h,w], config:{...},
///  tensors:[{name, shape, data}]}
Json checkpoint_to_json(const ToyModel& model, TargetSize target);
ModelCheckpoint checkpoint_from_json(const Json& j);

Json metrics_to_json(const MetricReport& r);

Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace sparsecl

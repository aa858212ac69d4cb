#pragma once
// Dataset directory layout:
//   index.csv          id,height,width
//   images/<id>.png    8-bit RGB (optional)
//   depth/<id>.png     16-bit sparse ground truth
//   dense/<id>.png     16-bit dense reference (synthetic sets only, optional)

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsecl/depth_map.hpp"

namespace sparsecl {

struct Dataset {
  std::vector<SampleRecord> samples;
  /// Parallel to `samples` when the dense reference maps were loaded.
  std::vector<DepthMap> dense;

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }
};

struct DatasetLoadOptions {
  bool images = true;
  bool dense = false;
};

/// Throws DataError for missing files, inconsistent index rows or an empty set.
Dataset load_dataset(const std::filesystem::path& root, const DatasetLoadOptions& opts = {});

/// Writes index.csv, depth/ and (when present) images/ and dense/.
void write_dataset(const std::filesystem::path& root, const Dataset& dataset);

}  // namespace sparsecl

#include "sparsecl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sparsecl/depth_io.hpp"
#include "sparsecl/errors.hpp"

namespace sparsecl {
namespace {

struct IndexRow {
  std::string id;
  std::size_t height;
  std::size_t width;
};

std::vector<IndexRow> read_index(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("dataset index '" + file.string() + "' not found");
  std::string line;
  if (!std::getline(in, line) || line.rfind("id,height,width", 0) != 0)
    throw FormatError("'" + file.string() + "': header must be 'id,height,width'");
  std::vector<IndexRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, h, w;
    if (!std::getline(ls, id, ',') || !std::getline(ls, h, ',') || !std::getline(ls, w))
      throw FormatError("'" + file.string() + "' line " + std::to_string(line_no) + ": expected 3 columns");
    try {
      rows.push_back({id, std::stoul(h), std::stoul(w)});
    } catch (const std::logic_error&) {
      throw FormatError("'" + file.string() + "' line " + std::to_string(line_no) + ": bad size");
    }
  }
  return rows;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& root, const DatasetLoadOptions& opts) {
  Dataset ds;
  for (const auto& row : read_index(root / "index.csv")) {
    DepthMap gt = load_depth_png(root / "depth" / (row.id + ".png"));
    if (gt.height() != row.height || gt.width() != row.width)
      throw DataError("sample '" + row.id + "': depth is " + to_string(gt.size()) + " but index says " +
                      to_string({row.height, row.width}));
    std::optional<RgbImage> image;
    const auto image_path = root / "images" / (row.id + ".png");
    if (opts.images && std::filesystem::exists(image_path)) image = load_rgb_png(image_path);
    if (opts.dense) ds.dense.push_back(load_depth_png(root / "dense" / (row.id + ".png")));
    ds.samples.push_back({row.id, std::move(image), std::move(gt)});
  }
  if (ds.empty()) throw DataError("dataset '" + root.string() + "' has no samples");
  return ds;
}

void write_dataset(const std::filesystem::path& root, const Dataset& dataset) {
  namespace fs = std::filesystem;
  fs::create_directories(root / "depth");
  const bool any_image =
      std::any_of(dataset.samples.begin(), dataset.samples.end(), [](const auto& s) { return s.image.has_value(); });
  if (any_image) fs::create_directories(root / "images");
  if (!dataset.dense.empty()) {
    if (dataset.dense.size() != dataset.samples.size())
      throw DataError("dense reference count does not match sample count");
    fs::create_directories(root / "dense");
  }

  std::ofstream index(root / "index.csv");
  if (!index) throw DataError("cannot write '" + (root / "index.csv").string() + "'");
  index << "id,height,width\n";
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const auto& s = dataset.samples[i];
    save_depth_png(s.ground_truth, root / "depth" / (s.id + ".png"));
    if (s.image) save_rgb_png(*s.image, root / "images" / (s.id + ".png"));
    if (!dataset.dense.empty()) save_depth_png(dataset.dense[i], root / "dense" / (s.id + ".png"));
    index << s.id << ',' << s.ground_truth.height() << ',' << s.ground_truth.width() << '\n';
  }
}

}  // namespace sparsecl

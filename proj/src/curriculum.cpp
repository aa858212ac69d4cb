#include "sparsecl/curriculum.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

#include "sparsecl/dilation.hpp"
#include "sparsecl/errors.hpp"

namespace sparsecl {
namespace {

struct ReferenceRow {
  std::size_t iterations, kernel, height, width;
  std::uint8_t membership;
};

constexpr std::uint8_t A = kMemberA, B = kMemberB, C = kMemberC;

// (iterations, kernel) -> pooled size at 256x512, with memberships.
constexpr ReferenceRow kReference[] = {
    {8, 2, 1, 2, 0},          {7, 2, 2, 4, 0},          {4, 3, 3, 6, A | B},
    {6, 2, 4, 8, 0},          {2, 7, 5, 10, B},         {1, 37, 6, 13, A},
    {2, 6, 7, 14, B | C},     {5, 2, 8, 16, 0},         {3, 3, 9, 18, A | B},
    {2, 5, 10, 20, C},        {1, 22, 11, 23, B},       {1, 20, 12, 25, A},
    {1, 19, 13, 26, B | C},   {1, 18, 14, 28, 0},       {1, 17, 15, 30, A | B},
    {4, 2, 16, 32, 0},        {1, 15, 17, 34, B | C},   {1, 14, 18, 36, A},
    {1, 13, 19, 39, B},       {1, 12, 21, 42, B},       {1, 11, 23, 46, A | B | C},
    {1, 10, 25, 51, 0},       {2, 3, 28, 56, B},        {3, 2, 32, 64, A},
    {1, 7, 36, 73, B | C},    {1, 6, 42, 85, A},        {1, 5, 51, 102, B},
    {2, 2, 64, 128, C},       {1, 3, 85, 170, A | B | C}, {1, 2, 128, 256, C},
    {0, 0, 256, 512, kMemberAlways},
};

constexpr TargetSize kReferenceTarget{256, 512};

std::size_t floor_log2(std::size_t m) {
  std::size_t r = 0;
  while (m >>= 1) ++r;
  return r;
}

void tag_by_subsampling(Catalog& catalog) {
  const std::size_t n = catalog.entries.size();
  const auto tag = [&](std::size_t count, std::uint8_t flag) {
    if (count >= n) {
      for (auto& e : catalog.entries) e.membership |= flag;
      return;
    }
    for (std::size_t j = 0; j < count; ++j) {
      // Evenly spaced over [0, n-1], both ends included.
      const std::size_t idx = (j * (n - 1) + (count - 1) / 2) / (count - 1);
      catalog.entries[idx].membership |= flag;
    }
  };
  tag(11, kMemberA);
  tag(16, kMemberB);
  tag(10, kMemberC);
}

CurriculumSelection finish_selection(const Catalog& catalog, std::vector<std::size_t> indices) {
  const std::size_t identity = catalog.entries.size() - 1;
  if (std::find(indices.begin(), indices.end(), identity) == indices.end()) indices.push_back(identity);
  CurriculumSelection sel;
  sel.indices = std::move(indices);
  for (std::size_t i : sel.indices) sel.syllabuses.push_back(catalog.entries[i].syllabus);
  return sel;
}

}  // namespace

Catalog enumerate_syllabuses(TargetSize target) {
  if (target.height < 2 || target.width < 2)
    throw ConfigError("catalog target must be at least 2x2, got " + to_string(target));
  const std::size_t m = std::min(target.height, target.width);
  const bool short_is_height = target.height <= target.width;
  const std::size_t max_iterations = floor_log2(m);

  Catalog catalog{target, {}};
  std::set<std::size_t> seen;  // pooled extent along the short axis
  for (std::size_t k = 2; k <= m; ++k) {
    for (std::size_t i = 1; i <= max_iterations; ++i) {
      const auto pooled = iterated_pool_size(target, i, k);
      if (!pooled) break;  // deeper iterations only shrink further
      const std::size_t key = short_is_height ? pooled->height : pooled->width;
      if (!seen.insert(key).second) continue;
      catalog.entries.push_back({0, {i, k, *pooled}, kMemberNone});
    }
  }
  std::stable_sort(catalog.entries.begin(), catalog.entries.end(), [](const auto& a, const auto& b) {
    const auto aa = a.syllabus.pooled.area(), ba = b.syllabus.pooled.area();
    return aa != ba ? aa < ba : a.syllabus.pooled.height < b.syllabus.pooled.height;
  });
  catalog.entries.push_back({0, identity_syllabus(target), kMemberAlways});
  for (std::size_t i = 0; i < catalog.entries.size(); ++i) catalog.entries[i].index = i;

  if (target == kReferenceTarget) {
    const Catalog& ref = canonical_catalog_256x512();
    for (auto& e : catalog.entries)
      for (const auto& r : ref.entries)
        if (r.syllabus.pooled == e.syllabus.pooled) e.membership = r.membership;
  } else {
    tag_by_subsampling(catalog);
  }
  return catalog;
}

const Catalog& canonical_catalog_256x512() {
  static const Catalog catalog = [] {
    Catalog c{kReferenceTarget, {}};
    std::size_t index = 0;
    for (const auto& r : kReference)
      c.entries.push_back({index++, {r.iterations, r.kernel, {r.height, r.width}}, r.membership});
    return c;
  }();
  return catalog;
}

std::vector<std::size_t> inconsistent_entries(const Catalog& catalog) {
  std::vector<std::size_t> bad;
  for (const auto& e : catalog.entries) {
    const auto& s = e.syllabus;
    const auto recomputed = s.is_identity() ? std::optional<TargetSize>(catalog.target)
                                            : iterated_pool_size(catalog.target, s.iterations, s.kernel);
    if (!recomputed || *recomputed != s.pooled) bad.push_back(e.index);
  }
  return bad;
}

CurriculumName parse_curriculum_name(const std::string& name) {
  if (name == "A" || name == "a") return CurriculumName::A;
  if (name == "B" || name == "b") return CurriculumName::B;
  if (name == "C" || name == "c") return CurriculumName::C;
  if (name == "full") return CurriculumName::full;
  if (name == "none") return CurriculumName::none;
  throw ConfigError("unknown curriculum '" + name + "' (A|B|C|full|none or index list)");
}

std::string to_string(CurriculumName name) {
  switch (name) {
    case CurriculumName::A: return "A";
    case CurriculumName::B: return "B";
    case CurriculumName::C: return "C";
    case CurriculumName::full: return "full";
    case CurriculumName::none: return "none";
  }
  return "?";
}

CurriculumSelection select_curriculum(const Catalog& catalog, CurriculumName name) {
  if (catalog.entries.empty()) throw ConfigError("cannot select a curriculum from an empty catalog");
  std::uint8_t flag = 0;
  switch (name) {
    case CurriculumName::A: flag = kMemberA; break;
    case CurriculumName::B: flag = kMemberB; break;
    case CurriculumName::C: flag = kMemberC; break;
    case CurriculumName::full: break;  // every entry
    case CurriculumName::none: flag = 0; break;
  }
  std::vector<std::size_t> indices;
  for (const auto& e : catalog.entries)
    if (name == CurriculumName::full || (e.membership & flag)) indices.push_back(e.index);
  return finish_selection(catalog, std::move(indices));
}

CurriculumSelection select_curriculum(const Catalog& catalog, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ConfigError("curriculum selection is empty");
  for (std::size_t i : indices)
    if (i >= catalog.entries.size())
      throw ConfigError("curriculum index " + std::to_string(i) + " outside catalog of " +
                        std::to_string(catalog.entries.size()) + " entries");
  return finish_selection(catalog, {indices.begin(), indices.end()});
}

std::string syllabus_label(const SyllabusSpec& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zux(%zu,%zu)", s.iterations, s.kernel, s.kernel);
  return buf;
}

std::vector<DensityPoint> density_profile(const DepthMap& map, const Catalog& catalog, TargetSize size) {
  std::vector<DensityPoint> out;
  out.reserve(catalog.entries.size());
  for (const auto& e : catalog.entries)
    out.push_back({e.index, e.syllabus, density(dilate(map, e.syllabus, size))});
  return out;
}

void write_density_profile_csv(std::ostream& out, std::span<const DensityPoint> profile) {
  out << "index,iterations,kernel,density\n";
  char buf[64];
  for (const auto& p : profile) {
    std::snprintf(buf, sizeof buf, "%.17g", p.density);
    out << p.index << ',' << p.syllabus.iterations << ',' << p.syllabus.kernel << ',' << buf << '\n';
  }
}

}  // namespace sparsecl

#pragma once
// Syllabus catalogs: enumeration of distinct pooled resolutions for a target
// size, the reference 256x512 catalog, and named curricula drawn from it.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sparsecl/depth_map.hpp"
#include "sparsecl/syllabus.hpp"

namespace sparsecl {

/// Curriculum membership flags of a catalog entry.
enum Membership : std::uint8_t {
  kMemberNone = 0,
  kMemberA = 1 << 0,
  kMemberB = 1 << 1,
  kMemberC = 1 << 2,
  kMemberAlways = 1 << 3,  // identity entry; part of every curriculum
};

struct CatalogEntry {
  std::size_t index = 0;
  SyllabusSpec syllabus;
  std::uint8_t membership = kMemberNone;

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

/// Entries sorted by pooled area, ascending; the identity syllabus is last.
struct Catalog {
  TargetSize target;
  std::vector<CatalogEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  const CatalogEntry& operator[](std::size_t i) const { return entries.at(i); }
  friend bool operator==(const Catalog&, const Catalog&) = default;
};

/// Sweeps kernel k in [2, m] (outer) and iterations i in [1, floor(log2 m)]
/// (inner), m = min(target.height, target.width), keeping the first (k, i)
/// that produces each distinct pooled extent along the short axis. The
/// identity syllabus is appended and entries are sorted by pooled area.
///
/// Memberships: for 256x512 they are copied from the reference catalog; for
/// other targets A/B/C are evenly spaced subsamples of 11/16/10 entries.
/// Throws ConfigError for targets smaller than 2x2.
Catalog enumerate_syllabuses(TargetSize target);

/// The 31-entry reference catalog for 256x512 with its literal (iterations,
/// kernel) pairs and A/B/C memberships.
const Catalog& canonical_catalog_256x512();

/// Recomputes every entry's pooled size from (iterations, kernel). Returns the
/// indices whose stored size disagrees (empty when consistent).
std::vector<std::size_t> inconsistent_entries(const Catalog& catalog);

enum class CurriculumName { A, B, C, full, none };

/// Accepts "A", "B", "C", "full", "none" (case-insensitive for A/B/C).
CurriculumName parse_curriculum_name(const std::string& name);
std::string to_string(CurriculumName name);

struct CurriculumSelection {
  std::vector<std::size_t> indices;  // catalog indices in training order
  std::vector<SyllabusSpec> syllabuses;
};

/// Entries tagged with `name`, in catalog order, with the identity entry
/// appended when absent. `none` selects only the identity entry.
CurriculumSelection select_curriculum(const Catalog& catalog, CurriculumName name);

/// Explicit catalog indices, order kept, identity appended when absent.
/// Throws ConfigError for an empty list or an out-of-range index.
CurriculumSelection select_curriculum(const Catalog& catalog, std::span<const std::size_t> indices);

/// "4x(3,3)" style label; identity is "0x(0,0)".
std::string syllabus_label(const SyllabusSpec& s);

struct DensityPoint {
  std::size_t index;
  SyllabusSpec syllabus;
  double density;
};

/// Density of dilate(map, entry, size) for every catalog entry.
std::vector<DensityPoint> density_profile(const DepthMap& map, const Catalog& catalog, TargetSize size);

/// CSV "index,iterations,kernel,density"; kernel is the square side (0 for identity).
void write_density_profile_csv(std::ostream& out, std::span<const DensityPoint> profile);

}  // namespace sparsecl

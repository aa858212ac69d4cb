#pragma once

#include <cstddef>
#include <optional>

#include "sparsecl/depth_map.hpp"

namespace sparsecl {

/// One syllabus: `iterations` rounds of non-overlapping square max pooling
/// with side `kernel`. iterations == 0 is the identity syllabus (kernel 0).
struct SyllabusSpec {
  std::size_t iterations = 0;
  std::size_t kernel = 0;
  TargetSize pooled;  // raster size before resizing back to the target

  bool is_identity() const noexcept { return iterations == 0; }
  friend bool operator==(const SyllabusSpec&, const SyllabusSpec&) = default;
};

/// Size after applying the pool `iterations` times, floor-dividing each axis
/// at every step. nullopt when any step would drop below 1x1.
std::optional<TargetSize> iterated_pool_size(TargetSize input, std::size_t iterations,
                                             std::size_t kernel);

/// Builds a syllabus for `target`; throws DegeneratePoolError when degenerate.
SyllabusSpec make_syllabus(TargetSize target, std::size_t iterations, std::size_t kernel);

inline SyllabusSpec identity_syllabus(TargetSize target) { return {0, 0, target}; }

}  // namespace sparsecl

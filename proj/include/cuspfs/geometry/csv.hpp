#pragma once

#include <ostream>

#include "cuspfs/geometry/tensor.hpp"

namespace cuspfs::geometry {

/// One row per node: coordinates followed by every component.
void write_csv(std::ostream& os, const TensorField& field);

}  // namespace cuspfs::geometry

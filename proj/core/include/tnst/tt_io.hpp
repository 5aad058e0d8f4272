#pragma once

#include <filesystem>
#include <iosfwd>

#include "tnst/tt_tensor.hpp"

namespace tnst {

/// Binary layout: magic "TNSTTT01", then for each of the four cores the
/// uint64 triple (r0, n, r1) followed by r0 * n * r1 little-endian float64
/// values in core storage order.
void write_tt(std::ostream& out, const TTTensor& t);
TTTensor read_tt(std::istream& in);

void save_tt(const std::filesystem::path& path, const TTTensor& t);
TTTensor load_tt(const std::filesystem::path& path);

}  // namespace tnst

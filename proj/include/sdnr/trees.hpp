#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sdnr/network.hpp"

namespace sdnr {

using BigCount = boost::multiprecision::cpp_int;

/// Number of radial configurations: spanning trees of the all-closed graph
/// that contain every non-switchable branch. Computed exactly as the
/// determinant of the reduced Laplacian (Bareiss elimination).
BigCount count_spanning_trees(const Network& net);

/// Calls `visit` once per radial configuration with a closed mask indexed by
/// branch index. Enumeration order is deterministic (include-before-exclude
/// over ascending branch id). Returns the number of trees visited.
std::uint64_t enumerate_spanning_trees(const Network& net,
                                       const std::function<void(std::span<const std::uint8_t>)>& visit);

}  // namespace sdnr

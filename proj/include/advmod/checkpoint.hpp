#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "advmod/network.hpp"

namespace advmod {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/**
 * Model checkpoint: a JSON document with role, block length, output
 * activation, and the ordered layer descriptors with flat row-major
 * weight/bias arrays. Doubles are written as shortest-roundtrip decimals,
 * so save/load round-trips bit-exactly.
 */
void save_network(const Network& net, const std::filesystem::path& path);

/// Throws CheckpointError on a missing, unparseable, or malformed file.
Network load_network(const std::filesystem::path& path);

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

}  // namespace advmod

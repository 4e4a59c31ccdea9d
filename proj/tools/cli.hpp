#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace chm::cli {

using Json = nlohmann::ordered_json;

/// JSON text with keys in insertion order and every float printed with 17
/// significant digits, so identical records give identical bytes.
std::string dump(const Json& j, int indent = 2);

/// Runs one invocation; args excludes the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from CHMOD_THREADS, else the hardware concurrency, at least 1.
unsigned worker_count();

}  // namespace chm::cli

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace geolab::cli {

enum ExitCode : int { ok = 0, failure = 1, usage = 2, violation = 3, certification = 4 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// SHA-1 of "blob <size>\0" + content, hex encoded (what `git hash-object` prints).
std::string git_blob_sha1(const std::string& content);

// GEODESIC_LAB_CACHE if set, else the given fallback.
std::filesystem::path cache_dir(const std::string& fallback);

}  // namespace geolab::cli

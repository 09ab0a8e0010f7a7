#pragma once

#include <string>

namespace dynsc {

// FIPS 180-4 SHA-256, hex digest. Used for manifest content hashes only.
std::string sha256_hex(const std::string& data);

}  // namespace dynsc

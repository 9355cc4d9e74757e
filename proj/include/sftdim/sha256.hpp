#pragma once

#include <string>
#include <string_view>

namespace sftdim {

// FIPS 180-4 SHA-256, hex digest. Used for config content hashes.
std::string sha256_hex(std::string_view data);

}  // namespace sftdim

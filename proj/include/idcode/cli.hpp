#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace idcode::cli {

// Lowercase hex rendering of a byte string, and its inverse. from_hex throws
// std::invalid_argument on odd length or a non-hex character.
std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

// Command dispatch for keygen / tag / verify / collide / bench / send /
// listen. Returns the process exit code: 0 on success (for verify: accept),
// 1 for a verify reject, 2 for malformed input or any runtime failure.
int run_cli(int argc, const char* const* argv);

}  // namespace idcode::cli

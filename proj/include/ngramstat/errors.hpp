#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ngramstat {

// Bad configuration or misuse of an API. CLI maps this to exit code 2.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input held fewer symbols than one window.
struct empty_input_error : usage_error {
    using usage_error::usage_error;
};

// The sketch ran out of hash bits: the level would have to exceed the hash
// width to get the buffer back under capacity. Carries the partial estimate
// so callers can still report it. CLI maps runtime errors to exit code 3.
struct level_exhaustion_error : std::runtime_error {
    level_exhaustion_error(uint32_t at_level, uint64_t held, double partial)
        : std::runtime_error("sketch level exhausted at t=" + std::to_string(at_level) +
                             " with " + std::to_string(held) +
                             " buffered keys; hash width too small for this stream"),
          level(at_level), buffered(held), partial_estimate(partial) {}

    uint32_t level;
    uint64_t buffered;
    double partial_estimate;
};

// The exact tabulation would exceed its configured key cap.
struct memory_guard_error : std::runtime_error {
    explicit memory_guard_error(uint64_t key_cap)
        : std::runtime_error("exact tabulation exceeds the configured cap of " +
                             std::to_string(key_cap) + " distinct keys"),
          cap(key_cap) {}

    uint64_t cap;
};

// An estimate was requested from a state where it has no value
// (e.g. entropy of an empty buffer).
struct undefined_estimate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed multi-byte input in code-point mode.
struct decode_error : std::runtime_error {
    decode_error(const std::string& what, uint64_t offset)
        : std::runtime_error(what + " at byte offset " + std::to_string(offset)),
          byte_offset(offset) {}

    uint64_t byte_offset;
};

}  // namespace ngramstat

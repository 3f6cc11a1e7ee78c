#pragma once

#include <string>
#include <string_view>

#include "nvamp/lang/value.hpp"

namespace nvamp {

/// Rendering of an absent/null observation.
inline constexpr std::string_view kAbsent = "\xE2\x88\x85";  // U+2205

/// Canonical rendering of an observed value: integers in decimal, doubles in
/// shortest round-trip form ("NaN" for every NaN), null as U+2205, strings
/// with control characters escaped, object renderings scrubbed of
/// identity-hash tokens.
std::string render_value(const lang::Value& v);

/// Escapes control characters and backslashes so a value fits on one
/// tab-separated trace line.
std::string escape_control(std::string_view s);

/// Replaces "@<lowercase hex>" and standalone runs of 8-16 hex digits with
/// "@ID".
std::string scrub_identity(std::string_view s);

/// Builtin textual rendering of a value (no user toString involved).
std::string default_display(const lang::Value& v);

}  // namespace nvamp

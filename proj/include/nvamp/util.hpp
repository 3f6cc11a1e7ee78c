#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace nvamp {

/// 64-bit FNV-1a. Used for stable content keys and seed derivation; unlike
/// std::hash its output is identical on every platform.
std::uint64_t fnv1a(std::string_view data,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t v);

/// Derives an independent generator for a named stream, so results do not
/// depend on the order in which streams are consumed.
std::mt19937_64 derive_rng(std::uint64_t seed, std::string_view stream);

/// Uniform integer in [0, bound) by rejection sampling. std distributions are
/// implementation-defined, this is not.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_below(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

std::vector<char32_t> utf8_decode(std::string_view s);
std::string utf8_encode(const std::vector<char32_t>& cps);
void utf8_append(std::string& out, char32_t cp);

/// Shortest round-trip decimal rendering; NaN and infinities spelled out.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);
/// Writes only when the content differs, so unchanged outputs keep their mtime.
bool write_file_if_changed(const std::filesystem::path& p,
                           std::string_view content);

/// Files under `dir` (recursive) with the given extension, sorted by path.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              std::string_view extension);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool contains_ci(std::string_view haystack, std::string_view needle);

}  // namespace nvamp

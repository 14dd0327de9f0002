#pragma once

// Command-line front end: flag parsing, budgets, seeds and report emission.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fgw/free_words.hpp"

namespace fgw::cli {

enum class Format { json, csv };

/// Flags shared by every subcommand.
struct RunConfig {
    int k = 2;
    int max_degree = 6;
    std::optional<int> radius;
    std::uint64_t budget = 1000;
    std::uint64_t seed = 0;
    int threads = 0;
    Format format = Format::json;
    std::string output;
    std::uint64_t sphere_cap = kDefaultSphereCap;
    /// Empty: the subcommand's default families.
    std::string family;
};

/// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kViolation = 1;
inline constexpr int kUsage = 2;

/// args[0] is the program name. Reports go to `out` (or --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fgw::cli

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccsemi/types.hpp"

namespace ccsemi {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Strict decimal parse of the whole field; nullopt on failure.
std::optional<double> parse_double(std::string_view field);

struct LabeledTable {
    std::vector<std::string> covariate_names;
    std::vector<LabeledObservation> rows;
};

struct UnlabeledTable {
    /// Empty when the input had no header at all.
    std::vector<std::string> covariate_names;
    std::vector<std::vector<double>> rows;
};

/// Header `y,x1,...,xp`, then one row per observation with y in {0, 1}.
/// Throws ParseError with the 1-based line number.
LabeledTable parse_labeled_csv(std::string_view text);
/// Header `x1,...,xp`. Empty input yields an empty table.
UnlabeledTable parse_unlabeled_csv(std::string_view text);

LabeledTable read_labeled_csv(const std::filesystem::path& path);
UnlabeledTable read_unlabeled_csv(const std::filesystem::path& path);

std::string labeled_csv(const std::vector<LabeledObservation>& rows);
std::string unlabeled_csv(const std::vector<std::vector<double>>& rows, std::size_t dim);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace ccsemi

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "reflectolab/path.hpp"

namespace reflectolab {

/// Decimal text with 17 significant digits; parses back to the same bits.
std::string format_double(double x);
double parse_double(std::string_view text);

/// CSV with header `t,x_1,...,x_J`, comma separated.
std::string path_to_csv(const Path& path);
Path path_from_csv(std::string_view text);

/// JSON envelope {"grid": [...], "values": [[...], ...], "dim": J, "meta": {...}}.
nlohmann::json path_to_json(const Path& path, const nlohmann::json& meta = nlohmann::json::object());
Path path_from_json(const nlohmann::json& doc);

void write_text_file(const std::filesystem::path& file, std::string_view contents);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace reflectolab

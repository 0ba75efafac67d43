#include "reflectolab/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

#include "reflectolab/errors.hpp"

namespace reflectolab {

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double x = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw DomainError("not a number: '" + std::string(text) + "'");
  return x;
}

std::string path_to_csv(const Path& path) {
  std::string out = "t";
  for (std::size_t k = 0; k < path.dim(); ++k) out += ",x_" + std::to_string(k + 1);
  out += '\n';
  for (std::size_t i = 0; i < path.size(); ++i) {
    out += format_double(path.time(i));
    for (double x : path.row(i)) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

namespace {
std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}
}  // namespace

Path path_from_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n'))
    if (!line.empty() && line != "\r") lines.push_back(line);
  if (lines.empty()) throw DomainError("empty CSV");
  const auto header = split(lines.front(), ',');
  if (header.size() < 2 || header[0] != "t") throw DomainError("CSV header must start with t");
  const std::size_t dim = header.size() - 1;
  std::vector<double> times;
  std::vector<double> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != dim + 1) throw DomainError("CSV row " + std::to_string(i) + " has wrong width");
    times.push_back(parse_double(cells[0]));
    for (std::size_t k = 1; k <= dim; ++k) values.push_back(parse_double(cells[k]));
  }
  return Path(std::move(times), std::move(values), dim);
}

nlohmann::json path_to_json(const Path& path, const nlohmann::json& meta) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto r = path.row(i);
    values.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"grid", path.times()}, {"values", std::move(values)}, {"dim", path.dim()}, {"meta", meta}};
}

Path path_from_json(const nlohmann::json& doc) {
  try {
    const auto dim = doc.at("dim").get<std::size_t>();
    auto times = doc.at("grid").get<std::vector<double>>();
    std::vector<double> values;
    values.reserve(times.size() * dim);
    for (const auto& row : doc.at("values")) {
      auto r = row.get<std::vector<double>>();
      if (r.size() != dim) throw DomainError("JSON path row has wrong dimension");
      values.insert(values.end(), r.begin(), r.end());
    }
    return Path(std::move(times), std::move(values), dim);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed path JSON: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& file, std::string_view contents) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace reflectolab

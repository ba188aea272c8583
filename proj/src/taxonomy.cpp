#include "riskplan/taxonomy.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "riskplan/error.hpp"
#include "text_util.hpp"

namespace riskplan {

CostTable::CostTable(std::vector<CostEntry> entries, double impassable_cost)
    : entries_(std::move(entries)), impassable_cost_(impassable_cost) {
  if (entries_.empty()) throw TaxonomyError("cost table is empty");
  if (entries_.size() > 0xFFFF) throw TaxonomyError("too many classes");
  if (!std::isfinite(impassable_cost_) || impassable_cost_ < 0.0)
    throw TaxonomyError("impassable cost must be finite and >= 0");
  std::set<std::string> names;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!std::isfinite(e.cost) || e.cost < 0.0)
      throw TaxonomyError("class " + std::to_string(i) + " (" + e.name + ") has invalid cost");
    if (!names.insert(e.name).second) throw TaxonomyError("duplicate class name: " + e.name);
  }
}

const CostEntry& CostTable::entry(ClassId id) const {
  if (id.index >= entries_.size())
    throw TaxonomyError("class index " + std::to_string(id.index) + " out of range for " +
                        std::to_string(entries_.size()) + "-class table");
  return entries_[id.index];
}

ClassId CostTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name == name) return ClassId{static_cast<std::uint16_t>(i)};
  throw TaxonomyError("unknown class name: " + name);
}

CostTable CostTable::scaled(double factor) const {
  if (!(factor > 0.0)) throw TaxonomyError("scale factor must be positive");
  auto copy = entries_;
  for (auto& e : copy) e.cost *= factor;
  return CostTable(std::move(copy), impassable_cost_ * factor);
}

CostTable builtin_aeroscapes_table() {
  // Colors follow the Aeroscapes label palette.
  return CostTable({
      {"Background", 20, {0, 0, 0}, false},
      {"Person", 140, {192, 128, 128}, false},
      {"Bike", 130, {0, 128, 0}, false},
      {"Car", 90, {128, 128, 128}, false},
      {"Drone", 7, {128, 0, 0}, false},
      {"Boat", 80, {0, 0, 128}, false},
      {"Animal", 120, {192, 0, 128}, false},
      {"Obstacle", 100, {192, 0, 0}, false},
      {"Construction", 110, {192, 128, 0}, false},
      {"Vegetation", 5, {0, 64, 0}, false},
      {"Road", 1, {128, 128, 0}, false},
      {"Sky", 150, {0, 128, 128}, false},
  });
}

double cost_of(const CostTable& table, ClassId id) {
  const auto& e = table.entry(id);
  return e.impassable ? table.impassable_cost() : e.cost;
}

namespace {

constexpr std::string_view kHeader = "index,name,cost,r,g,b,impassable";

[[noreturn]] void fail(std::size_t line_no, const std::string& why) {
  throw ParseError("cost table line " + std::to_string(line_no) + ": " + why);
}

std::uint8_t parse_channel(std::string_view s, std::size_t line_no) {
  auto v = detail::parse_int<int>(s);
  if (!v || *v < 0 || *v > 255) fail(line_no, "color channel must be an integer in [0,255]");
  return static_cast<std::uint8_t>(*v);
}

}  // namespace

CostTable parse_cost_table(const std::string& text) {
  auto lines = detail::split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kHeader) fail(1, "expected header '" + std::string(kHeader) + "'");

  std::vector<CostEntry> entries;
  std::set<std::string, std::less<>> names;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto fields = detail::split(lines[i], ',');
    if (fields.size() != 7) fail(line_no, "expected 7 fields, got " + std::to_string(fields.size()));

    auto index = detail::parse_int<std::size_t>(fields[0]);
    if (!index || *index != entries.size())
      fail(line_no, "index must be " + std::to_string(entries.size()));

    CostEntry e;
    e.name = std::string(fields[1]);
    if (e.name.empty()) fail(line_no, "empty class name");
    if (!names.insert(e.name).second) fail(line_no, "duplicate class name '" + e.name + "'");

    auto cost = detail::parse_double(fields[2]);
    if (!cost || !std::isfinite(*cost)) fail(line_no, "cost is not a finite number");
    if (*cost < 0.0) fail(line_no, "negative cost");
    e.cost = *cost;

    e.color = {parse_channel(fields[3], line_no), parse_channel(fields[4], line_no),
               parse_channel(fields[5], line_no)};

    if (fields[6] == "0" || fields[6] == "false")
      e.impassable = false;
    else if (fields[6] == "1" || fields[6] == "true")
      e.impassable = true;
    else
      fail(line_no, "impassable must be 0/1");
    entries.push_back(std::move(e));
  }
  if (entries.empty()) fail(lines.size(), "no class rows");
  return CostTable(std::move(entries));
}

CostTable load_cost_table(const std::filesystem::path& path) {
  return parse_cost_table(detail::read_file(path));
}

std::string format_cost_table(const CostTable& table) {
  std::ostringstream out;
  out << kHeader << '\n';
  const auto& entries = table.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    out << i << ',' << e.name << ',' << detail::format_exact(e.cost) << ',' << int(e.color.r)
        << ',' << int(e.color.g) << ',' << int(e.color.b) << ',' << (e.impassable ? 1 : 0)
        << '\n';
  }
  return out.str();
}

void save_cost_table(const CostTable& table, const std::filesystem::path& path) {
  for (const auto& e : table.entries())
    if (e.name.find_first_of(",\n") != std::string::npos)
      throw TaxonomyError("class name not representable in CSV: " + e.name);
  detail::write_file(path, format_cost_table(table));
}

}  // namespace riskplan

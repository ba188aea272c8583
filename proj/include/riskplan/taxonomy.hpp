#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace riskplan {

/// 0-based semantic class index. The Aeroscapes softmax table is 1-based;
/// softmax index k corresponds to ClassId{k - 1}.
struct ClassId {
  std::uint16_t index = 0;

  friend bool operator==(const ClassId&, const ClassId&) = default;
  friend auto operator<=>(const ClassId&, const ClassId&) = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct CostEntry {
  std::string name;
  double cost = 0.0;
  Rgb color;
  bool impassable = false;

  friend bool operator==(const CostEntry&, const CostEntry&) = default;
};

inline constexpr double kDefaultImpassableCost = 1e6;

/// Class-index -> (name, traversal cost, display color) mapping.
/// Immutable after construction.
class CostTable {
 public:
  /// Throws TaxonomyError if the entries violate the table invariants
  /// (non-empty, unique names, finite nonnegative costs).
  explicit CostTable(std::vector<CostEntry> entries,
                     double impassable_cost = kDefaultImpassableCost);

  std::size_t size() const { return entries_.size(); }
  const std::vector<CostEntry>& entries() const { return entries_; }
  const CostEntry& entry(ClassId id) const;
  double impassable_cost() const { return impassable_cost_; }

  bool is_impassable(ClassId id) const { return entry(id).impassable; }

  /// Index of the entry with this name; throws TaxonomyError if absent.
  ClassId find(const std::string& name) const;

  /// Same table with every cost multiplied by `factor` (> 0).
  CostTable scaled(double factor) const;

  friend bool operator==(const CostTable&, const CostTable&) = default;

 private:
  std::vector<CostEntry> entries_;
  double impassable_cost_;
};

/// The 12-class Aeroscapes table with its fixed hand-designed costs.
CostTable builtin_aeroscapes_table();

/// Traversal cost of `id`; the impassable surrogate for impassable classes.
double cost_of(const CostTable& table, ClassId id);

/// CSV: header `index,name,cost,r,g,b,impassable`, one row per class.
CostTable load_cost_table(const std::filesystem::path& path);
CostTable parse_cost_table(const std::string& text);
void save_cost_table(const CostTable& table, const std::filesystem::path& path);
std::string format_cost_table(const CostTable& table);

}  // namespace riskplan

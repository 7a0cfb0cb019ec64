#pragma once

#include "hudn/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hudn {

// 17 significant digits: shortest form that round-trips a double exactly.
std::string format_real(double v);
std::string format_int(long long v);
std::string format_u64(std::uint64_t v);

std::uint64_t fnv1a64(std::string_view bytes);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);  // throws input_error

// Sectioned key-value text format:
//   [section]
//   key = value
// Sections and keys keep insertion order so re-serialization is byte-stable.
class KvFile {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
  };

  Section& add_section(const std::string& name);
  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& name) const;

  std::string serialize() const;
  static KvFile parse(const std::string& text);  // throws input_error

  const std::vector<Section>& sections() const { return sections_; }

 private:
  const Section* find(const std::string& name) const;
  Section* find(const std::string& name);
  std::vector<Section> sections_;
};

// little-endian binary scalar helpers
void put_u32(std::string& out, std::uint32_t v);
void put_u64(std::string& out, std::uint64_t v);
void put_f64(std::string& out, double v);
std::uint32_t take_u32(std::string_view bytes, std::size_t& pos);
std::uint64_t take_u64(std::string_view bytes, std::size_t& pos);
double take_f64(std::string_view bytes, std::size_t& pos);

// minimal CSV support for the report pipeline (no quoting; values never
// contain commas here)
std::vector<std::vector<std::string>> read_csv(const std::string& path);

double parse_real(const std::string& s);       // throws input_error
long long parse_int(const std::string& s);     // throws input_error

}  // namespace hudn

#include "hudn/io_util.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hudn {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_int(long long v) { return std::to_string(v); }

std::string format_u64(std::uint64_t v) { return std::to_string(v); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open for write: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw input_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

KvFile::Section& KvFile::add_section(const std::string& name) {
  if (Section* s = find(name)) return *s;
  sections_.push_back(Section{name, {}});
  return sections_.back();
}

const KvFile::Section* KvFile::find(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

KvFile::Section* KvFile::find(const std::string& name) {
  for (auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

void KvFile::set(const std::string& section, const std::string& key, const std::string& value) {
  Section& s = add_section(section);
  for (auto& kv : s.entries) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  s.entries.emplace_back(key, value);
}

bool KvFile::has(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  if (!s) return false;
  for (const auto& kv : s->entries)
    if (kv.first == key) return true;
  return false;
}

bool KvFile::has_section(const std::string& name) const { return find(name) != nullptr; }

const std::string& KvFile::get(const std::string& section, const std::string& key) const {
  const Section* s = find(section);
  if (s) {
    for (const auto& kv : s->entries)
      if (kv.first == key) return kv.second;
  }
  throw input_error("missing key [" + section + "] " + key);
}

std::string KvFile::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double KvFile::get_real(const std::string& section, const std::string& key) const {
  return parse_real(get(section, key));
}

long long KvFile::get_int(const std::string& section, const std::string& key) const {
  return parse_int(get(section, key));
}

std::uint64_t KvFile::get_u64(const std::string& section, const std::string& key) const {
  const std::string& s = get(section, key);
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw input_error("bad integer: " + s);
    return v;
  } catch (const std::exception&) {
    throw input_error("bad integer: " + s);
  }
}

std::string KvFile::serialize() const {
  std::string out;
  for (const auto& s : sections_) {
    out += '[';
    out += s.name;
    out += "]\n";
    for (const auto& kv : s.entries) {
      out += kv.first;
      out += " = ";
      out += kv.second;
      out += '\n';
    }
  }
  return out;
}

KvFile KvFile::parse(const std::string& text) {
  KvFile f;
  Section* cur = nullptr;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = trim(std::string_view(text).substr(
        pos, (nl == std::string::npos ? text.size() : nl) - pos));
    ++lineno;
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw input_error("line " + std::to_string(lineno) + ": bad section header");
      std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (name.empty()) throw input_error("line " + std::to_string(lineno) + ": empty section");
      if (f.find(name)) throw input_error("duplicate section: " + name);
      cur = &f.add_section(name);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw input_error("line " + std::to_string(lineno) + ": expected key = value");
    if (!cur) throw input_error("line " + std::to_string(lineno) + ": entry before any section");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw input_error("line " + std::to_string(lineno) + ": empty key");
    for (const auto& kv : cur->entries)
      if (kv.first == key) throw input_error("duplicate key: " + key);
    cur->entries.emplace_back(key, value);
  }
  return f;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint32_t take_u32(std::string_view bytes, std::size_t& pos) {
  if (pos + 4 > bytes.size()) throw input_error("truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  pos += 4;
  return v;
}

std::uint64_t take_u64(std::string_view bytes, std::size_t& pos) {
  if (pos + 8 > bytes.size()) throw input_error("truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  pos += 8;
  return v;
}

double take_f64(std::string_view bytes, std::size_t& pos) {
  std::uint64_t bits = take_u64(bytes, pos);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::string text = read_text_file(path);
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, (nl == std::string::npos ? text.size() : nl) - pos);
    pos = (nl == std::string::npos) ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t p = 0;
    while (true) {
      std::size_t c = line.find(',', p);
      fields.push_back(line.substr(p, (c == std::string::npos ? line.size() : c) - p));
      if (c == std::string::npos) break;
      p = c + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double parse_real(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw input_error("bad number: " + s);
    return v;
  } catch (const input_error&) {
    throw;
  } catch (const std::exception&) {
    throw input_error("bad number: " + s);
  }
}

long long parse_int(const std::string& s) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw input_error("bad integer: " + s);
    return v;
  } catch (const input_error&) {
    throw;
  } catch (const std::exception&) {
    throw input_error("bad integer: " + s);
  }
}

}  // namespace hudn

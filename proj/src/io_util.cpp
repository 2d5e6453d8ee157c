#include "llamafur/io_util.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace llamafur::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::string content;
  in.seekg(0, std::ios::end);
  content.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0, std::ios::beg);
  in.read(content.data(), static_cast<std::streamsize>(content.size()));
  if (!in && content.size() > 0)
    throw std::runtime_error(path + ": read failed");
  return content;
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

void throw_parse_error(const std::string& path, std::size_t line,
                       const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

void throw_id_range_error(const std::string& path, std::size_t line,
                          std::uint64_t value, std::uint64_t limit) {
  throw std::out_of_range(path + ":" + std::to_string(line) + ": id " +
                          std::to_string(value) + " exceeds limit " +
                          std::to_string(limit));
}

bool LineScanner::next(std::string_view& line, std::size_t& line_no) {
  if (rest_.empty()) return false;
  ++line_no_;
  std::size_t eol = rest_.find('\n');
  if (eol == std::string_view::npos) {
    line = rest_;
    rest_ = {};
  } else {
    line = rest_.substr(0, eol);
    rest_ = rest_.substr(eol + 1);
  }
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  line_no = line_no_;
  return true;
}

static bool is_space(char c) { return c == ' ' || c == '\t'; }

std::string_view strip_comment(std::string_view line) {
  std::size_t hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
  while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
  return line;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    std::size_t pos = s.find(sep);
    if (pos == std::string_view::npos) {
      out.push_back(s);
      return out;
    }
    out.push_back(s.substr(0, pos));
    s = s.substr(pos + 1);
  }
}

std::uint64_t parse_uint(std::string_view field, const std::string& path,
                         std::size_t line_no, std::uint64_t limit) {
  std::uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec == std::errc::result_out_of_range)
    throw_id_range_error(path, line_no, ~0ull, limit);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw_parse_error(path, line_no,
                      "expected unsigned integer, got \"" +
                          std::string(field) + "\"");
  if (value > limit) throw_id_range_error(path, line_no, value, limit);
  return value;
}

double parse_real(std::string_view field, const std::string& path,
                  std::size_t line_no) {
  double value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw_parse_error(path, line_no,
                      "expected real number, got \"" + std::string(field) +
                          "\"");
  return value;
}

void append_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

std::uint64_t read_varint(const char*& p, const char* end,
                          const std::string& path) {
  std::uint64_t v = 0;
  int shift = 0;
  while (p != end) {
    std::uint8_t byte = static_cast<std::uint8_t>(*p++);
    if (shift >= 64) throw std::runtime_error(path + ": varint overflow");
    v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
    if ((byte & 0x80) == 0) return v;
    shift += 7;
  }
  throw std::runtime_error(path + ": truncated varint");
}

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t read_u32(const char*& p, const char* end, const std::string& path) {
  if (end - p < 4) throw std::runtime_error(path + ": truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(*p++)) << (8 * i);
  return v;
}

std::uint64_t read_u64(const char*& p, const char* end, const std::string& path) {
  if (end - p < 8) throw std::runtime_error(path + ": truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(*p++)) << (8 * i);
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace llamafur::io

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace llamafur::io {

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

// FNV-1a, used for input digests in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

[[noreturn]] void throw_parse_error(const std::string& path, std::size_t line,
                                    const std::string& msg);
[[noreturn]] void throw_id_range_error(const std::string& path,
                                       std::size_t line, std::uint64_t value,
                                       std::uint64_t limit);

// Iterates lines of an in-memory file, handling \n and \r\n.
class LineScanner {
 public:
  explicit LineScanner(std::string_view content) : rest_(content) {}
  bool next(std::string_view& line, std::size_t& line_no);

 private:
  std::string_view rest_;
  std::size_t line_no_ = 0;
};

// Drops everything from '#' on and trims surrounding whitespace.
std::string_view strip_comment(std::string_view line);

std::vector<std::string_view> split(std::string_view s, char sep);

// Unsigned field parsing; throws the errors above on garbage or overflow.
std::uint64_t parse_uint(std::string_view field, const std::string& path,
                         std::size_t line_no, std::uint64_t limit);
double parse_real(std::string_view field, const std::string& path,
                  std::size_t line_no);

// LEB128 varints for the packed binary formats.
void append_varint(std::string& out, std::uint64_t v);
std::uint64_t read_varint(const char*& p, const char* end,
                          const std::string& path);

void append_u32(std::string& out, std::uint32_t v);
void append_u64(std::string& out, std::uint64_t v);
std::uint32_t read_u32(const char*& p, const char* end, const std::string& path);
std::uint64_t read_u64(const char*& p, const char* end, const std::string& path);

// Shortest round-trip decimal form; keeps text artifacts reproducible.
std::string format_double(double v);

}  // namespace llamafur::io

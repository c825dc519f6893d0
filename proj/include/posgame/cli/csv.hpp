#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace posgame::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// 12 significant digits, '.' separator, independent of the C locale.
inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf.data(), res.ptr);
}

inline std::string format_number(std::size_t v) { return std::to_string(v); }
inline std::string format_number(long v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::string_view command, std::string_view config_hash) {
    out_ += "# posgame ";
    out_ += kToolVersion;
    out_ += " command=";
    out_ += command;
    out_ += " config=";
    out_ += config_hash;
    out_ += '\n';
  }

  void comment(std::string_view text) {
    out_ += "# ";
    out_ += text;
    out_ += '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out_ += ',';
      out_ += cells[k];
    }
    out_ += '\n';
  }

  const std::string& str() const noexcept { return out_; }

 private:
  std::string out_;
};

}  // namespace posgame::cli

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "esbas/core/errors.hpp"

// Versioned text format for learner parameter snapshots:
//
//   esbas-params 1
//   kind <linear-q|q-table>
//   <key> <value>           (one header field per line)
//   values <count>
//   <value> ...             (whitespace separated, shortest round-trip form)
//
// Doubles are written with std::to_chars so reading back yields the exact bits.

namespace esbas::params_io {

inline constexpr std::string_view kMagic = "esbas-params";
inline constexpr int kVersion = 1;

std::string format_double(double v);
double parse_double(std::string_view token);

struct Document {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<double> values;

  const std::string& field(std::string_view key) const;
};

std::string write(const Document& doc);
Document read(std::string_view text);

}  // namespace esbas::params_io

#include "esbas/algorithms/params_io.hpp"

#include <charconv>
#include <sstream>
#include <system_error>

namespace esbas::params_io {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw DataError("cannot format value");
  return std::string(buf, ptr);
}

double parse_double(std::string_view token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw DataError("bad numeric token in parameter file: " + std::string(token));
  }
  return v;
}

const std::string& Document::field(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return v;
  }
  throw DataError("parameter file lacks field: " + std::string(key));
}

std::string write(const Document& doc) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
  out += "kind " + doc.kind + "\n";
  for (const auto& [k, v] : doc.fields) out += k + " " + v + "\n";
  out += "values " + std::to_string(doc.values.size()) + "\n";
  for (std::size_t i = 0; i < doc.values.size(); ++i) {
    out += format_double(doc.values[i]);
    out += (i + 1 == doc.values.size()) ? "\n" : " ";
  }
  return out;
}

Document read(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw DataError("not an esbas parameter file");
  if (version != kVersion) {
    throw DataError("unsupported parameter file version " + std::to_string(version));
  }
  Document doc;
  std::string key;
  if (!(in >> key >> doc.kind) || key != "kind") throw DataError("parameter file lacks kind");
  while (in >> key) {
    if (key == "values") {
      std::size_t count = 0;
      if (!(in >> count)) throw DataError("bad value count");
      doc.values.reserve(count);
      std::string token;
      for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> token)) throw DataError("parameter file truncated");
        doc.values.push_back(parse_double(token));
      }
      return doc;
    }
    std::string value;
    if (!(in >> value)) throw DataError("field without value: " + key);
    doc.fields.emplace_back(key, value);
  }
  throw DataError("parameter file lacks values");
}

}  // namespace esbas::params_io

#include "seglink/number.h"

namespace seglink {

namespace {

const Int kFastLimit = Int(1) << 61;

std::optional<Int> int_from_string(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = (text[0] == '+' || text[0] == '-') ? 1 : 0;
  if (i == text.size()) return std::nullopt;
  for (std::size_t j = i; j < text.size(); ++j) {
    if (text[j] < '0' || text[j] > '9') return std::nullopt;
  }
  Int value(std::string(text.substr(i)));
  if (text[0] == '-') value = -value;
  return value;
}

}  // namespace

Int ceil_div(const Int& a, const Int& b) {
  Int q = a / b;  // truncates toward zero
  if (q * b < a) ++q;
  return q;
}

std::optional<std::int64_t> to_fast_int(const Rat& r) {
  if (!is_integer(r)) return std::nullopt;
  Int n = rat_num(r);
  if (n >= kFastLimit || n <= -kFastLimit) return std::nullopt;
  return n.convert_to<std::int64_t>();
}

std::string rat_to_string(const Rat& r) {
  std::string s = rat_num(r).str();
  Int d = rat_den(r);
  if (d != 1) {
    s += '/';
    s += d.str();
  }
  return s;
}

std::optional<Rat> rat_from_string(std::string_view text) {
  std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    auto n = int_from_string(text);
    if (!n) return std::nullopt;
    return Rat(*n);
  }
  auto n = int_from_string(text.substr(0, slash));
  auto d = int_from_string(text.substr(slash + 1));
  if (!n || !d || *d == 0) return std::nullopt;
  return Rat(*n) / Rat(*d);
}

}  // namespace seglink

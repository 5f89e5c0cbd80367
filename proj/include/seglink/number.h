#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace seglink {

// Arbitrary-precision integers and rationals. The rational backend keeps
// values reduced with a positive denominator, so equality is plain value
// equality and numerator/denominator are always in canonical form.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rat& r) { return rat_den(r) == 1; }

/// Ceiling of a/b for b > 0.
Int ceil_div(const Int& a, const Int& b);

/// Machine-integer view of a rational when it is an integer of magnitude
/// below 2^61; the headroom keeps downstream cross products within 128 bits.
std::optional<std::int64_t> to_fast_int(const Rat& r);

/// Renders a rational as "p" or "p/q" with q > 0 and gcd(p, q) = 1.
std::string rat_to_string(const Rat& r);

/// Parses "p" or "p/q" with optional leading sign on either part.
/// Returns nullopt on malformed input or a zero denominator.
std::optional<Rat> rat_from_string(std::string_view text);

}  // namespace seglink

#ifndef DIRAC6C_HASH_HPP
#define DIRAC6C_HASH_HPP

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace dirac6c {

/// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
class Fnv1a {
public:
  Fnv1a &update(std::span<unsigned char const> bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 1099511628211ull;
    }
    return *this;
  }
  Fnv1a &update(std::string_view s) {
    return update({reinterpret_cast<unsigned char const *>(s.data()), s.size()});
  }
  Fnv1a &update(double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    return update(std::span<unsigned char const>(bytes, sizeof(double)));
  }

  std::uint64_t value() const { return state_; }
  std::string hex() const;

private:
  std::uint64_t state_ = 1469598103934665603ull;
};

inline std::string Fnv1a::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  std::uint64_t v = state_;
  for (int i = 15; i >= 0; --i, v >>= 4)
    out[i] = digits[v & 0xf];
  return out;
}

} // namespace dirac6c

#endif

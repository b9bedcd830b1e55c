#include "fairgen/record.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "fairgen/errors.hpp"

namespace fairgen {

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::automatic ? "auto" : "manual";
}

Provenance provenance_from_string(std::string_view text) {
  if (text == "auto") return Provenance::automatic;
  if (text == "manual") return Provenance::manual;
  throw ConfigError("unknown provenance: " + std::string(text));
}

std::string utc_timestamp_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::string RecordIdGenerator::next() {
  using namespace std::chrono;
  return next(static_cast<std::uint64_t>(
      duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count()));
}

std::string RecordIdGenerator::next(std::uint64_t unix_millis) {
  static constexpr char kAlphabet[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";
  std::uint64_t hi, lo;
  {
    std::lock_guard lock(mutex_);
    hi = rng_.next_u64();
    lo = rng_.next_u64();
  }
  std::string id(26, '0');
  std::uint64_t time = unix_millis & ((std::uint64_t{1} << 48) - 1);
  for (int i = 9; i >= 0; --i) {
    id[static_cast<std::size_t>(i)] = kAlphabet[time & 31];
    time >>= 5;
  }
  // 80 random bits: 16 from `hi`, 64 from `lo`.
  hi &= 0xFFFF;
  for (int i = 25; i >= 10; --i) {
    id[static_cast<std::size_t>(i)] = kAlphabet[lo & 31];
    lo = (lo >> 5) | ((hi & 31) << 59);
    hi >>= 5;
  }
  return id;
}

}  // namespace fairgen

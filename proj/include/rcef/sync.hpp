#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "rcef/intmodel.hpp"
#include "rcef/random.hpp"

namespace rcef {

enum class Protocol { None, Centralized, Naive, Private };
enum class ScheduleKind { Periodic, Dynamic };

std::string to_string(Protocol p);
Protocol parse_protocol(const std::string& text);
std::string to_string(ScheduleKind s);
ScheduleKind parse_schedule(const std::string& text);

struct SyncConfig {
  Protocol protocol = Protocol::Private;
  ScheduleKind schedule = ScheduleKind::Periodic;
  int period = 1;           // b: check or synchronize every b rounds
  std::int64_t delta = 0;   // divergence threshold for the dynamic schedule
  std::uint64_t seed = 0;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Averaging

/// Element-wise floor of the mean, integer arithmetic only.
std::vector<std::int64_t> floored_mean(std::span<const std::vector<std::int64_t>> vectors);

/// Element-wise arithmetic mean for real-valued models.
std::vector<double> real_mean(std::span<const std::vector<double>> vectors);

/// floor((a + b) / 2) as (a & b) + ((a ^ b) >> 1); never overflows.
constexpr std::uint64_t pair_average_bittrick(std::uint64_t a, std::uint64_t b) { return (a & b) + ((a ^ b) >> 1); }

/// Squared Euclidean distance. Integer inputs stay in integers.
template <typename T>
T squared_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
  T total{};
  for (std::size_t j = 0; j < a.size(); ++j) {
    const T diff = a[j] - b[j];
    total += diff * diff;
  }
  return total;
}

/// True when ||theta - r||^2 > delta. The boundary itself is compliant.
template <typename T>
bool local_condition(std::span<const T> theta, std::span<const T> r, T delta) {
  return squared_distance<T>(theta, r) > delta;
}

template <typename T>
std::vector<T> model_mean(std::span<const std::vector<T>> vectors) {
  if constexpr (std::is_integral_v<T>) {
    return floored_mean(vectors);
  } else {
    return real_mean(vectors);
  }
}

/// Merged counts and sample totals; the exact union summary.
DataSummary merge_summaries(std::span<const DataSummary> summaries);

// ---------------------------------------------------------------------------
// Communication accounting

enum class Payload : std::uint8_t { Theta = 1, Summary = 2, Broadcast = 3, SummaryBroadcast = 4 };
inline constexpr std::size_t kPayloadKinds = 4;

std::string to_string(Payload p);
bool is_upload(Payload p);

/// Whether `protocol` may send `payload` at all:
///   centralized: summary up, theta broadcast down
///   naive:       theta and summary up, both broadcast down
///   private:     theta up, theta broadcast down
///   none:        nothing
bool permitted(Protocol protocol, Payload payload);

struct ByteCosts {
  std::uint64_t header = 8;        // per message
  std::uint64_t count_bytes = 4;   // per summary counter
  std::uint64_t total_bytes = 8;   // summary sample count

  std::uint64_t theta_message(std::size_t d, int bits_per_param) const;
  std::uint64_t summary_message(std::size_t d) const;
};

struct CommLedger {
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  std::array<std::uint64_t, kPayloadKinds> messages{};

  std::uint64_t count(Payload p) const { return messages[static_cast<std::size_t>(p) - 1]; }
  std::uint64_t total_bytes() const { return bytes_up + bytes_down; }
  std::uint64_t summary_messages() const { return count(Payload::Summary) + count(Payload::SummaryBroadcast); }
  friend bool operator==(const CommLedger&, const CommLedger&) = default;
};

class PrivacyViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Charges one message of `payload` to each of `recipients`. Parameters are
/// bit-packed at `bits_per_param` bits each (k for integer models). Throws
/// PrivacyViolation when the protocol does not allow the payload.
CommLedger account(CommLedger ledger, Protocol protocol, Payload payload, std::size_t d, int bits_per_param,
                   std::size_t recipients = 1, const ByteCosts& costs = {});

// ---------------------------------------------------------------------------
// Wire format: 1-byte tag, 8-byte little-endian payload length, payload.

using Bytes = std::vector<std::uint8_t>;

/// LSB-first bit packing of k-bit values into ceil(d * k / 8) bytes.
Bytes pack_theta(std::span<const std::int64_t> theta, int k);
std::vector<std::int64_t> unpack_theta(std::span<const std::uint8_t> bytes, std::size_t d, int k);

/// d little-endian 4-byte counters followed by the 8-byte sample count.
Bytes encode_summary(const DataSummary& summary);
DataSummary decode_summary(std::span<const std::uint8_t> bytes, std::size_t d);

Bytes frame(Payload payload, std::span<const std::uint8_t> body);
std::pair<Payload, Bytes> unframe(std::span<const std::uint8_t> message);

// ---------------------------------------------------------------------------
// Dynamic averaging coordinator

template <typename T>
struct BasicCoordinator {
  std::vector<T> r;        // reference vector
  std::size_t v = 0;       // violation counter
  std::size_t m = 1;       // number of learners
  std::map<std::size_t, std::vector<T>> theta_cache;  // models received in the current resolution
};

using CoordinatorState = BasicCoordinator<std::int64_t>;

template <typename T>
struct BasicResolution {
  std::vector<std::size_t> members;  // sorted
  std::vector<T> average;
  bool full = false;
  std::size_t augmentations = 0;
};

using Resolution = BasicResolution<std::int64_t>;

/// Picks `count` learners out of `candidates` to add to the balancing set.
using AugmentFn = std::function<std::vector<std::size_t>(std::span<const std::size_t> candidates, std::size_t count, Rng& rng)>;

/// Uniform sample without replacement (partial Fisher-Yates).
std::vector<std::size_t> uniform_augmentation(std::span<const std::size_t> candidates, std::size_t count, Rng& rng);

/// Handles one round's violations: starts from the violators, jumps to a full
/// sync once the violation counter reaches m, otherwise doubles the set with
/// additional learners until the averaged model lies within the delta-ball
/// around r. Fetch is called once per member to obtain its model. If fetch
/// throws, the coordinator is left as it was and the exception propagates.
template <typename T, typename Fetch>
BasicResolution<T> resolve_violation(BasicCoordinator<T>& coordinator, std::span<const std::size_t> violators, T delta,
                                     Fetch&& fetch, Rng& rng, const AugmentFn& augment = uniform_augmentation) {
  if (violators.empty()) throw std::invalid_argument("resolve_violation needs at least one violator");
  BasicCoordinator<T> next = coordinator;
  next.theta_cache.clear();
  const std::size_t m = next.m;

  std::vector<bool> member(m, false);
  for (auto i : violators) {
    if (i >= m) throw std::out_of_range("violator index out of range");
    member[i] = true;
  }
  auto add = [&](std::size_t i) {
    member[i] = true;
    if (!next.theta_cache.contains(i)) next.theta_cache.emplace(i, fetch(i));
  };
  for (std::size_t i = 0; i < m; ++i) {
    if (member[i]) add(i);
  }

  BasicResolution<T> out;
  next.v += next.theta_cache.size();
  if (next.v >= m) {
    for (std::size_t i = 0; i < m; ++i) add(i);
    next.v = 0;
  }

  auto current_mean = [&] {
    std::vector<std::vector<T>> models;
    models.reserve(next.theta_cache.size());
    for (const auto& [i, theta] : next.theta_cache) models.push_back(theta);
    return model_mean<T>(models);
  };

  auto mean = current_mean();
  while (next.theta_cache.size() < m &&
         local_condition<T>(std::span<const T>(mean), std::span<const T>(next.r), delta)) {
    std::vector<std::size_t> outside;
    for (std::size_t i = 0; i < m; ++i) {
      if (!member[i]) outside.push_back(i);
    }
    const auto want = std::min(next.theta_cache.size(), outside.size());
    const auto picked = augment(outside, want, rng);
    if (picked.empty()) throw std::logic_error("augmentation made no progress");
    for (auto i : picked) {
      if (i >= m || member[i]) throw std::logic_error("augmentation picked an invalid learner");
      add(i);
    }
    ++out.augmentations;
    mean = current_mean();
  }

  for (const auto& [i, theta] : next.theta_cache) out.members.push_back(i);
  out.full = out.members.size() == m;
  if (out.full) {
    next.r = mean;
    next.v = 0;
  }
  out.average = std::move(mean);
  next.theta_cache.clear();
  coordinator = std::move(next);
  return out;
}

/// Average of all learners' models; every learner then adopts it.
template <typename T>
std::vector<T> periodic_sync(std::span<const std::vector<T>> thetas) {
  if (thetas.empty()) throw std::invalid_argument("periodic_sync needs at least one learner");
  return model_mean<T>(thetas);
}

}  // namespace rcef

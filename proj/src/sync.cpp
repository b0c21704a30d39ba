#include "rcef/sync.hpp"

#include <numeric>

namespace rcef {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::None: return "none";
    case Protocol::Centralized: return "centralized";
    case Protocol::Naive: return "naive";
    case Protocol::Private: return "private";
  }
  return "?";
}

Protocol parse_protocol(const std::string& text) {
  if (text == "none" || text == "nosync") return Protocol::None;
  if (text == "centralized" || text == "global") return Protocol::Centralized;
  if (text == "naive") return Protocol::Naive;
  if (text == "private") return Protocol::Private;
  throw std::invalid_argument("unknown protocol '" + text + "'");
}

std::string to_string(ScheduleKind s) { return s == ScheduleKind::Periodic ? "periodic" : "dynamic"; }

ScheduleKind parse_schedule(const std::string& text) {
  if (text == "periodic") return ScheduleKind::Periodic;
  if (text == "dynamic") return ScheduleKind::Dynamic;
  throw std::invalid_argument("unknown schedule '" + text + "'");
}

void SyncConfig::validate() const {
  if (period < 1) throw std::invalid_argument("sync period b must be at least 1");
  if (delta < 0) throw std::invalid_argument("divergence threshold must be nonnegative");
}

std::vector<std::int64_t> floored_mean(std::span<const std::vector<std::int64_t>> vectors) {
  if (vectors.empty()) throw std::invalid_argument("floored_mean of an empty list");
  const auto d = vectors.front().size();
  std::vector<std::int64_t> sum(d, 0);
  for (const auto& v : vectors) {
    if (v.size() != d) throw std::invalid_argument("vector length mismatch");
    for (std::size_t j = 0; j < d; ++j) {
      if (v[j] < 0) throw std::invalid_argument("floored_mean expects nonnegative entries");
      sum[j] += v[j];
    }
  }
  const auto count = static_cast<std::int64_t>(vectors.size());
  for (auto& s : sum) s /= count;  // nonnegative, so truncation is the floor
  return sum;
}

std::vector<double> real_mean(std::span<const std::vector<double>> vectors) {
  if (vectors.empty()) throw std::invalid_argument("mean of an empty list");
  const auto d = vectors.front().size();
  std::vector<double> sum(d, 0.0);
  for (const auto& v : vectors) {
    if (v.size() != d) throw std::invalid_argument("vector length mismatch");
    for (std::size_t j = 0; j < d; ++j) sum[j] += v[j];
  }
  for (auto& s : sum) s /= static_cast<double>(vectors.size());
  return sum;
}

DataSummary merge_summaries(std::span<const DataSummary> summaries) {
  if (summaries.empty()) throw std::invalid_argument("merge of no summaries");
  DataSummary out(summaries.front().dimension());
  for (const auto& s : summaries) {
    if (s.dimension() != out.dimension()) throw std::invalid_argument("summary dimension mismatch");
    for (std::size_t j = 0; j < out.dimension(); ++j) out.counts[j] += s.counts[j];
    out.n += s.n;
  }
  return out;
}

std::string to_string(Payload p) {
  switch (p) {
    case Payload::Theta: return "theta";
    case Payload::Summary: return "summary";
    case Payload::Broadcast: return "broadcast";
    case Payload::SummaryBroadcast: return "summary_broadcast";
  }
  return "?";
}

bool is_upload(Payload p) { return p == Payload::Theta || p == Payload::Summary; }

bool permitted(Protocol protocol, Payload payload) {
  switch (protocol) {
    case Protocol::None: return false;
    case Protocol::Centralized: return payload == Payload::Summary || payload == Payload::Broadcast;
    case Protocol::Naive: return true;
    case Protocol::Private: return payload == Payload::Theta || payload == Payload::Broadcast;
  }
  return false;
}

std::uint64_t ByteCosts::theta_message(std::size_t d, int bits_per_param) const {
  const auto bits = static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(bits_per_param);
  return header + (bits + 7) / 8;
}

std::uint64_t ByteCosts::summary_message(std::size_t d) const {
  return header + static_cast<std::uint64_t>(d) * count_bytes + total_bytes;
}

CommLedger account(CommLedger ledger, Protocol protocol, Payload payload, std::size_t d, int bits_per_param,
                   std::size_t recipients, const ByteCosts& costs) {
  if (!permitted(protocol, payload)) {
    throw PrivacyViolation("privacy violation: protocol " + to_string(protocol) + " may not send " + to_string(payload));
  }
  const bool is_summary = payload == Payload::Summary || payload == Payload::SummaryBroadcast;
  const auto each = is_summary ? costs.summary_message(d) : costs.theta_message(d, bits_per_param);
  const auto total = each * static_cast<std::uint64_t>(recipients);
  (is_upload(payload) ? ledger.bytes_up : ledger.bytes_down) += total;
  ledger.messages[static_cast<std::size_t>(payload) - 1] += recipients;
  return ledger;
}

namespace {

void put_le(Bytes& out, std::uint64_t value, int width) {
  for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t at, int width) {
  if (at + static_cast<std::size_t>(width) > in.size()) throw std::out_of_range("truncated message");
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i) value |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(i)]) << (8 * i);
  return value;
}

}  // namespace

Bytes pack_theta(std::span<const std::int64_t> theta, int k) {
  if (k < 1 || k > 63) throw std::invalid_argument("bad bit width");
  Bytes out((theta.size() * static_cast<std::size_t>(k) + 7) / 8, 0);
  std::size_t bit = 0;
  for (auto value : theta) {
    if (value < 0 || value >= (std::int64_t{1} << k)) throw std::out_of_range("value does not fit in k bits");
    for (int b = 0; b < k; ++b, ++bit) {
      if ((value >> b) & 1) out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }
  return out;
}

std::vector<std::int64_t> unpack_theta(std::span<const std::uint8_t> bytes, std::size_t d, int k) {
  if (bytes.size() * 8 < d * static_cast<std::size_t>(k)) throw std::out_of_range("packed theta too short");
  std::vector<std::int64_t> out(d, 0);
  std::size_t bit = 0;
  for (auto& value : out) {
    for (int b = 0; b < k; ++b, ++bit) {
      if ((bytes[bit / 8] >> (bit % 8)) & 1) value |= std::int64_t{1} << b;
    }
  }
  return out;
}

Bytes encode_summary(const DataSummary& summary) {
  Bytes out;
  out.reserve(summary.dimension() * 4 + 8);
  for (const auto& c : summary.counts) {
    if (c > 0xFFFFFFFFu) throw std::overflow_error("count does not fit in 4 bytes");
    put_le(out, c.convert_to<std::uint64_t>(), 4);
  }
  if (summary.n > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("sample count does not fit in 8 bytes");
  put_le(out, summary.n.convert_to<std::uint64_t>(), 8);
  return out;
}

DataSummary decode_summary(std::span<const std::uint8_t> bytes, std::size_t d) {
  if (bytes.size() != d * 4 + 8) throw std::invalid_argument("summary payload has wrong size");
  DataSummary out(d);
  for (std::size_t j = 0; j < d; ++j) out.counts[j] = get_le(bytes, j * 4, 4);
  out.n = get_le(bytes, d * 4, 8);
  return out;
}

Bytes frame(Payload payload, std::span<const std::uint8_t> body) {
  Bytes out;
  out.reserve(body.size() + 9);
  out.push_back(static_cast<std::uint8_t>(payload));
  put_le(out, body.size(), 8);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::pair<Payload, Bytes> unframe(std::span<const std::uint8_t> message) {
  if (message.size() < 9) throw std::out_of_range("truncated frame header");
  const auto tag = message[0];
  if (tag < 1 || tag > kPayloadKinds) throw std::invalid_argument("unknown payload tag");
  const auto length = get_le(message, 1, 8);
  if (length != message.size() - 9) throw std::invalid_argument("frame length does not match payload");
  return {static_cast<Payload>(tag), Bytes(message.begin() + 9, message.end())};
}

std::vector<std::size_t> uniform_augmentation(std::span<const std::size_t> candidates, std::size_t count, Rng& rng) {
  std::vector<std::size_t> pool(candidates.begin(), candidates.end());
  count = std::min(count, pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace rcef

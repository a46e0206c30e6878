#include "rncsim/coding.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "rncsim/errors.hpp"

namespace rncsim {

SourceMessage SourceMessage::random(MessageId id, std::size_t k,
                                    std::size_t payload_bytes,
                                    std::uint64_t seed) {
  if (k == 0) throw InvalidParameter("message must have K >= 1 packets");
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), id, 0x5eedu};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> byte(0, 255);
  SourceMessage message{id, {}};
  message.packets.resize(k, Payload(payload_bytes));
  for (auto& packet : message.packets)
    for (auto& b : packet) b = static_cast<std::uint8_t>(byte(rng));
  return message;
}

CodedPacket encode_with(const SourceMessage& message,
                        std::span<const FieldElement> coefficients,
                        NodeId origin, Slot created_slot) {
  if (coefficients.size() != message.k())
    throw DimensionMismatch(fmt::format("coefficient vector has length {}, K = {}",
                                        coefficients.size(), message.k()));
  if (std::all_of(coefficients.begin(), coefficients.end(),
                  [](FieldElement c) { return c.is_zero(); }))
    throw InvalidParameter("all-zero coefficient vector");

  CodedPacket packet;
  packet.message_id = message.id;
  packet.coefficients.assign(coefficients.begin(), coefficients.end());
  packet.payload.assign(message.payload_size(), 0);
  for (std::size_t i = 0; i < message.k(); ++i)
    gf256::mul_add_region(packet.payload, message.packets[i], coefficients[i]);
  packet.origin = origin;
  packet.created_slot = created_slot;
  if (origin != kNoNode) packet.trace.push_back(origin);
  return packet;
}

CodedPacket encode(const SourceMessage& message, std::mt19937_64& rng,
                   NodeId origin, Slot created_slot) {
  std::vector<FieldElement> coefficients(message.k());
  std::uniform_int_distribution<int> byte(0, 255);
  bool nonzero = false;
  while (!nonzero) {
    for (auto& c : coefficients) {
      c = FieldElement(static_cast<std::uint8_t>(byte(rng)));
      nonzero = nonzero || !c.is_zero();
    }
  }
  return encode_with(message, coefficients, origin, created_slot);
}

DecoderState::DecoderState(MessageId message_id, std::size_t k,
                           std::size_t payload_size)
    : message_id_(message_id), k_(k), payload_size_(payload_size) {
  if (k == 0) throw InvalidParameter("decoder needs K >= 1");
  rows_.reserve(k);
}

bool DecoderState::absorb(const CodedPacket& packet) {
  if (packet.message_id != message_id_)
    throw DimensionMismatch(fmt::format("packet of message {} fed to decoder of {}",
                                        packet.message_id, message_id_));
  if (packet.coefficients.size() != k_)
    throw DimensionMismatch(fmt::format("coefficient vector has length {}, K = {}",
                                        packet.coefficients.size(), k_));
  if (packet.payload.size() != payload_size_)
    throw DimensionMismatch(fmt::format("payload has {} bytes, expected {}",
                                        packet.payload.size(), payload_size_));
  if (decodable()) return false;

  std::vector<std::uint8_t> coeffs(k_);
  for (std::size_t i = 0; i < k_; ++i) coeffs[i] = packet.coefficients[i].value();
  Payload payload = packet.payload;

  for (const auto& row : rows_) {
    const FieldElement factor(coeffs[row.pivot]);
    if (factor.is_zero()) continue;
    gf256::mul_add_region(coeffs, row.coefficients, factor);
    gf256::mul_add_region(payload, row.payload, factor);
  }

  const auto lead = std::find_if(coeffs.begin(), coeffs.end(),
                                 [](std::uint8_t c) { return c != 0; });
  if (lead == coeffs.end()) return false;

  const auto pivot = static_cast<std::size_t>(lead - coeffs.begin());
  const FieldElement scale = FieldElement(*lead).inverse();
  gf256::scale_region(coeffs, scale);
  gf256::scale_region(payload, scale);

  // Keep the basis fully reduced: clear the new pivot column everywhere else.
  for (auto& row : rows_) {
    const FieldElement factor(row.coefficients[pivot]);
    if (factor.is_zero()) continue;
    gf256::mul_add_region(row.coefficients, coeffs, factor);
    gf256::mul_add_region(row.payload, payload, factor);
  }

  Row fresh{pivot, std::move(coeffs), std::move(payload)};
  const auto at = std::lower_bound(
      rows_.begin(), rows_.end(), pivot,
      [](const Row& r, std::size_t p) { return r.pivot < p; });
  rows_.insert(at, std::move(fresh));
  return true;
}

std::vector<Payload> DecoderState::decode() const {
  if (!decodable())
    throw NotYetDecodable(fmt::format("rank {} of {}", rows_.size(), k_));
  std::vector<Payload> out;
  out.reserve(k_);
  for (const auto& row : rows_) out.push_back(row.payload);
  return out;
}

namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes) {
  for (int i = bytes - 1; i >= 0; --i)
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint64_t get_be(std::span<const std::uint8_t> bytes, std::size_t& pos,
                     int width) {
  if (pos + static_cast<std::size_t>(width) > bytes.size())
    throw DimensionMismatch("truncated coded packet");
  std::uint64_t value = 0;
  for (int i = 0; i < width; ++i) value = (value << 8) | bytes[pos++];
  return value;
}

}  // namespace

std::vector<std::uint8_t> serialize(const CodedPacket& packet) {
  if (packet.coefficients.size() > 0xFFFF)
    throw DimensionMismatch("K does not fit the 2-byte header field");
  std::vector<std::uint8_t> out;
  out.reserve(10 + packet.coefficients.size() + packet.payload.size());
  put_be(out, packet.message_id, 4);
  put_be(out, packet.coefficients.size(), 2);
  for (auto c : packet.coefficients) out.push_back(c.value());
  put_be(out, packet.payload.size(), 4);
  out.insert(out.end(), packet.payload.begin(), packet.payload.end());
  return out;
}

CodedPacket deserialize(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  CodedPacket packet;
  packet.message_id = static_cast<MessageId>(get_be(bytes, pos, 4));
  const auto k = static_cast<std::size_t>(get_be(bytes, pos, 2));
  if (pos + k > bytes.size()) throw DimensionMismatch("truncated coefficients");
  for (std::size_t i = 0; i < k; ++i)
    packet.coefficients.emplace_back(bytes[pos++]);
  const auto length = static_cast<std::size_t>(get_be(bytes, pos, 4));
  if (pos + length != bytes.size())
    throw DimensionMismatch(fmt::format("payload length {} does not match {} remaining bytes",
                                        length, bytes.size() - pos));
  packet.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return packet;
}

}  // namespace rncsim

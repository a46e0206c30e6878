#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rncsim/gf256.hpp"
#include "rncsim/types.hpp"

namespace rncsim {

using Payload = std::vector<std::uint8_t>;

/// A message split into K equal-length source packets x_1..x_K.
struct SourceMessage {
  MessageId id = 0;
  std::vector<Payload> packets;

  [[nodiscard]] std::size_t k() const { return packets.size(); }
  [[nodiscard]] std::size_t payload_size() const {
    return packets.empty() ? 0 : packets.front().size();
  }

  /// Random message contents; throws InvalidParameter if k == 0.
  static SourceMessage random(MessageId id, std::size_t k,
                              std::size_t payload_bytes, std::uint64_t seed);
};

struct CodedPacket {
  MessageId message_id = 0;
  std::vector<FieldElement> coefficients;
  Payload payload;
  NodeId origin = kNoNode;
  Slot created_slot = 0;
  std::vector<NodeId> trace;
};

/// Draws a uniformly random non-zero coefficient vector and combines the
/// message's packets with it.
CodedPacket encode(const SourceMessage& message, std::mt19937_64& rng,
                   NodeId origin = kNoNode, Slot created_slot = 0);

/// Combination with caller-chosen coefficients. Throws DimensionMismatch on a
/// wrong length and InvalidParameter on the all-zero vector.
CodedPacket encode_with(const SourceMessage& message,
                        std::span<const FieldElement> coefficients,
                        NodeId origin = kNoNode, Slot created_slot = 0);

/// Incremental Gauss-Jordan decoder. The basis is kept in reduced row echelon
/// form, so once rank == K each row is a unit vector and its payload is the
/// corresponding source packet.
class DecoderState {
 public:
  DecoderState(MessageId message_id, std::size_t k, std::size_t payload_size);

  /// Returns true iff the packet was innovative (rank grew by one).
  /// Throws DimensionMismatch on a foreign message id or wrong lengths.
  bool absorb(const CodedPacket& packet);

  [[nodiscard]] std::size_t rank() const { return rows_.size(); }
  [[nodiscard]] std::size_t k() const { return k_; }
  [[nodiscard]] bool decodable() const { return rows_.size() == k_; }
  [[nodiscard]] MessageId message_id() const { return message_id_; }

  /// The K source packets in order. Throws NotYetDecodable if rank < K.
  [[nodiscard]] std::vector<Payload> decode() const;

 private:
  struct Row {
    std::size_t pivot;
    std::vector<std::uint8_t> coefficients;
    Payload payload;
  };

  MessageId message_id_;
  std::size_t k_;
  std::size_t payload_size_;
  std::vector<Row> rows_;
};

// Wire layout, all integers big-endian:
//   message_id (4) | K (2) | coefficients (K) | payload length (4) | payload
std::vector<std::uint8_t> serialize(const CodedPacket& packet);
/// Throws DimensionMismatch on truncated or inconsistent input.
CodedPacket deserialize(std::span<const std::uint8_t> bytes);

}  // namespace rncsim

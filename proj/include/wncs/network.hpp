#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wncs/random.hpp"

namespace wncs {

using Identifier = std::uint64_t;

// Layout of the arbitration field: a dynamic (priority) part in the most
// significant bits followed by a unique static part.
struct IdentifierLayout {
  int dynamic_bits = 20;
  int static_bits = 9;
  double alpha = 1000.0;  // f(m) = alpha * m
  // Bit value that wins arbitration on the wire. Logical identifiers are
  // always "larger wins"; with 0-dominance the wire bits are complemented.
  int dominant_bit = 1;

  int total_bits() const { return dynamic_bits + static_bits; }
  Identifier max_dynamic() const { return (Identifier{1} << dynamic_bits) - 1; }
  Identifier max_static() const { return (Identifier{1} << static_bits) - 1; }

  bool operator==(const IdentifierLayout&) const = default;
};

std::vector<std::string> validate(const IdentifierLayout& layout, const std::string& path = "");

// Default static table: subsystem i (1-based) gets (2^static_bits - 1) - (i - 1).
Identifier default_static_id(const IdentifierLayout& layout, int subsystem_index);

// clamp(round(alpha * m), 0, 2^n - 1), ties rounded away from zero.
Identifier dynamic_identifier(double priority, const IdentifierLayout& layout);

Identifier build_identifier(double priority, const IdentifierLayout& layout,
                            std::int64_t static_id);

Identifier dynamic_part(Identifier id, const IdentifierLayout& layout);

// Bits driven on the medium, MSB first, for the layout's dominance convention.
Identifier wire_bits(Identifier id, const IdentifierLayout& layout);

struct Contender {
  int index;      // subsystem index
  Identifier id;  // logical identifier
};

/// Frame-level arbitration: the numerically largest logical identifier wins.
/// Duplicate identifiers are a configuration error.
std::optional<int> arbitrate(std::span<const Contender> contenders);

/// Bit-serial reference: contenders drive their wire bits MSB first and drop
/// out on the first bit where they send recessive while another sends
/// dominant.
std::optional<int> arbitrate_bitwise(std::span<const Contender> contenders,
                                     const IdentifierLayout& layout);

struct MultiChannelContender {
  int index;
  std::vector<Identifier> ids;  // one logical identifier per channel
};

/// Resolves channels in ascending order; a winner backs off from all later
/// channels. Returns the winner (if any) per channel.
std::vector<std::optional<int>> arbitrate_multichannel(
    std::span<const MultiChannelContender> contenders, std::size_t channels);

// Bernoulli(q) packet outcome; the transmitter sees it the same slot.
bool transmit(double q, RandomStream& rng);

}  // namespace wncs

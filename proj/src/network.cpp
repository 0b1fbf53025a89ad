#include "wncs/network.hpp"

#include <algorithm>
#include <cmath>

#include "wncs/errors.hpp"

namespace wncs {

std::vector<std::string> validate(const IdentifierLayout& layout, const std::string& path) {
  std::vector<std::string> issues;
  auto issue = [&](const std::string& field, const std::string& what) {
    issues.push_back((path.empty() ? field : path + "." + field) + ": " + what);
  };
  if (layout.dynamic_bits < 1) issue("dynamic_bits", "must be positive");
  if (layout.static_bits < 1) issue("static_bits", "must be positive");
  if (layout.dynamic_bits + layout.static_bits > 63) {
    issue("dynamic_bits", "total identifier width must not exceed 63 bits");
  }
  if (!(layout.alpha > 0.0) || !std::isfinite(layout.alpha)) {
    issue("alpha", "must be a positive finite real");
  }
  if (layout.dominant_bit != 0 && layout.dominant_bit != 1) issue("dominant_bit", "must be 0 or 1");
  return issues;
}

Identifier default_static_id(const IdentifierLayout& layout, int subsystem_index) {
  const auto offset = static_cast<Identifier>(subsystem_index - 1);
  if (subsystem_index < 1 || offset > layout.max_static()) {
    throw ConfigError("no default static identifier for subsystem " +
                      std::to_string(subsystem_index));
  }
  return layout.max_static() - offset;
}

Identifier dynamic_identifier(double priority, const IdentifierLayout& layout) {
  if (std::isnan(priority)) throw ConfigError("priority measure is NaN");
  const double scaled = std::round(layout.alpha * priority);  // half away from zero
  if (scaled <= 0.0) return 0;
  const auto cap = static_cast<double>(layout.max_dynamic());
  if (scaled >= cap) return layout.max_dynamic();
  return static_cast<Identifier>(scaled);
}

Identifier build_identifier(double priority, const IdentifierLayout& layout,
                            std::int64_t static_id) {
  if (static_id < 0 || static_cast<Identifier>(static_id) > layout.max_static()) {
    throw ConfigError("static identifier " + std::to_string(static_id) + " outside [0, " +
                      std::to_string(layout.max_static()) + "]");
  }
  return (dynamic_identifier(priority, layout) << layout.static_bits) |
         static_cast<Identifier>(static_id);
}

Identifier dynamic_part(Identifier id, const IdentifierLayout& layout) {
  return id >> layout.static_bits;
}

Identifier wire_bits(Identifier id, const IdentifierLayout& layout) {
  if (layout.dominant_bit == 1) return id;
  const Identifier mask = (Identifier{1} << layout.total_bits()) - 1;
  return ~id & mask;
}

std::optional<int> arbitrate(std::span<const Contender> contenders) {
  if (contenders.empty()) return std::nullopt;
  const Contender* best = &contenders.front();
  for (const auto& c : contenders.subspan(1)) {
    if (c.id > best->id) best = &c;
  }
  for (std::size_t i = 0; i < contenders.size(); ++i) {
    for (std::size_t j = i + 1; j < contenders.size(); ++j) {
      if (contenders[i].id == contenders[j].id) {
        throw ConfigError("duplicate identifier " + std::to_string(contenders[i].id) +
                          " for subsystems " + std::to_string(contenders[i].index) + " and " +
                          std::to_string(contenders[j].index));
      }
    }
  }
  return best->index;
}

std::optional<int> arbitrate_bitwise(std::span<const Contender> contenders,
                                     const IdentifierLayout& layout) {
  if (contenders.empty()) return std::nullopt;
  std::vector<const Contender*> alive;
  alive.reserve(contenders.size());
  for (const auto& c : contenders) alive.push_back(&c);

  const auto dominant = static_cast<Identifier>(layout.dominant_bit);
  for (int bit = layout.total_bits() - 1; bit >= 0 && alive.size() > 1; --bit) {
    auto sent = [&](const Contender* c) { return (wire_bits(c->id, layout) >> bit) & 1U; };
    const bool any_dominant =
        std::any_of(alive.begin(), alive.end(), [&](const Contender* c) { return sent(c) == dominant; });
    if (!any_dominant) continue;
    std::erase_if(alive, [&](const Contender* c) { return sent(c) != dominant; });
  }
  if (alive.size() != 1) throw ConfigError("bitwise arbitration ended with a collision");
  return alive.front()->index;
}

std::vector<std::optional<int>> arbitrate_multichannel(
    std::span<const MultiChannelContender> contenders, std::size_t channels) {
  std::vector<std::optional<int>> winners(channels);
  std::vector<bool> granted(contenders.size(), false);
  std::vector<Contender> round;
  for (std::size_t ch = 0; ch < channels; ++ch) {
    round.clear();
    for (std::size_t i = 0; i < contenders.size(); ++i) {
      if (granted[i]) continue;
      if (contenders[i].ids.size() != channels) {
        throw ConfigError("contender " + std::to_string(contenders[i].index) +
                          " does not carry one identifier per channel");
      }
      round.push_back({contenders[i].index, contenders[i].ids[ch]});
    }
    winners[ch] = arbitrate(round);
    if (winners[ch]) {
      for (std::size_t i = 0; i < contenders.size(); ++i) {
        if (contenders[i].index == *winners[ch]) granted[i] = true;
      }
    }
  }
  return winners;
}

bool transmit(double q, RandomStream& rng) { return rng.bernoulli(q); }

}  // namespace wncs

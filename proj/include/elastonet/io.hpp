#pragma once

#include <optional>
#include <string>

#include "elastonet/model.hpp"

namespace elastonet {

/// Response target parsed from disk: exactly one of the two is set.
struct ResponseSpec {
    std::optional<StaticResponse> static_response;
    std::optional<ModalResponse> modal_response;
};

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Canonical JSON for a network: nodes sorted by label, spring endpoints
/// ordered within each pair and the list sorted, so serialization is a
/// byte-stable fixed point.
std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

std::string response_spec_to_json(const ResponseSpec& spec);
ResponseSpec response_spec_from_json(const std::string& text);

Network load_network(const std::string& path);
void save_network(const Network& net, const std::string& path);
ResponseSpec load_response_spec(const std::string& path);
void save_response_spec(const ResponseSpec& spec, const std::string& path);

}  // namespace elastonet

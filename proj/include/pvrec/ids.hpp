#pragma once

#include <compare>
#include <functional>
#include <string>
#include <utility>

namespace pvrec {

/// String identifier tagged with the domain it belongs to, so a user id
/// cannot be passed where a channel id is expected.
template <class Tag>
struct StrongId {
    std::string value;

    StrongId() = default;
    explicit StrongId(std::string v) : value(std::move(v)) {}

    const std::string& str() const noexcept { return value; }
    bool empty() const noexcept { return value.empty(); }

    friend auto operator<=>(const StrongId&, const StrongId&) = default;
    friend bool operator==(const StrongId&, const StrongId&) = default;
};

struct UserTag {};
struct ChannelTag {};

using UserId = StrongId<UserTag>;
using ChannelId = StrongId<ChannelTag>;

}  // namespace pvrec

template <class Tag>
struct std::hash<pvrec::StrongId<Tag>> {
    std::size_t operator()(const pvrec::StrongId<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.value);
    }
};

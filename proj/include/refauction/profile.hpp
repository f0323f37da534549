#pragma once

#include "refauction/money.hpp"

#include <compare>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>

namespace refauction {

/// Opaque agent identifier. Ordering is plain lexicographic on the string and
/// is what every deterministic tie-break uses.
class AgentId {
public:
    AgentId() = default;
    explicit AgentId(std::string value) : value_(std::move(value)) {}
    explicit AgentId(const char* value) : value_(value) {}

    const std::string& str() const { return value_; }

    friend bool operator==(const AgentId&, const AgentId&) = default;
    friend std::strong_ordering operator<=>(const AgentId& a, const AgentId& b) {
        return a.value_.compare(b.value_) <=> 0;
    }
    friend std::ostream& operator<<(std::ostream& os, const AgentId& id) { return os << id.value_; }

private:
    std::string value_;
};

inline AgentId operator""_id(const char* text, std::size_t len) { return AgentId(std::string(text, len)); }

/// theta_i = (children, valuation); used for both true and reported types.
struct AgentType {
    std::set<AgentId> children;
    Money valuation;

    friend bool operator==(const AgentType&, const AgentType&) = default;
};

enum class ProfileKind { truthful, reported };

/// A complete type profile: one entry per agent including the seller.
///
/// Invariants checked by validate(): the seller has an entry with valuation 0,
/// every child id has its own entry, nobody lists the seller or itself as a
/// child, and no valuation is negative.
struct Profile {
    AgentId seller{"s"};
    std::map<AgentId, AgentType> entries;
    ProfileKind kind = ProfileKind::truthful;

    const AgentType& at(const AgentId& id) const;
    bool contains(const AgentId& id) const { return entries.count(id) != 0; }

    /// Throws ValidationError naming the offending agent or edge.
    void validate() const;

    /// Reported children must be a subset of the true children: an agent can
    /// only forward the sale to people it actually knows.
    void validate_against(const Profile& truth) const;

    friend bool operator==(const Profile&, const Profile&) = default;
};

/// Convenience builder used by fixtures and tests.
class ProfileBuilder {
public:
    explicit ProfileBuilder(AgentId seller = AgentId("s"));

    ProfileBuilder& seller_children(std::initializer_list<const char*> children);
    ProfileBuilder& agent(const char* id, Money valuation, std::initializer_list<const char*> children = {});

    Profile build() const;

private:
    Profile profile_;
};

}  // namespace refauction

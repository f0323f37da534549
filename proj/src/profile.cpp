#include "refauction/profile.hpp"

#include "refauction/errors.hpp"

namespace refauction {

const AgentType& Profile::at(const AgentId& id) const {
    auto it = entries.find(id);
    if (it == entries.end()) {
        throw ValidationError("unknown agent '" + id.str() + "'");
    }
    return it->second;
}

void Profile::validate() const {
    auto seller_it = entries.find(seller);
    if (seller_it == entries.end()) {
        throw ValidationError("seller '" + seller.str() + "' has no entry");
    }
    if (!seller_it->second.valuation.is_zero()) {
        throw ValidationError("seller '" + seller.str() + "' must have valuation 0");
    }
    for (const auto& [id, type] : entries) {
        if (type.valuation.is_negative()) {
            throw ValidationError("agent '" + id.str() + "' has negative valuation " + type.valuation.to_string());
        }
        for (const auto& child : type.children) {
            if (child == seller) {
                throw ValidationError("edge " + id.str() + " -> " + child.str() + " points at the seller");
            }
            if (child == id) {
                throw ValidationError("edge " + id.str() + " -> " + child.str() + " is a self-invitation");
            }
            if (!entries.count(child)) {
                throw ValidationError("edge " + id.str() + " -> " + child.str() + " references an undeclared agent");
            }
        }
    }
}

void Profile::validate_against(const Profile& truth) const {
    if (seller != truth.seller) {
        throw ValidationError("reported seller '" + seller.str() + "' differs from true seller '" + truth.seller.str() +
                              "'");
    }
    for (const auto& [id, type] : entries) {
        auto it = truth.entries.find(id);
        if (it == truth.entries.end()) {
            throw ValidationError("reported agent '" + id.str() + "' is not in the true profile");
        }
        for (const auto& child : type.children) {
            if (!it->second.children.count(child)) {
                throw ValidationError("reported edge " + id.str() + " -> " + child.str() +
                                      " is not a true invitation");
            }
        }
    }
}

ProfileBuilder::ProfileBuilder(AgentId seller) {
    profile_.seller = seller;
    profile_.entries[seller] = AgentType{};
}

ProfileBuilder& ProfileBuilder::seller_children(std::initializer_list<const char*> children) {
    auto& entry = profile_.entries[profile_.seller];
    for (const char* c : children) {
        entry.children.insert(AgentId(c));
    }
    return *this;
}

ProfileBuilder& ProfileBuilder::agent(const char* id, Money valuation, std::initializer_list<const char*> children) {
    auto& entry = profile_.entries[AgentId(id)];
    entry.valuation = std::move(valuation);
    for (const char* c : children) {
        entry.children.insert(AgentId(c));
    }
    return *this;
}

Profile ProfileBuilder::build() const {
    profile_.validate();
    return profile_;
}

}  // namespace refauction

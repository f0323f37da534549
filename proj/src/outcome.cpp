#include "refauction/outcome.hpp"

#include "refauction/errors.hpp"

#include <algorithm>

namespace refauction {

std::string_view mechanism_name(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::trdm: return "TRDM";
        case MechanismKind::vcg_referral: return "VCG_REFERRAL";
        case MechanismKind::spa_direct: return "SPA_DIRECT";
        case MechanismKind::idm_reconstructed: return "IDM_RECON";
        case MechanismKind::custom: return "CUSTOM";
    }
    return "UNKNOWN";
}

std::string_view mechanism_short_name(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::trdm: return "trdm";
        case MechanismKind::vcg_referral: return "vcg";
        case MechanismKind::spa_direct: return "spa";
        case MechanismKind::idm_reconstructed: return "idm";
        case MechanismKind::custom: return "custom";
    }
    return "unknown";
}

std::optional<MechanismKind> parse_mechanism(std::string_view text) {
    for (auto kind : {MechanismKind::trdm, MechanismKind::vcg_referral, MechanismKind::spa_direct,
                      MechanismKind::idm_reconstructed}) {
        if (text == mechanism_short_name(kind) || text == mechanism_name(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

Outcome::Outcome(MechanismKind mechanism, std::optional<AgentId> winner,
                 std::vector<std::pair<AgentId, Money>> payments, Money declared_revenue, Money social_welfare,
                 std::optional<WinningPath> path)
    : mechanism_(mechanism),
      winner_(std::move(winner)),
      payments_(std::move(payments)),
      revenue_(std::move(declared_revenue)),
      social_welfare_(std::move(social_welfare)),
      path_(std::move(path)) {
    std::sort(payments_.begin(), payments_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < payments_.size(); ++k) {
        if (payments_[k - 1].first == payments_[k].first) {
            throw ConsistencyError("duplicate payment entry for '" + payments_[k].first.str() + "'");
        }
    }
    Money total;
    for (const auto& [id, p] : payments_) {
        total += p;
    }
    if (total != revenue_) {
        throw ConsistencyError(std::string(mechanism_name(mechanism_)) + ": payments sum to " + total.to_string() +
                               " but declared revenue is " + revenue_.to_string());
    }
}

Money Outcome::payment(const AgentId& id) const {
    auto it = std::lower_bound(payments_.begin(), payments_.end(), id,
                               [](const auto& entry, const AgentId& key) { return entry.first < key; });
    if (it != payments_.end() && it->first == id) {
        return it->second;
    }
    return Money{};
}

Money Outcome::total_reward() const {
    Money total;
    for (const auto& [id, p] : payments_) {
        if (p.is_negative()) {
            total -= p;
        }
    }
    return total;
}

UtilityVector utilities(const Outcome& outcome, const Profile& truth) {
    for (const auto& [id, p] : outcome.payments()) {
        if (!truth.contains(id)) {
            throw ValidationError("outcome names agent '" + id.str() + "' missing from the true profile");
        }
    }
    if (outcome.winner() && !truth.contains(*outcome.winner())) {
        throw ValidationError("winner '" + outcome.winner()->str() + "' missing from the true profile");
    }
    UtilityVector out;
    for (const auto& [id, type] : truth.entries) {
        if (id == truth.seller) {
            continue;
        }
        Money u = -outcome.payment(id);
        if (outcome.winner() == id) {
            u += type.valuation;
        }
        out.emplace(id, std::move(u));
    }
    return out;
}

Money true_social_welfare(const Outcome& outcome, const Profile& truth) {
    if (!outcome.winner()) {
        return Money{};
    }
    return truth.at(*outcome.winner()).valuation;
}

}  // namespace refauction

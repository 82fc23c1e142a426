#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cc_elevation.hpp"
#include "dof_analytics.hpp"
#include "system_model.hpp"
#include "uc_scheduler.hpp"

namespace ccdyn {

// ---- snapshot serialization (1-based profile labels on the wire) ----

inline nlohmann::json snapshot_to_json(const SystemParams& sp, const NetworkSnapshot& snap) {
    nlohmann::json j;
    j["P"] = sp.P;
    j["t_bar"] = sp.t_bar;
    j["alpha"] = sp.alpha;
    j["lengths"] = snap.lengths;
    auto& users = j["users"] = nlohmann::json::array();
    for (const auto& [id, p] : snap.profile_of)
        users.push_back({{"id", id}, {"profile", p + 1}});
    return j;
}

inline std::pair<SystemParams, NetworkSnapshot> snapshot_from_json(const nlohmann::json& j) {
    auto sp = SystemParams::make(j.at("alpha").get<int>(), j.at("P").get<int>(),
                                 j.at("t_bar").get<int>());
    NetworkSnapshot snap;
    snap.P = sp.P;
    snap.lengths = j.at("lengths").get<std::vector<int>>();
    if (static_cast<int>(snap.lengths.size()) != sp.P)
        throw std::invalid_argument("lengths array must have P entries");
    for (const auto& u : j.at("users")) {
        const int id = u.at("id").get<int>();
        const int p = u.at("profile").get<int>() - 1;
        if (p < 0 || p >= sp.P)
            throw std::invalid_argument("profile label out of range");
        if (!snap.profile_of.emplace(id, p).second)
            throw std::invalid_argument("duplicate user id in snapshot");
    }
    snap.validate();
    return {sp, snap};
}

// ---- schedule export (1-based labels, golden-file friendly) ----

inline std::string render_target(const Stream& s, const ServingPlan& plan) {
    if (!s.phantom)
        return std::to_string(s.user);
    std::string out = "~" + std::to_string(s.slot.profile + 1);
    if (plan.phantoms[s.slot.profile] > 1)
        out += "." + std::to_string(s.slot.slot + 1);
    return out;
}

inline std::string render_stream(const Stream& s, const ServingPlan& plan) {
    std::string out = "(" + render_target(s, plan) + "," + std::to_string(s.packet + 1) + "," +
                      std::to_string(s.subpacket + 1) + ",{";
    bool first = true;
    for (int u : s.supp_users) {
        if (!first)
            out += ",";
        out += std::to_string(u);
        first = false;
    }
    for (const auto& ph : s.supp_phantoms) {
        if (!first)
            out += ",";
        out += "~" + std::to_string(ph.profile + 1);
        if (plan.phantoms[ph.profile] > 1)
            out += "." + std::to_string(ph.slot + 1);
        first = false;
    }
    return out + "})";
}

inline std::string render_cc_schedule(const std::vector<ElevatedTransmission>& schedule,
                                      const ServingPlan& plan, bool raw = false) {
    std::string out;
    for (const auto& et : schedule) {
        out += "CC r=" + std::to_string(et.round + 1) + " j=" + std::to_string(et.tx + 1) +
               " d=" + std::to_string(et.delta + 1) + ":";
        for (const auto& s : raw ? et.raw : et.streams)
            out += " " + render_stream(s, plan);
        out += "\n";
    }
    return out;
}

inline std::string render_uc_schedule(const std::vector<UcTransmission>& schedule) {
    std::string out;
    for (size_t t = 0; t < schedule.size(); ++t) {
        out += "UC t=" + std::to_string(t + 1) + ":";
        for (const auto& s : schedule[t].streams)
            out += " (" + std::to_string(s.user) + "," + std::to_string(s.packet + 1) + "," +
                   std::to_string(s.subpacket + 1) + ")";
        out += "\n";
    }
    return out;
}

inline std::string render_dof_report(const DofReport& rep) {
    auto rat = [](const Rational& r) {
        return to_fraction_string(r) + " (" + to_decimal_string(r) + ")";
    };
    std::string out;
    out += "eta_hat=" + std::to_string(rep.eta_hat) + "\n";
    out += "K_M=" + std::to_string(rep.K_M) + "\n";
    out += "K_U=" + std::to_string(rep.K_U) + "\n";
    out += "J_M=" + std::to_string(rep.J_M) + "\n";
    out += "T_M=" + std::to_string(rep.T_M) + "\n";
    out += "J_U=" + std::to_string(rep.J_U) + "\n";
    out += "T_U=" + std::to_string(rep.T_U) + "\n";
    out += "dof_counted=" + rat(rep.dof_counted) + "\n";
    out += "dof_closed_form=" + rat(rep.dof_closed_form) + "\n";
    out += std::string("verified=") + (rep.verified ? "true" : "false") + "\n";
    return out;
}

} // namespace ccdyn

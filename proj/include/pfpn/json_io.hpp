#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "pfpn/net.hpp"
#include "pfpn/rational.hpp"
#include "pfpn/synthesis.hpp"

namespace pfpn {

using nlohmann::json;

/// Rounds to 12 significant digits so reports are byte-stable.
inline double report_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail_input("invalid JSON document");
    return j;
}

// --- nets --------------------------------------------------------------------

inline Net net_from_json(const json& j) {
    if (!j.is_object() || !j.contains("places") || !j.contains("transitions"))
        fail_input("net document must contain \"places\" and \"transitions\"");

    std::vector<std::string> places;
    std::vector<long long> initial;
    for (const json& pj : j.at("places")) {
        if (!pj.is_object() || !pj.contains("name") || !pj.at("name").is_string())
            fail_input("place entry must have a string \"name\"");
        places.push_back(pj.at("name").get<std::string>());
        long long m = 0;
        if (pj.contains("initial")) {
            if (!pj.at("initial").is_number_integer()) fail_input("\"initial\" must be an integer");
            m = pj.at("initial").get<long long>();
            if (m < 0) fail_input("negative initial marking");
        }
        initial.push_back(m);
    }

    auto bag_of = [&](const json& bj) {
        Bag bag;
        if (!bj.is_object()) fail_input("bag must be an object of place -> multiplicity");
        for (auto it = bj.begin(); it != bj.end(); ++it) {
            int p = -1;
            for (size_t i = 0; i < places.size(); ++i)
                if (places[i] == it.key()) p = static_cast<int>(i);
            if (p < 0) fail_input("bag references unknown place: " + it.key());
            if (!it.value().is_number_integer() || it.value().get<long long>() <= 0)
                fail_input("multiplicity of " + it.key() + " must be a positive integer");
            bag.set(p, it.value().get<long long>());
        }
        return bag;
    };

    std::vector<TransitionSpec> specs;
    for (const json& tj : j.at("transitions")) {
        if (!tj.is_object() || !tj.contains("name") || !tj.at("name").is_string())
            fail_input("transition entry must have a string \"name\"");
        TransitionSpec s;
        s.name = tj.at("name").get<std::string>();
        if (tj.contains("input")) s.input = bag_of(tj.at("input"));
        if (tj.contains("output")) s.output = bag_of(tj.at("output"));
        if (tj.contains("rate")) {
            if (!tj.at("rate").is_number()) fail_input("\"rate\" must be a number");
            s.rate = tj.at("rate").get<double>();
        }
        specs.push_back(std::move(s));
    }
    return make_net(std::move(places), std::move(specs), Marking(std::move(initial)));
}

inline Net parse_net(const std::string& text) { return net_from_json(parse_json(text)); }

inline json net_to_json(const Net& net) {
    json j;
    j["places"] = json::array();
    for (size_t p = 0; p < net.place_count(); ++p)
        j["places"].push_back({{"name", net.places[p]}, {"initial", net.initial[p]}});
    j["transitions"] = json::array();
    for (size_t t = 0; t < net.transition_count(); ++t) {
        json tj;
        tj["name"] = net.transitions[t];
        tj["input"] = json::object();
        for (const auto& [p, k] : net.input[t].items) tj["input"][net.places[p]] = k;
        tj["output"] = json::object();
        for (const auto& [p, k] : net.output[t].items) tj["output"][net.places[p]] = k;
        if (net.rates) tj["rate"] = report_number((*net.rates)[t]);
        j["transitions"].push_back(std::move(tj));
    }
    return j;
}

// --- markings ------------------------------------------------------------------

/// Markings travel as {place: count}; absent places are zero.
inline Marking marking_from_json(const json& j, const Net& net) {
    if (!j.is_object()) fail_input("marking must be an object of place -> count");
    Marking m(net.place_count());
    for (auto it = j.begin(); it != j.end(); ++it) {
        int p = net.place_index(it.key());
        if (p < 0) fail_input("marking references unknown place: " + it.key());
        if (!it.value().is_number_integer()) fail_input("marking counts must be integers");
        m[p] = it.value().get<long long>();
    }
    return m;
}

inline json marking_to_json(const Net& net, const Marking& m) {
    json j = json::object();
    for (size_t p = 0; p < net.place_count(); ++p)
        if (m[p] != 0) j[net.places[p]] = m[p];
    return j;
}

/// Comma-joined counts in place order, the stable key used by distributions.
inline std::string marking_key(const Marking& m) {
    std::string s;
    for (size_t p = 0; p < m.size(); ++p) {
        if (p) s += ",";
        s += std::to_string(m[p]);
    }
    return s;
}

// --- rule scripts ---------------------------------------------------------------

inline json script_to_json(const RuleScript& script) {
    json arr = json::array();
    for (const RuleApplication& app : script) {
        json j;
        switch (app.kind) {
        case RuleApplication::Kind::s_add:
            j["rule"] = "s-add";
            j["machine"] = net_to_json(app.machine);
            break;
        case RuleApplication::Kind::c_update: {
            j["rule"] = "c-update";
            json c = json::object();
            for (const auto& [name, k] : app.complex) c[name] = k;
            j["complex"] = std::move(c);
            j["place"] = app.place;
            j["lambda"] = app.lambda;
            break;
        }
        case RuleApplication::Kind::p_delete:
            j["rule"] = "p-delete";
            j["place"] = app.place;
            break;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

inline RuleScript script_from_json(const json& arr) {
    if (!arr.is_array()) fail_input("rule script must be a JSON array");
    RuleScript script;
    for (const json& j : arr) {
        if (!j.is_object() || !j.contains("rule")) fail_input("rule entry must have \"rule\"");
        const std::string kind = j.at("rule").get<std::string>();
        RuleApplication app;
        if (kind == "s-add") {
            app.kind = RuleApplication::Kind::s_add;
            app.machine = net_from_json(j.at("machine"));
        } else if (kind == "c-update") {
            app.kind = RuleApplication::Kind::c_update;
            for (auto it = j.at("complex").begin(); it != j.at("complex").end(); ++it)
                app.complex[it.key()] = it.value().get<long long>();
            app.place = j.at("place").get<std::string>();
            app.lambda = j.at("lambda").get<long long>();
            if (app.lambda == 0) fail_input("lambda must be nonzero");
        } else if (kind == "p-delete") {
            app.kind = RuleApplication::Kind::p_delete;
            app.place = j.at("place").get<std::string>();
        } else {
            fail_input("unknown rule kind: " + kind);
        }
        script.push_back(std::move(app));
    }
    return script;
}

// --- rationals -------------------------------------------------------------------

inline json rational_to_json(const Rational& r) { return r.str(); }

inline json rational_vector_to_json(const Net& net, const std::vector<Rational>& v) {
    json j = json::object();
    for (size_t p = 0; p < v.size(); ++p)
        if (!v[p].is_zero()) j[net.places[p]] = v[p].str();
    return j;
}

} // namespace pfpn

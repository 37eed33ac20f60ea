#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pfpn/error.hpp"

namespace pfpn {

/// Sparse multiset of places, used for input/output bags and complexes.
/// Entries are (place index, multiplicity > 0), sorted by place index, so
/// bags compare and hash canonically.
struct Bag {
    std::vector<std::pair<int, long long>> items;

    long long count(int place) const {
        for (const auto& [p, k] : items)
            if (p == place) return k;
        return 0;
    }
    long long total() const {
        long long s = 0;
        for (const auto& [p, k] : items) s += k;
        return s;
    }
    bool empty() const { return items.empty(); }
    size_t support_size() const { return items.size(); }

    void set(int place, long long k) {
        auto it = std::lower_bound(items.begin(), items.end(), place,
                                   [](const auto& e, int p) { return e.first < p; });
        if (it != items.end() && it->first == place) {
            if (k == 0) items.erase(it);
            else it->second = k;
        } else if (k != 0) {
            items.insert(it, {place, k});
        }
    }
    void add(int place, long long delta) { set(place, count(place) + delta); }

    friend bool operator==(const Bag&, const Bag&) = default;
    friend auto operator<=>(const Bag& a, const Bag& b) { return a.items <=> b.items; }
};

/// Dense integer vector over the places of a net. Non-negative when used as a
/// state; marking witnesses reuse the type with possibly negative entries.
struct Marking {
    std::vector<long long> v;

    Marking() = default;
    explicit Marking(size_t n) : v(n, 0) {}
    explicit Marking(std::vector<long long> values) : v(std::move(values)) {}

    size_t size() const { return v.size(); }
    long long& operator[](size_t i) { return v[i]; }
    long long operator[](size_t i) const { return v[i]; }
    bool non_negative() const {
        return std::all_of(v.begin(), v.end(), [](long long x) { return x >= 0; });
    }
    bool covers(const Bag& b) const {
        return std::all_of(b.items.begin(), b.items.end(),
                           [&](const auto& e) { return v[e.first] >= e.second; });
    }
    Marking& apply(const Bag& sub, const Bag& add) {
        for (const auto& [p, k] : sub.items) v[p] -= k;
        for (const auto& [p, k] : add.items) v[p] += k;
        return *this;
    }
    long long total() const {
        long long s = 0;
        for (long long x : v) s += x;
        return s;
    }

    friend bool operator==(const Marking&, const Marking&) = default;
    friend auto operator<=>(const Marking& a, const Marking& b) { return a.v <=> b.v; }
};

struct MarkingHash {
    size_t operator()(const Marking& m) const {
        size_t h = 1469598103934665603ull;
        for (long long x : m.v) {
            h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct TransitionSpec {
    std::string name;
    Bag input;
    Bag output;
    std::optional<double> rate;
};

/// Immutable place/transition net. Construct through make_net so the
/// structural assumptions hold everywhere downstream: unique names, no
/// transition with equal input and output bag, no two transitions sharing
/// both bags.
struct Net {
    std::vector<std::string> places;
    std::vector<std::string> transitions;
    std::vector<Bag> input;   // input[t] = bag consumed by t
    std::vector<Bag> output;  // output[t] = bag produced by t
    Marking initial;
    std::optional<std::vector<double>> rates;

    size_t place_count() const { return places.size(); }
    size_t transition_count() const { return transitions.size(); }

    int place_index(const std::string& name) const {
        for (size_t i = 0; i < places.size(); ++i)
            if (places[i] == name) return static_cast<int>(i);
        return -1;
    }
    int transition_index(const std::string& name) const {
        for (size_t i = 0; i < transitions.size(); ++i)
            if (transitions[i] == name) return static_cast<int>(i);
        return -1;
    }

    /// Column of the incidence matrix W = W+ - W- for transition t.
    std::vector<long long> incidence_column(int t) const {
        std::vector<long long> w(places.size(), 0);
        for (const auto& [p, k] : input[t].items) w[p] -= k;
        for (const auto& [p, k] : output[t].items) w[p] += k;
        return w;
    }

    friend bool operator==(const Net&, const Net&) = default;
};

inline Net make_net(std::vector<std::string> place_names,
                    std::vector<TransitionSpec> transition_specs,
                    Marking initial_marking = {}) {
    Net net;
    net.places = std::move(place_names);

    std::set<std::string> seen;
    for (const auto& p : net.places)
        if (!seen.insert(p).second) fail_input("duplicate place name: " + p);

    if (initial_marking.size() == 0) initial_marking = Marking(net.places.size());
    if (initial_marking.size() != net.places.size())
        fail_input("initial marking size does not match place count");
    if (!initial_marking.non_negative()) fail_input("initial marking must be non-negative");
    net.initial = std::move(initial_marking);

    bool any_rate = false, all_rates = true;
    std::set<std::pair<Bag, Bag>> bag_pairs;
    for (auto& spec : transition_specs) {
        if (!seen.insert(spec.name).second)
            fail_input("duplicate or place-colliding transition name: " + spec.name);
        for (const auto& bag : {spec.input, spec.output})
            for (const auto& [p, k] : bag.items) {
                if (p < 0 || p >= static_cast<int>(net.places.size()))
                    fail_input("bag references unknown place");
                if (k <= 0) fail_input("bag multiplicities must be positive");
            }
        if (spec.input == spec.output)
            fail_input("transition " + spec.name + " has equal input and output bag");
        if (!bag_pairs.insert({spec.input, spec.output}).second)
            fail_input("two transitions share input and output bags");
        if (spec.rate) {
            any_rate = true;
            if (*spec.rate <= 0) fail_input("rate of " + spec.name + " must be positive");
        } else {
            all_rates = false;
        }
        net.transitions.push_back(std::move(spec.name));
        net.input.push_back(std::move(spec.input));
        net.output.push_back(std::move(spec.output));
    }
    if (any_rate && !all_rates) fail_input("rates must be given for all transitions or none");
    if (any_rate) {
        std::vector<double> r;
        for (const auto& spec : transition_specs) r.push_back(*spec.rate);
        net.rates = std::move(r);
    }
    return net;
}

inline std::vector<int> enabled_transitions(const Net& net, const Marking& m) {
    std::vector<int> out;
    for (size_t t = 0; t < net.transition_count(); ++t)
        if (m.covers(net.input[t])) out.push_back(static_cast<int>(t));
    return out;
}

inline Marking fire(const Net& net, const Marking& m, int t) {
    if (t < 0 || t >= static_cast<int>(net.transition_count()))
        fail_input("unknown transition index");
    if (!m.covers(net.input[t]))
        fail_property("transition " + net.transitions[t] + " is not enabled");
    Marking next = m;
    next.apply(net.input[t], net.output[t]);
    return next;
}

/// The four structural shape predicates of the classical net taxonomy.
struct ShapeReport {
    bool is_state_machine = false;
    bool is_marked_graph = false;
    bool is_free_choice = false;
    bool is_symmetric = false;
};

inline ShapeReport classify_shape(const Net& net) {
    ShapeReport r;
    r.is_state_machine = true;
    for (size_t t = 0; t < net.transition_count(); ++t)
        if (net.input[t].total() != 1 || net.output[t].total() != 1) {
            r.is_state_machine = false;
            break;
        }

    r.is_marked_graph = true;
    for (size_t p = 0; p < net.place_count() && r.is_marked_graph; ++p) {
        long long in = 0, out = 0;
        for (size_t t = 0; t < net.transition_count(); ++t) {
            in += net.output[t].count(static_cast<int>(p));
            out += net.input[t].count(static_cast<int>(p));
        }
        if (in != 1 || out != 1) r.is_marked_graph = false;
    }

    // free choice compares input supports: pairwise disjoint or equal
    r.is_free_choice = true;
    auto support = [](const Bag& b) {
        std::vector<int> s;
        for (const auto& [p, k] : b.items) s.push_back(p);
        return s;
    };
    for (size_t t1 = 0; t1 < net.transition_count() && r.is_free_choice; ++t1)
        for (size_t t2 = t1 + 1; t2 < net.transition_count(); ++t2) {
            auto s1 = support(net.input[t1]), s2 = support(net.input[t2]);
            std::vector<int> inter;
            std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                                  std::back_inserter(inter));
            if (!inter.empty() && s1 != s2) {
                r.is_free_choice = false;
                break;
            }
        }

    r.is_symmetric = true;
    std::set<std::pair<Bag, Bag>> pairs;
    for (size_t t = 0; t < net.transition_count(); ++t)
        pairs.insert({net.input[t], net.output[t]});
    for (size_t t = 0; t < net.transition_count(); ++t)
        if (!pairs.count({net.output[t], net.input[t]})) {
            r.is_symmetric = false;
            break;
        }
    return r;
}

/// Index of the reverse transition of t (same bags swapped), or -1.
inline int reverse_transition(const Net& net, int t) {
    for (size_t u = 0; u < net.transition_count(); ++u)
        if (net.input[u] == net.output[t] && net.output[u] == net.input[t])
            return static_cast<int>(u);
    return -1;
}

} // namespace pfpn

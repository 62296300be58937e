#pragma once

// Seeded synthetic NetFlow-style records for offline runs and tests.
//
// Class counts are exact: n * weight_c rounded by largest remainder (ties to
// the lower class), then the label sequence is shuffled. Rows are drawn in
// two passes, normal rows first and attack rows second, each in row order,
// from one xoshiro256** stream (derive_seed(seed, synth)).
//
// Normal traffic (Label 0, Attack "Benign"):
//   L4_DST_PORT  80 .30 | 443 .30 | 53 .15 | 22 .05 | 25 .05 | 123 .05 |
//                3306 .05 | ephemeral U[49152, 65535] .05
//   L7_PROTO     the port's application (80->7, 443->91, 53->5, 22->92,
//                25->3, 123->9, 3306->20, ephemeral->0), replaced by 0 with p .10
//   TCP_FLAGS    UDP (53, 123): 0; otherwise 27 .45 | 31 .15 | 30 .20 | 24 .20
// Attack traffic (Label 1), category Exploits .35 | Fuzzers .25 |
// Reconnaissance .20 | DoS .10 | Generic .10:
//   Exploits        port 80 .4 | 443 .1 | 445 .2 | 21 .1 | U[1, 1024] .2;
//                   L7 7 .5 | 0 .5; flags 27 .3 | 31 .3 | 26 .2 | 19 .2
//   Fuzzers         port U[1, 65535]; L7 0; flags 22 .4 | 2 .3 | 20 .3
//   Reconnaissance  port U[1, 1024]; L7 0; flags 2 .6 | 20 .2 | 0 .2
//   DoS             port 80 .6 | 53 .2 | U[1, 65535] .2; L7 7 | 5 | 0 equally;
//                   flags 2 .5 | 0 .3 | 31 .2
//   Generic         port 53 .7 | U[1, 65535] .3; L7 5 .7 | 0 .3; flags 0
// The marginals overlap (ports 80/443/53, flags 27/31, L7 7/5/0), but an
// attack row whose (port, L7, flags) triple already occurs among normal rows
// is redrawn, up to 64 times, then falls back to (U[1024, 65535], 0, 2); no
// normal row carries flags 2. The selected features therefore never carry
// conflicting labels and an unrestricted tree can fit the training set
// exactly. Address columns follow UNSW-NB15 conventions (attackers in
// 175.45.176.0/24), which is why they must never be used as features.

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "flowguard/errors.hpp"
#include "flowguard/flowdata.hpp"
#include "flowguard/random.hpp"

namespace flowguard::pipeline {

/// Full column set written by the generator (a NetFlow-variant subset).
inline FlowSchema synthetic_schema() {
    FlowSchema s = default_schema();
    s.columns = {{"IPV4_SRC_ADDR", ColumnKind::text}, {"L4_SRC_PORT", ColumnKind::integer},
                 {"IPV4_DST_ADDR", ColumnKind::text}, {"L4_DST_PORT", ColumnKind::integer},
                 {"PROTOCOL", ColumnKind::integer},   {"L7_PROTO", ColumnKind::real},
                 {"IN_BYTES", ColumnKind::integer},   {"OUT_BYTES", ColumnKind::integer},
                 {"IN_PKTS", ColumnKind::integer},    {"OUT_PKTS", ColumnKind::integer},
                 {"TCP_FLAGS", ColumnKind::integer},  {"FLOW_DURATION_MILLISECONDS", ColumnKind::integer},
                 {"Label", ColumnKind::integer},      {"Attack", ColumnKind::text}};
    return s;
}

/// Exact per-class counts for n rows by largest remainder.
inline std::vector<std::size_t> class_counts(std::size_t n, const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) {
        if (!(w >= 0)) throw InvalidArgument("class weights must be non-negative");
        total += w;
    }
    if (!(total > 0)) throw InvalidArgument("class weights must not all be zero");
    std::vector<std::size_t> counts(weights.size());
    std::vector<std::pair<double, std::size_t>> remainder;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        const double exact = static_cast<double>(n) * weights[c] / total;
        counts[c] = static_cast<std::size_t>(exact);
        assigned += counts[c];
        remainder.emplace_back(exact - static_cast<double>(counts[c]), c);
    }
    std::stable_sort(remainder.begin(), remainder.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainder[i % remainder.size()].second];
    return counts;
}

namespace detail {

struct Choice {
    double weight;
    std::int64_t value;
};

inline std::int64_t pick(Rng& rng, std::initializer_list<Choice> choices) {
    double u = rng.uniform(), acc = 0;
    std::int64_t last = 0;
    for (const auto& c : choices) {
        acc += c.weight;
        last = c.value;
        if (u < acc) return c.value;
    }
    return last;
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

// Sentinel for "uniform port range" choices.
inline constexpr std::int64_t any_low = -1, any_port = -2, ephemeral = -3;

inline std::int64_t resolve_port(Rng& rng, std::int64_t p) {
    switch (p) {
        case any_low: return uniform_int(rng, 1, 1024);
        case any_port: return uniform_int(rng, 1, 65535);
        case ephemeral: return uniform_int(rng, 49152, 65535);
        default: return p;
    }
}

struct FlowFeatures {
    std::int64_t port;
    double l7;
    std::int64_t flags;
};

inline double l7_for_port(std::int64_t port) {
    switch (port) {
        case 80: return 7;
        case 443: return 91;
        case 53: return 5;
        case 22: return 92;
        case 25: return 3;
        case 123: return 9;
        case 3306: return 20;
        default: return 0;
    }
}

inline FlowFeatures normal_flow(Rng& rng) {
    FlowFeatures f{};
    f.port = resolve_port(rng, pick(rng, {{.30, 80}, {.30, 443}, {.15, 53}, {.05, 22}, {.05, 25}, {.05, 123},
                                          {.05, 3306}, {.05, ephemeral}}));
    f.l7 = rng.uniform() < 0.10 ? 0.0 : l7_for_port(f.port);
    f.flags = (f.port == 53 || f.port == 123) ? 0 : pick(rng, {{.45, 27}, {.15, 31}, {.20, 30}, {.20, 24}});
    return f;
}

inline const std::vector<std::string>& attack_categories() {
    static const std::vector<std::string> c{"Exploits", "Fuzzers", "Reconnaissance", "DoS", "Generic"};
    return c;
}

inline FlowFeatures attack_flow(Rng& rng, std::size_t category) {
    FlowFeatures f{};
    switch (category) {
        case 0:
            f.port = resolve_port(rng, pick(rng, {{.4, 80}, {.1, 443}, {.2, 445}, {.1, 21}, {.2, any_low}}));
            f.l7 = rng.uniform() < 0.5 ? 7.0 : 0.0;
            f.flags = pick(rng, {{.3, 27}, {.3, 31}, {.2, 26}, {.2, 19}});
            break;
        case 1:
            f.port = resolve_port(rng, any_port);
            f.l7 = 0;
            f.flags = pick(rng, {{.4, 22}, {.3, 2}, {.3, 20}});
            break;
        case 2:
            f.port = resolve_port(rng, any_low);
            f.l7 = 0;
            f.flags = pick(rng, {{.6, 2}, {.2, 20}, {.2, 0}});
            break;
        case 3:
            f.port = resolve_port(rng, pick(rng, {{.6, 80}, {.2, 53}, {.2, any_port}}));
            f.l7 = static_cast<double>(pick(rng, {{1.0 / 3, 7}, {1.0 / 3, 5}, {1.0 / 3, 0}}));
            f.flags = pick(rng, {{.5, 2}, {.3, 0}, {.2, 31}});
            break;
        default:
            f.port = resolve_port(rng, pick(rng, {{.7, 53}, {.3, any_port}}));
            f.l7 = rng.uniform() < 0.7 ? 5.0 : 0.0;
            f.flags = 0;
    }
    return f;
}

}  // namespace detail

/// `weights` are (normal, attack) proportions.
inline RecordTable generate_synthetic(std::size_t n, const std::vector<double>& weights, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("synthetic fixture needs at least one row");
    if (weights.size() != 2) throw InvalidArgument("synthetic fixture takes exactly two class weights (normal, attack)");
    const auto counts = class_counts(n, weights);
    Rng rng(derive_seed(seed, streams::synth));

    std::vector<int> labels;
    labels.insert(labels.end(), counts[0], 0);
    labels.insert(labels.end(), counts[1], 1);
    rng.shuffle(std::span(labels));

    RecordTable table{synthetic_schema(), std::vector<Row>(n), 0};
    using Triple = std::tuple<std::int64_t, double, std::int64_t>;
    std::set<Triple> normal_triples;

    auto emit = [&](std::size_t i, const detail::FlowFeatures& f, int label, const std::string& attack) {
        const bool udp = f.flags == 0 && (f.port == 53 || f.port == 123);
        const std::string src = label ? "175.45.176." + std::to_string(detail::uniform_int(rng, 0, 3))
                                      : "59.166.0." + std::to_string(detail::uniform_int(rng, 0, 9));
        const std::string dst = "149.171.126." + std::to_string(detail::uniform_int(rng, 0, 19));
        const std::int64_t in_pkts = detail::uniform_int(rng, 1, label ? 8 : 40);
        const std::int64_t out_pkts = label ? detail::uniform_int(rng, 0, 4) : detail::uniform_int(rng, 1, 40);
        table.rows[i] = Row{src,
                            detail::uniform_int(rng, 1024, 65535),
                            dst,
                            f.port,
                            std::int64_t{udp ? 17 : 6},
                            f.l7,
                            in_pkts * detail::uniform_int(rng, 40, 1500),
                            out_pkts * detail::uniform_int(rng, 40, 1500),
                            in_pkts,
                            out_pkts,
                            f.flags,
                            detail::uniform_int(rng, 0, label ? 500 : 5000),
                            std::int64_t{label},
                            attack};
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != 0) continue;
        const auto f = detail::normal_flow(rng);
        normal_triples.emplace(f.port, f.l7, f.flags);
        emit(i, f, 0, "Benign");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != 1) continue;
        const std::size_t cat = static_cast<std::size_t>(
            detail::pick(rng, {{.35, 0}, {.25, 1}, {.20, 2}, {.10, 3}, {.10, 4}}));
        detail::FlowFeatures f{};
        bool ok = false;
        for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
            f = detail::attack_flow(rng, cat);
            ok = !normal_triples.count({f.port, f.l7, f.flags});
        }
        if (!ok) f = {detail::uniform_int(rng, 1024, 65535), 0.0, 2};
        emit(i, f, 1, detail::attack_categories()[cat]);
    }
    return table;
}

}  // namespace flowguard::pipeline

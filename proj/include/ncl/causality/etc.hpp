#ifndef NCL_CAUSALITY_ETC_HPP
#define NCL_CAUSALITY_ETC_HPP

/** @file
 * Binning and Effort-To-Compress (ETC).
 *
 * ETC counts the iterations of Non-Sequential Recursive Pair Substitution
 * needed to reduce a symbol sequence to a constant one (or a single symbol).
 * Each iteration replaces every non-overlapping occurrence of the most
 * frequent adjacent pair by a fresh symbol.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ncl/error.hpp"

namespace ncl {

using symbol = std::uint32_t;

struct symbol_sequence {
    std::vector<symbol> symbols;
    std::size_t alphabet_size = 0;
};

/// Equal-width binning of [min, max] into B bins; the maximum maps to B-1.
inline symbol_sequence symbolize(std::span<const double> values, std::size_t bins) {
    if (bins < 2) throw config_error("symbolize: need at least two bins");
    if (values.empty()) throw config_error("symbolize: empty series");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn, hi = *mx;
    if (!(hi > lo)) throw config_error("symbolize: constant series has no range to bin");
    symbol_sequence out;
    out.alphabet_size = bins;
    out.symbols.reserve(values.size());
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        auto k = static_cast<std::size_t>(std::floor((v - lo) / width));
        out.symbols.push_back(static_cast<symbol>(std::min(k, bins - 1)));
    }
    return out;
}

namespace detail {

struct pair_stats {
    std::size_t count = 0;
    std::size_t first = 0;
    std::size_t next_free = 0; // earliest index a further non-overlapping occurrence may start at
};

inline bool homogeneous(const std::vector<symbol>& s) {
    return std::adjacent_find(s.begin(), s.end(), std::not_equal_to<>()) == s.end();
}

inline std::uint64_t pair_key(symbol a, symbol b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// Number of NSRPS substitutions until `s` is constant or a single symbol.
inline std::size_t nsrps(std::vector<symbol> s) {
    std::size_t steps = 0;
    symbol fresh = s.empty() ? 0 : *std::max_element(s.begin(), s.end()) + 1;
    std::unordered_map<std::uint64_t, pair_stats> stats;
    std::vector<symbol> next;
    while (s.size() > 1 && !homogeneous(s)) {
        stats.clear();
        std::uint64_t best_key = 0;
        std::size_t best_count = 0, best_first = 0;
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            const auto key = pair_key(s[i], s[i + 1]);
            auto [it, inserted] = stats.try_emplace(key);
            auto& st = it->second;
            if (inserted) st.first = i;
            if (inserted || i >= st.next_free) {
                ++st.count;
                st.next_free = i + 2;
            }
            if (st.count > best_count || (st.count == best_count && st.first < best_first)) {
                best_key = key;
                best_count = st.count;
                best_first = st.first;
            }
        }
        const auto a = static_cast<symbol>(best_key >> 32);
        const auto b = static_cast<symbol>(best_key & 0xffffffffu);
        next.clear();
        for (std::size_t i = 0; i < s.size();) {
            if (i + 1 < s.size() && s[i] == a && s[i + 1] == b) {
                next.push_back(fresh);
                i += 2;
            } else {
                next.push_back(s[i]);
                ++i;
            }
        }
        s.swap(next);
        ++fresh;
        ++steps;
    }
    return steps;
}

} // namespace detail

/// Raw ETC: number of NSRPS substitutions.
inline std::size_t etc(std::span<const symbol> seq) {
    if (seq.empty()) throw config_error("etc: empty sequence");
    return detail::nsrps(std::vector<symbol>(seq.begin(), seq.end()));
}

inline std::size_t etc(const symbol_sequence& seq) { return etc(seq.symbols); }

/// ETC divided by (length - 1); 0 for a single symbol.
inline double etc_normalized(std::span<const symbol> seq) {
    const auto raw = etc(seq);
    return seq.size() > 1 ? static_cast<double>(raw) / static_cast<double>(seq.size() - 1) : 0.0;
}

/// Pairs (a(i), b(i)) relabelled as compound symbols in order of first appearance.
inline std::vector<symbol> compound_sequence(std::span<const symbol> a, std::span<const symbol> b) {
    if (a.size() != b.size()) throw dimension_error("etc_joint: sequences differ in length");
    std::unordered_map<std::uint64_t, symbol> ids;
    std::vector<symbol> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto [it, inserted] = ids.try_emplace(detail::pair_key(a[i], b[i]), static_cast<symbol>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

inline std::size_t etc_joint(std::span<const symbol> a, std::span<const symbol> b) {
    if (a.empty()) throw config_error("etc_joint: empty sequence");
    return detail::nsrps(compound_sequence(a, b));
}

inline std::size_t etc_joint(const symbol_sequence& a, const symbol_sequence& b) {
    return etc_joint(a.symbols, b.symbols);
}

inline double etc_joint_normalized(std::span<const symbol> a, std::span<const symbol> b) {
    const auto raw = etc_joint(a, b);
    return a.size() > 1 ? static_cast<double>(raw) / static_cast<double>(a.size() - 1) : 0.0;
}

} // namespace ncl

#endif // NCL_CAUSALITY_ETC_HPP

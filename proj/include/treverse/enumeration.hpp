/**
 * @file enumeration.hpp
 * @brief Counting and enumerating signed-permutation time-reversal operations.
 *
 * Binary operations are symmetric orthogonal involutions built from 1- and
 * 2-cycles, each cycle carrying a free sign. The quantum-only antisymmetric
 * family tiles the index set with 2-cycles whose two entries carry opposite
 * signs, so that A^2 = -I.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "treverse/errors.hpp"
#include "treverse/symmetry_core.hpp"

namespace treverse {

inline constexpr int kEnumerationCap = 8;

/// Cycle type {r1, r2} of an involution in S_M.
struct ConjClass {
    int r1 = 0;
    int r2 = 0;
    int m = 0;

    [[nodiscard]] bool valid() const noexcept { return r1 >= 0 && r2 >= 0 && m >= 1 && r1 + 2 * r2 == m; }

    friend bool operator==(const ConjClass&, const ConjClass&) = default;
};

/// Row lengths of a Young tableau, non-increasing, all positive.
struct YoungTableau {
    std::vector<int> rows;

    friend bool operator==(const YoungTableau&, const YoungTableau&) = default;
};

/// Rows a_l with r_l = a_l - a_{l+1}: a_1 = r1 + r2, a_2 = r2.
inline YoungTableau tableau_of(const ConjClass& c) {
    if (!c.valid()) throw InvalidArgument("tableau_of: invalid conjugation class");
    YoungTableau t;
    if (c.r1 + c.r2 > 0) t.rows.push_back(c.r1 + c.r2);
    if (c.r2 > 0) t.rows.push_back(c.r2);
    return t;
}

inline ConjClass class_of(const YoungTableau& t) {
    std::vector<int> r(t.rows.size(), 0);
    int total = 0;
    for (std::size_t l = 0; l < t.rows.size(); ++l) {
        const int a = t.rows[l];
        const int next = l + 1 < t.rows.size() ? t.rows[l + 1] : 0;
        if (a <= 0 || next > a) throw InvalidArgument("class_of: rows must be positive and non-increasing");
        r[l] = a - next;
    }
    ConjClass c;
    for (std::size_t l = 0; l < r.size(); ++l) {
        total += static_cast<int>(l + 1) * r[l];
        if (l >= 2 && r[l] != 0)
            throw InvalidArgument("class_of: tableau describes cycles of order >= 3 (not an involution class)");
    }
    c.r1 = r.empty() ? 0 : r[0];
    c.r2 = r.size() > 1 ? r[1] : 0;
    c.m = total;
    return c;
}

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        throw CountOverflow("count exceeds 64-bit range");
    return a * b;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (b > std::numeric_limits<std::uint64_t>::max() - a) throw CountOverflow("count exceeds 64-bit range");
    return a + b;
}

/// n! / k! for k <= n.
inline std::uint64_t falling(int n, int k) {
    std::uint64_t v = 1;
    for (int i = k + 1; i <= n; ++i) v = checked_mul(v, static_cast<std::uint64_t>(i));
    return v;
}

inline std::uint64_t factorial(int n) { return falling(n, 0); }

}  // namespace detail

/// M! / (1^r1 r1! 2^r2 r2!).
inline std::uint64_t class_size(const ConjClass& c) {
    if (!c.valid()) throw InvalidArgument("class_size: constraint r1 + 2 r2 = M violated");
    // M!/r1! first, then divide by 2^r2 r2! which divides it exactly.
    std::uint64_t v = detail::falling(c.m, c.r1);
    for (int i = 1; i <= c.r2; ++i) v /= 2 * static_cast<std::uint64_t>(i);
    return v;
}

/// sum_{r2} M! 2^{M-2 r2} / ((M-2 r2)! r2!).
inline std::uint64_t count_binary(int m) {
    if (m <= 0) throw InvalidArgument("count_binary: dimension must be >= 1");
    std::uint64_t total = 0;
    for (int r2 = 0; 2 * r2 <= m; ++r2) {
        const int r1 = m - 2 * r2;
        std::uint64_t term = detail::falling(m, r1);  // M!/(M-2r2)!
        term /= detail::factorial(r2);
        term = detail::checked_mul(term, std::uint64_t{1} << r1);
        total = detail::checked_add(total, term);
    }
    return total;
}

/// M! / (M/2)!.
inline std::uint64_t count_antisymmetric(int m) {
    if (m <= 0) throw InvalidArgument("count_antisymmetric: dimension must be >= 1");
    if (m % 2 != 0)
        throw NoAntisymmetricFamily("no real antisymmetric orthogonal A with A^2 = -I exists in odd dimension " +
                                    std::to_string(m));
    return detail::falling(m, m / 2);
}

struct ClassEntry {
    ConjClass cls;
    YoungTableau tableau;
    std::uint64_t size = 0;
};

/// All involution classes of S_M, r2 ascending.
inline std::vector<ClassEntry> classes_for(int m) {
    if (m <= 0) throw InvalidArgument("classes_for: dimension must be >= 1");
    std::vector<ClassEntry> out;
    for (int r2 = 0; 2 * r2 <= m; ++r2) {
        ConjClass c{m - 2 * r2, r2, m};
        out.push_back({c, tableau_of(c), class_size(c)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

inline std::string signed_list_id(const SignedPermutation& sp) {
    std::string s = "signed:";
    for (int i = 0; i < sp.dim(); ++i) {
        if (i) s += ',';
        s += std::to_string(sp.sign[static_cast<std::size_t>(i)] * (sp.perm[static_cast<std::size_t>(i)] + 1));
    }
    return s;
}

/// Readable id; 3x3 ops use the `diag:` / `perm:swapXY:s,t` grammar.
inline std::string op_id(const SignedPermutation& sp) {
    if (sp.dim() != 3) return signed_list_id(sp);
    const auto& p = sp.perm;
    const auto& s = sp.sign;
    if (p[0] == 0 && p[1] == 1 && p[2] == 2)
        return "diag:" + std::to_string(s[0]) + "," + std::to_string(s[1]) + "," + std::to_string(s[2]);
    static constexpr const char* axes = "xyz";
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            const int c = 3 - a - b;
            if (p[static_cast<std::size_t>(a)] == b && p[static_cast<std::size_t>(b)] == a &&
                p[static_cast<std::size_t>(c)] == c && s[static_cast<std::size_t>(a)] == s[static_cast<std::size_t>(b)])
                return std::string("perm:swap") + axes[a] + axes[b] + ":" + std::to_string(s[static_cast<std::size_t>(a)]) +
                       "," + std::to_string(s[static_cast<std::size_t>(c)]);
        }
    return signed_list_id(sp);
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

struct TaggedOp {
    TimeReversalOp op;
    ConjClass cls;
};

namespace detail {

/// Every involution of {0..m-1} (as perm arrays).
inline void involutions(std::vector<int>& perm, std::vector<std::vector<int>>& out) {
    const auto it = std::find(perm.begin(), perm.end(), -1);
    if (it == perm.end()) {
        out.push_back(perm);
        return;
    }
    const int i = static_cast<int>(it - perm.begin());
    perm[static_cast<std::size_t>(i)] = i;
    involutions(perm, out);
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < perm.size(); ++j) {
        if (perm[j] != -1) continue;
        perm[static_cast<std::size_t>(i)] = static_cast<int>(j);
        perm[j] = i;
        involutions(perm, out);
        perm[j] = -1;
    }
    perm[static_cast<std::size_t>(i)] = -1;
}

inline void sort_ops(std::vector<TaggedOp>& ops) {
    std::stable_sort(ops.begin(), ops.end(), [](const TaggedOp& a, const TaggedOp& b) {
        const auto& ea = *a.op.exact();
        const auto& eb = *b.op.exact();
        return std::tie(a.cls.r2, ea.perm, ea.sign) < std::tie(b.cls.r2, eb.perm, eb.sign);
    });
}

}  // namespace detail

/// All orthogonal involutory signed permutations of dimension M.
inline std::vector<TaggedOp> enumerate_binary(int m, int cap = kEnumerationCap) {
    if (m <= 0) throw InvalidArgument("enumerate_binary: dimension must be >= 1");
    if (m > cap) throw CapExceeded("enumerate_binary: M = " + std::to_string(m) + " exceeds cap " + std::to_string(cap));
    std::vector<int> perm(static_cast<std::size_t>(m), -1);
    std::vector<std::vector<int>> invs;
    detail::involutions(perm, invs);

    std::vector<TaggedOp> out;
    out.reserve(count_binary(m));
    for (const auto& p : invs) {
        // one free sign per cycle: fixed points and the lower index of each 2-cycle
        std::vector<int> heads;
        for (int i = 0; i < m; ++i)
            if (p[static_cast<std::size_t>(i)] >= i) heads.push_back(i);
        const int r2 = static_cast<int>(std::count_if(heads.begin(), heads.end(),
                                                      [&](int i) { return p[static_cast<std::size_t>(i)] != i; }));
        const ConjClass cls{m - 2 * r2, r2, m};
        for (std::uint32_t mask = 0; mask < (1u << heads.size()); ++mask) {
            std::vector<int> sign(static_cast<std::size_t>(m), 1);
            for (std::size_t h = 0; h < heads.size(); ++h) {
                const int s = (mask >> h) & 1u ? -1 : 1;
                sign[static_cast<std::size_t>(heads[h])] = s;
                sign[static_cast<std::size_t>(p[static_cast<std::size_t>(heads[h])])] = s;
            }
            SignedPermutation sp(p, std::move(sign));
            std::string id = op_id(sp);
            out.push_back({TimeReversalOp(std::move(sp), OpKind::BinarySignedPermutation, std::move(id)), cls});
        }
    }
    detail::sort_ops(out);
    return out;
}

/// Signed 2-cycle tilings with opposite signs inside each cycle (A^2 = -I).
inline std::vector<TaggedOp> enumerate_antisymmetric(int m, int cap = kEnumerationCap) {
    if (m <= 0) throw InvalidArgument("enumerate_antisymmetric: dimension must be >= 1");
    if (m % 2 != 0) throw NoAntisymmetricFamily("odd dimension " + std::to_string(m) + " admits no antisymmetric family");
    if (m > cap)
        throw CapExceeded("enumerate_antisymmetric: M = " + std::to_string(m) + " exceeds cap " + std::to_string(cap));
    std::vector<int> perm(static_cast<std::size_t>(m), -1);
    std::vector<std::vector<int>> invs;
    detail::involutions(perm, invs);

    std::vector<TaggedOp> out;
    const ConjClass cls{0, m / 2, m};
    for (const auto& p : invs) {
        bool fixed_point_free = true;
        for (int i = 0; i < m; ++i) fixed_point_free &= p[static_cast<std::size_t>(i)] != i;
        if (!fixed_point_free) continue;
        std::vector<int> heads;
        for (int i = 0; i < m; ++i)
            if (p[static_cast<std::size_t>(i)] > i) heads.push_back(i);
        for (std::uint32_t mask = 0; mask < (1u << heads.size()); ++mask) {
            std::vector<int> sign(static_cast<std::size_t>(m), 1);
            for (std::size_t h = 0; h < heads.size(); ++h) {
                // block [[0, -1], [1, 0]] or its transpose
                const int s = (mask >> h) & 1u ? 1 : -1;
                sign[static_cast<std::size_t>(heads[h])] = s;
                sign[static_cast<std::size_t>(p[static_cast<std::size_t>(heads[h])])] = -s;
            }
            SignedPermutation sp(p, std::move(sign));
            std::string id = signed_list_id(sp);
            out.push_back({TimeReversalOp(std::move(sp), OpKind::AntisymmetricBlock, std::move(id)), cls});
        }
    }
    detail::sort_ops(out);
    return out;
}

/// The 20 single-particle (M = 3) binary operations.
inline std::vector<TimeReversalOp> single_particle_catalog() {
    std::vector<TimeReversalOp> ops;
    for (auto& t : enumerate_binary(3)) ops.push_back(std::move(t.op));
    return ops;
}

struct ClassCount {
    ConjClass cls;
    YoungTableau tableau;
    std::uint64_t class_size = 0;
    std::uint64_t signed_count = 0;  ///< enumerated elements in this class, signs included
};

struct EnumerationReport {
    int m = 0;
    std::string family;
    std::vector<ClassCount> per_class;
    std::uint64_t total = 0;
    std::uint64_t formula_total = 0;
    bool match = false;
};

inline EnumerationReport enumeration_report(int m, bool antisymmetric = false) {
    EnumerationReport rep;
    rep.m = m;
    rep.family = antisymmetric ? "antisymmetric" : "binary";
    const auto ops = antisymmetric ? enumerate_antisymmetric(m) : enumerate_binary(m);
    rep.formula_total = antisymmetric ? count_antisymmetric(m) : count_binary(m);
    for (const auto& entry : classes_for(m)) {
        if (antisymmetric && entry.cls.r1 != 0) continue;
        ClassCount cc{entry.cls, entry.tableau, entry.size, 0};
        cc.signed_count = static_cast<std::uint64_t>(
            std::count_if(ops.begin(), ops.end(), [&](const TaggedOp& t) { return t.cls == entry.cls; }));
        rep.per_class.push_back(cc);
    }
    rep.total = ops.size();
    rep.match = rep.total == rep.formula_total;
    return rep;
}

}  // namespace treverse

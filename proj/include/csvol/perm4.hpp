#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace csvol {

// Permutation of {0,1,2,3}, stored as the image tuple.
struct Perm4 {
    std::array<uint8_t, 4> img{0, 1, 2, 3};

    uint8_t operator[](int i) const { return img[i]; }

    static Perm4 identity() { return {}; }

    Perm4 inverse() const {
        Perm4 r;
        for (int i = 0; i < 4; ++i) r.img[img[i]] = static_cast<uint8_t>(i);
        return r;
    }

    // (this ∘ other): apply other first.
    Perm4 after(const Perm4& other) const {
        Perm4 r;
        for (int i = 0; i < 4; ++i) r.img[i] = img[other.img[i]];
        return r;
    }

    bool is_even() const {
        int inv = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                if (img[i] > img[j]) ++inv;
        return inv % 2 == 0;
    }

    bool operator==(const Perm4&) const = default;

    std::string str() const {
        std::string s;
        for (int i = 0; i < 4; ++i) s += char('0' + img[i]);
        return s;
    }
};

// An ordering of the four vertex labels of a tetrahedron, e.g. (0,2,1,3).
// Structurally the same data as a permutation; kept as a separate name
// because orderings are vertices of the vertex-truncated polyhedron while
// Perm4 values are gluing maps.
using Ordering = std::array<uint8_t, 4>;

inline int ordering_code(const Ordering& o) {
    return o[0] * 64 + o[1] * 16 + o[2] * 4 + o[3];
}

inline bool ordering_even(const Ordering& o) {
    int inv = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (o[i] > o[j]) ++inv;
    return inv % 2 == 0;
}

inline Ordering apply_perm(const Perm4& p, const Ordering& o) {
    return {p.img[o[0]], p.img[o[1]], p.img[o[2]], p.img[o[3]]};
}

inline Ordering swap_first(Ordering o) { std::swap(o[0], o[1]); return o; }
inline Ordering swap_middle(Ordering o) { std::swap(o[1], o[2]); return o; }
inline Ordering swap_last(Ordering o) { std::swap(o[2], o[3]); return o; }

inline std::string ordering_str(const Ordering& o) {
    std::string s;
    for (int i = 0; i < 4; ++i) s += char('0' + o[i]);
    return s;
}

}  // namespace csvol

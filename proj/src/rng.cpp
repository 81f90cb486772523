#include "hinforge/rng.hpp"

#include "hinforge/errors.hpp"

#include <cmath>

namespace hinforge {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t hash_combine(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (splitmix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

uint64_t hash_str(std::string_view s) {
    // FNV-1a
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

int Rng::uniform_int(int n) {
    if (n <= 0) throw ArgumentError("uniform_int: n must be positive");
    // rejection sampling to avoid modulo bias
    uint64_t bound = static_cast<uint64_t>(n);
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
        v = eng_();
    } while (v >= limit);
    return static_cast<int>(v % bound);
}

std::vector<int> Rng::permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
        int j = uniform_int(i + 1);
        std::swap(p[i], p[j]);
    }
    return p;
}

}  // namespace hinforge

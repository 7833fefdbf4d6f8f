#include "pbt/perm.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pbt {

Perm identity_perm(int m) {
    Perm p(static_cast<size_t>(m));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

Perm transposition(int m, int a, int b) {
    if (a < 0 || b < 0 || a >= m || b >= m) throw std::invalid_argument("transposition out of range");
    Perm p = identity_perm(m);
    std::swap(p[static_cast<size_t>(a)], p[static_cast<size_t>(b)]);
    return p;
}

Perm compose(const Perm& a, const Perm& b) {
    if (a.size() != b.size()) throw std::invalid_argument("permutation sizes differ");
    Perm out(a.size());
    for (size_t x = 0; x < b.size(); ++x) out[x] = a[static_cast<size_t>(b[x])];
    return out;
}

Perm inverse(const Perm& p) {
    Perm out(p.size());
    for (size_t x = 0; x < p.size(); ++x) out[static_cast<size_t>(p[x])] = static_cast<int>(x);
    return out;
}

bool is_identity(const Perm& p) {
    for (size_t x = 0; x < p.size(); ++x)
        if (p[x] != static_cast<int>(x)) return false;
    return true;
}

void check_perm(const Perm& p, int m) {
    if (static_cast<int>(p.size()) != m) throw std::invalid_argument("permutation has wrong size");
    std::vector<char> seen(static_cast<size_t>(m), 0);
    for (int v : p) {
        if (v < 0 || v >= m || seen[static_cast<size_t>(v)]) throw std::invalid_argument("not a permutation");
        seen[static_cast<size_t>(v)] = 1;
    }
}

Perm random_perm(int m, std::mt19937_64& rng) {
    Perm p = identity_perm(m);
    for (int i = m - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(p[static_cast<size_t>(i)], p[static_cast<size_t>(pick(rng))]);
    }
    return p;
}

std::vector<Perm> all_perms(int m) {
    std::vector<Perm> out;
    Perm p = identity_perm(m);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<int> adjacent_word(const Perm& p) {
    // Right-multiplying by s_j swaps image positions j and j+1; bubble-sort to the identity.
    Perm q = p;
    std::vector<int> word;
    for (size_t pass = 0; pass < q.size(); ++pass) {
        bool swapped = false;
        for (size_t j = 0; j + 1 < q.size(); ++j) {
            if (q[j] > q[j + 1]) {
                std::swap(q[j], q[j + 1]);
                word.push_back(static_cast<int>(j));
                swapped = true;
            }
        }
        if (!swapped) break;
    }
    return word;
}

Perm extend_perm(const Perm& p, int m) {
    if (static_cast<int>(p.size()) > m) throw std::invalid_argument("cannot shrink a permutation");
    Perm out = identity_perm(m);
    std::copy(p.begin(), p.end(), out.begin());
    return out;
}

}  // namespace pbt

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pbt {

/// Permutation of {0..m-1} stored as images: p[x] = sigma(x).
using Perm = std::vector<int>;

Perm identity_perm(int m);

/// Transposition of a and b (0-based); identity when a == b.
Perm transposition(int m, int a, int b);

/// (a ∘ b)(x) = a(b(x)).
Perm compose(const Perm& a, const Perm& b);

Perm inverse(const Perm& p);

bool is_identity(const Perm& p);

/// Validates that p is a permutation of {0..m-1}; throws std::invalid_argument.
void check_perm(const Perm& p, int m);

/// Uniformly random permutation from a caller-owned engine.
Perm random_perm(int m, std::mt19937_64& rng);

/// All permutations of {0..m-1} in lexicographic order of the image array.
std::vector<Perm> all_perms(int m);

/// Adjacent positions j such that p ∘ s_{j_1} ∘ ... ∘ s_{j_L} = e.
std::vector<int> adjacent_word(const Perm& p);

/// Embed a permutation of {0..k-1} into {0..m-1}, fixing the rest.
Perm extend_perm(const Perm& p, int m);

}  // namespace pbt
